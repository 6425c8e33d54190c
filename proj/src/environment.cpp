#include "semibandit/environment.hpp"

#include "semibandit/kernels.hpp"

#include <cmath>
#include <numeric>

namespace semibandit {

double realized_reward(const Ranking& A, const RewardFeatures& y, const WeightVector& w,
                       double noise) {
    if (w.length() != A.length())
        throw std::invalid_argument("realized_reward: weight/ranking length mismatch");
    double r = 0.0;
    for (int l = 0; l < A.length(); ++l) {
        const int a = A.slots[l];
        if (a < 0 || a >= static_cast<int>(y.values.size()))
            throw std::invalid_argument("realized_reward: action index out of range");
        r += w.w[l] * y.values[a];
    }
    return r + noise;
}

SyntheticEnv::SyntheticEnv(EnvironmentSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    Rng latent(spec_.latent_score_seed);
    theta_.resize(spec_.d);
    if (spec_.kind == EnvironmentKind::Linear) {
        // nonnegative, unit l1 norm: y = theta'phi stays in [0,1] for phi in [0,1]^d
        double total = 0.0;
        for (double& t : theta_) {
            t = latent.uniform(0.5, 1.5);
            total += t;
        }
        for (double& t : theta_) t /= total;
    } else {
        for (double& t : theta_) t = latent.uniform(-1.0, 1.0);
    }
    next_fresh_id_ = spec_.context_pool;
}

Context SyntheticEnv::make_context(std::int64_t id, Rng& feature_rng) const {
    Context x;
    x.id = id;
    x.K = spec_.K;
    x.d = spec_.d;
    x.features.resize(static_cast<std::size_t>(spec_.K) * spec_.d);
    const double lo = spec_.kind == EnvironmentKind::Linear ? 0.0 : -1.0;
    for (double& f : x.features) f = feature_rng.uniform(lo, 1.0);
    if (spec_.mask_actions && spec_.K > spec_.L) {
        x.valid.assign(spec_.K, 1);
        // invalidate a random subset, keeping at least L actions
        const int max_masked = spec_.K - spec_.L;
        const int n_masked = static_cast<int>(feature_rng.uniform_index(max_masked + 1));
        for (int m = 0; m < n_masked; ++m) {
            int a = static_cast<int>(feature_rng.uniform_index(spec_.K));
            x.valid[a] = 0;
        }
        if (x.num_valid() < spec_.L) x.valid.assign(spec_.K, 1);
    }
    return x;
}

Context SyntheticEnv::pooled_context(std::int64_t id) const {
    // features depend only on (latent seed, id) so pooled contexts recur
    Rng feature_rng(spec_.latent_score_seed * 0x9e3779b97f4a7c15ULL + 0x2545F4914F6CDD1DULL +
                    static_cast<std::uint64_t>(id));
    return make_context(id, feature_rng);
}

RewardFeatures SyntheticEnv::mean_rewards(const Context& x) const {
    RewardFeatures y;
    y.values.resize(spec_.K);
    for (int a = 0; a < spec_.K; ++a) {
        auto phi = x.action_features(a);
        double s = 0.0;
        for (int j = 0; j < spec_.d; ++j) s += theta_[j] * phi[j];
        y.values[a] = spec_.kind == EnvironmentKind::Linear ? s : 1.0 / (1.0 + std::exp(-s));
    }
    return y;
}

RoundSample SyntheticEnv::draw(Rng& rng) {
    RoundSample s;
    if (spec_.context_pool > 0) {
        const std::int64_t id =
            static_cast<std::int64_t>(rng.uniform_index(spec_.context_pool));
        s.context = pooled_context(id);
    } else {
        s.context = make_context(next_fresh_id_++, rng);
    }
    s.y = mean_rewards(s.context);
    const double h = spec_.noise_halfwidth;
    s.noise = h > 0.0 ? rng.uniform(-h, h) : 0.0;
    return s;
}

double SyntheticEnv::exact_policy_reward(const Policy& pi, const WeightVector& w) const {
    if (spec_.context_pool <= 0)
        throw std::invalid_argument("exact_policy_reward requires a context pool");
    double total = 0.0;
    for (int id = 0; id < spec_.context_pool; ++id) {
        const Context x = pooled_context(id);
        total += realized_reward(pi.act(x), mean_rewards(x), w, 0.0);
    }
    return total / spec_.context_pool;
}

ReplayEnv::ReplayEnv(EnvironmentSpec spec, std::vector<Context> contexts,
                     std::vector<RewardFeatures> rewards, bool shuffle,
                     std::uint64_t shuffle_seed)
    : spec_(std::move(spec)), contexts_(std::move(contexts)), rewards_(std::move(rewards)) {
    order_.resize(contexts_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (shuffle) {
        Rng rng(shuffle_seed);
        for (std::size_t i = order_.size(); i > 1; --i)
            std::swap(order_[i - 1], order_[rng.uniform_index(i)]);
    }
}

RoundSample ReplayEnv::draw(Rng&) {
    if (contexts_.empty()) throw std::invalid_argument("replay environment is empty");
    const std::size_t i = order_[cursor_];
    cursor_ = (cursor_ + 1) % order_.size();
    RoundSample s;
    s.context = contexts_[i];
    s.y = rewards_[i];
    s.noise = 0.0;
    return s;
}

double expected_policy_reward(const Policy& pi, Environment& env, const WeightVector& w,
                              int n_mc, Rng& rng) {
    if (n_mc < 1) throw std::invalid_argument("expected_policy_reward: n_mc >= 1 required");
    std::vector<RoundSample> samples;
    samples.reserve(n_mc);
    for (int i = 0; i < n_mc; ++i) samples.push_back(env.draw(rng));
    std::vector<double> rewards;
    kernels::policy_rewards_parallel(pi, samples, w, rewards);
    double total = 0.0;
    for (double r : rewards) total += r;
    return total / n_mc;
}

}  // namespace semibandit
