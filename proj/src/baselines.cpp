#include "semibandit/baselines.hpp"

#include "semibandit/environment.hpp"
#include "semibandit/vcee.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace semibandit {

long egreedy_n(long T, int K, int L, std::size_t N, double delta) {
    if (T < 1) throw std::invalid_argument("horizon must be positive");
    const double log_term = std::log(static_cast<double>(N) / delta);
    if (static_cast<double>(T) < K * log_term / L) {
        std::ostringstream msg;
        msg << "horizon too short: need T >= K ln(N/delta) / L = " << K * log_term / L;
        throw std::invalid_argument(msg.str());
    }
    const double raw = std::pow(static_cast<double>(T), 2.0 / 3.0) *
                       std::cbrt(K * std::log(2.0 * static_cast<double>(N) / delta) / L);
    return std::max(1L, std::min(static_cast<long>(std::ceil(raw)), T));
}

namespace {

MixingDistribution all_rankings_uniform(int K, int L) {
    MixingDistribution U;
    U.kind = MixingDistribution::Kind::AllRankingsUniform;
    U.K = K;
    U.L = L;
    U.p_min = static_cast<double>(L);
    return U;
}

}  // namespace

EpsGreedy::EpsGreedy(PolicyRegistry& registry, Amo& amo, EpsGreedyConfig config,
                     WeightVector w, int K, int L)
    : registry_(registry), amo_(amo), config_(config), w_(std::move(w)), K_(K), L_(L),
      uniform_(all_rankings_uniform(K, L)) {
    if (config_.epsilon < 0.0 || config_.epsilon > 1.0)
        throw std::invalid_argument("epsilon must lie in [0,1]");
    if (config_.mode == EpsGreedyConfig::Mode::ExploreFirst && config_.n < 1)
        throw std::invalid_argument("explore-first mode needs a positive exploration length");
}

double EpsGreedy::action_marginal(const Context& x, int a) const {
    const double u = static_cast<double>(L_) / x.num_valid();
    if (!best_) return u;  // uniform until the first fit
    if (config_.mode == EpsGreedyConfig::Mode::ExploreFirst)
        return best_->act(x).contains(a) ? 1.0 : 0.0;
    const double e = config_.epsilon;
    return e * u + (1.0 - e) * (best_->act(x).contains(a) ? 1.0 : 0.0);
}

EpsGreedy::RoundResult EpsGreedy::step(const RoundSample& sample, Rng& rng) {
    const Context& x = sample.context;
    RoundResult out;
    const bool exploit_only = config_.mode == EpsGreedyConfig::Mode::ExploreFirst &&
                              best_.has_value();
    if (exploit_only) {
        out.chosen = best_->act(x);
    } else if (!best_ || rng.bernoulli(config_.epsilon)) {
        out.chosen = uniform_.sample(x, rng);
        out.explored = true;
    } else {
        out.chosen = best_->act(x);
    }
    out.reward = realized_reward(out.chosen, sample.y, w_, sample.noise);

    // Everything is logged with its marginal; exploitation rounds still
    // contribute through importance weighting.
    InteractionRecord record;
    record.context = x;
    record.chosen = out.chosen;
    for (int slot : out.chosen.slots) {
        record.observed_y.push_back(sample.y.values[static_cast<size_t>(slot)]);
        record.marginals.push_back(action_marginal(x, slot));
    }
    record.reward = out.reward;
    history_.append(record, uniform_);

    const long t = history_.rounds();
    const bool fit_now = config_.mode == EpsGreedyConfig::Mode::ExploreFirst
                             ? (!best_ && t >= config_.n)
                             : epoch_boundary(t);
    if (fit_now) {
        AmoPick pick = amo_.best(history_.reward_dataset(w_));
        best_ = std::move(pick.policy);
        out.refit = true;
    }
    return out;
}

LinUcb::LinUcb(int d, int L, LinUcbConfig config)
    : d_(d), L_(L), config_(config),
      gram_(static_cast<size_t>(d)), rhs_(static_cast<size_t>(d), 0.0),
      sigma_(SymMatrix::identity(static_cast<size_t>(d))),
      sigma_inv_(SymMatrix::identity(static_cast<size_t>(d))),
      theta_(static_cast<size_t>(d), 0.0) {
    if (d < 1 || L < 1) throw std::invalid_argument("need d >= 1 and L >= 1");
    if (config_.update_period < 1) throw std::invalid_argument("update period must be >= 1");
    if (!(config_.alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
}

double LinUcb::score(const Context& x, int a) const {
    const auto phi = x.action_features(a);
    double mean = 0.0;
    for (int i = 0; i < d_; ++i) mean += phi[static_cast<size_t>(i)] * theta_[static_cast<size_t>(i)];
    double bonus = 0.0;
    for (int i = 0; i < d_; ++i) {
        double row = 0.0;
        for (int j = 0; j < d_; ++j)
            row += sigma_inv_(static_cast<size_t>(i), static_cast<size_t>(j)) *
                   phi[static_cast<size_t>(j)];
        bonus += phi[static_cast<size_t>(i)] * row;
    }
    return mean + config_.alpha * bonus;
}

Ranking LinUcb::choose(const Context& x) const {
    std::vector<double> scores(static_cast<size_t>(x.K), 0.0);
    for (int a = 0; a < x.K; ++a)
        if (x.action_valid(a)) scores[static_cast<size_t>(a)] = score(x, a);
    return top_l_by_score(scores, x, L_);
}

void LinUcb::refit() {
    sigma_ = SymMatrix::identity(static_cast<size_t>(d_));
    for (size_t i = 0; i < sigma_.a.size(); ++i) sigma_.a[i] += gram_.a[i];
    theta_ = solve_sym(sigma_, rhs_);
    // Explicit inverse, column by column; d stays small in every intended use.
    std::vector<double> e(static_cast<size_t>(d_), 0.0);
    for (int j = 0; j < d_; ++j) {
        e.assign(static_cast<size_t>(d_), 0.0);
        e[static_cast<size_t>(j)] = 1.0;
        const std::vector<double> col = solve_sym(sigma_, e);
        for (int i = 0; i < d_; ++i)
            sigma_inv_(static_cast<size_t>(i), static_cast<size_t>(j)) =
                col[static_cast<size_t>(i)];
    }
}

LinUcb::RoundResult LinUcb::step(const RoundSample& sample, const WeightVector& w) {
    if (!w.is_all_ones())
        throw std::invalid_argument("this baseline supports only all-ones slot weights");
    const Context& x = sample.context;
    RoundResult out;
    out.chosen = choose(x);
    out.reward = realized_reward(out.chosen, sample.y, w, sample.noise);
    for (int slot : out.chosen.slots) {
        const auto phi = x.action_features(slot);
        std::vector<double> v(phi.begin(), phi.end());
        gram_.add_outer(v);
        const double y = sample.y.values[static_cast<size_t>(slot)];
        for (int i = 0; i < d_; ++i) rhs_[static_cast<size_t>(i)] += v[static_cast<size_t>(i)] * y;
    }
    ++rounds_;
    if (rounds_ % config_.update_period == 0) {
        refit();
        out.refit = true;
    }
    return out;
}

UniformBaseline::UniformBaseline(int K, int L) : uniform_(all_rankings_uniform(K, L)) {}

UniformBaseline::RoundResult UniformBaseline::step(const RoundSample& sample,
                                                   const WeightVector& w, Rng& rng) {
    RoundResult out;
    out.chosen = uniform_.sample(sample.context, rng);
    out.reward = realized_reward(out.chosen, sample.y, w, sample.noise);
    return out;
}

}  // namespace semibandit
