#pragma once

#include "semibandit/rng.hpp"
#include "semibandit/types.hpp"

#include <memory>

namespace semibandit {

// r(A) = sum_l w_l * y(A_l) + noise, accumulated left-to-right over slots.
double realized_reward(const Ranking& A, const RewardFeatures& y, const WeightVector& w,
                       double noise);

class Environment {
public:
    virtual ~Environment() = default;
    virtual const EnvironmentSpec& spec() const = 0;
    virtual RoundSample draw(Rng& rng) = 0;
};

// Synthetic generator. Logistic kind: per-action features i.i.d. uniform on
// [-1,1]^d and y(a) = 1/(1+exp(-theta'phi(x,a))); Linear kind: features
// uniform on [0,1]^d, theta nonnegative with unit l1 norm, y(a) =
// theta'phi(x,a) (exactly linearly realizable). The latent theta is fixed by
// latent_score_seed. Noise is uniform on [-h,h].
//
// With context_pool > 0, context ids cycle through a fixed pool and the
// features of pooled contexts depend only on (latent_score_seed, id), so
// tabular policy classes and exact expected rewards are well defined.
class SyntheticEnv : public Environment {
public:
    explicit SyntheticEnv(EnvironmentSpec spec);

    const EnvironmentSpec& spec() const override { return spec_; }
    RoundSample draw(Rng& rng) override;

    const std::vector<double>& latent_theta() const { return theta_; }

    // Pooled context by id, with its deterministic features and mask.
    Context pooled_context(std::int64_t id) const;
    // Mean reward features of a context (no noise).
    RewardFeatures mean_rewards(const Context& x) const;

    // Exact expected policy reward under the uniform context pool.
    // Requires context_pool > 0.
    double exact_policy_reward(const Policy& pi, const WeightVector& w) const;

private:
    Context make_context(std::int64_t id, Rng& feature_rng) const;

    EnvironmentSpec spec_;
    std::vector<double> theta_;
    std::int64_t next_fresh_id_ = 0;
};

// Replays a fixed sequence of (context, reward-feature) pairs, typically
// built from a LETOR file; see letor.hpp. Wraps around at the end.
class ReplayEnv : public Environment {
public:
    ReplayEnv(EnvironmentSpec spec, std::vector<Context> contexts,
              std::vector<RewardFeatures> rewards, bool shuffle, std::uint64_t shuffle_seed);

    const EnvironmentSpec& spec() const override { return spec_; }
    RoundSample draw(Rng& rng) override;

    std::size_t num_contexts() const { return contexts_.size(); }
    const Context& context_at(std::size_t i) const { return contexts_[i]; }
    const RewardFeatures& rewards_at(std::size_t i) const { return rewards_[i]; }

private:
    EnvironmentSpec spec_;
    std::vector<Context> contexts_;
    std::vector<RewardFeatures> rewards_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

// Monte Carlo estimate of R(pi): average realized reward (zero noise) over
// n_mc fresh environment draws.
double expected_policy_reward(const Policy& pi, Environment& env, const WeightVector& w,
                              int n_mc, Rng& rng);

}  // namespace semibandit
