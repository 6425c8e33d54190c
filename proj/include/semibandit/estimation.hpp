#pragma once

#include "semibandit/oracle.hpp"
#include "semibandit/rng.hpp"
#include "semibandit/types.hpp"

#include <map>
#include <utility>

namespace semibandit {

// Nonnegative weights over policy ids, summing to at most 1. When a leader
// is set, the residual mass goes to it and the effective distribution sums
// to exactly 1.
struct SparseSubdistribution {
    std::map<int, double> weights;
    std::optional<int> leader;

    double total() const {
        double s = 0.0;
        for (const auto& [id, q] : weights) s += q;
        return s;
    }
    void check() const;
};

// U_x of the smoothing step. Unrestricted action spaces use the uniform
// distribution over all rankings (p_min = L); restricted ones use a uniform
// distribution over K covering rankings, one per valid simple action
// (p_min = 1).
struct MixingDistribution {
    enum class Kind { AllRankingsUniform, PerActionList };

    Kind kind = Kind::AllRankingsUniform;
    int K = 0;
    int L = 0;
    double p_min = 0.0;
    std::vector<Ranking> per_action;  // one covering ranking per valid action

    // U_x(a in A)
    double action_marginal(const Context& x, int a) const;
    Ranking sample(const Context& x, Rng& rng) const;
};

MixingDistribution build_mixing(const Context& x, int L, Amo* amo);

// One logged round: propensities are recorded at decision time so later
// estimators never need the historical distributions.
struct InteractionRecord {
    Context context;
    Ranking chosen;
    std::vector<double> observed_y;  // per chosen slot
    std::vector<double> marginals;   // q_t(a) per chosen slot, in (0,1]
    double reward = 0.0;
};

// Smoothed marginal: (1-K*mu) * sum_pi Qtilde(pi) 1(a in pi(x)) + K*mu * U_x(a in A).
// Iterates only over the sparse support (plus leader).
double smoothed_marginal(const SparseSubdistribution& Q, const PolicyRegistry& registry,
                         const Context& x, double mu, const MixingDistribution& U, int a);

// Draws from the smoothed law: explore (from U_x) with probability K*mu,
// otherwise play the ranking of a policy drawn from Qtilde.
std::pair<Ranking, bool> sample_ranking(const SparseSubdistribution& Q,
                                        const PolicyRegistry& registry, const Context& x,
                                        double mu, const MixingDistribution& U, Rng& rng);

// Inverse-propensity feature vector: y(a)/q(a) at chosen actions, 0 elsewhere.
std::vector<double> importance_weight(const InteractionRecord& record, int K);

// Append-only interaction history with per-context aggregates (visit counts,
// cumulative importance-weighted features, the mixing distribution built for
// that context). The aggregates make the empirical expectations over H a sum
// over distinct contexts rather than rounds.
class History {
public:
    struct ContextAgg {
        Context context;
        long count = 0;
        std::vector<double> yhat_sum;  // length K
        MixingDistribution mixing;
    };

    void append(const InteractionRecord& record, const MixingDistribution& mixing);

    long rounds() const { return static_cast<long>(records_.size()); }
    const std::vector<InteractionRecord>& records() const { return records_; }
    const std::map<std::int64_t, ContextAgg>& contexts() const { return by_context_; }

    // One AMO row per distinct context: y = cumulative importance-weighted
    // features, v = w. The objective of a policy equals t * eta_t(pi, w).
    AmoDataset reward_dataset(const WeightVector& w) const;

    // t * eta_t(pi, w), computed from the aggregates.
    double scaled_reward(const Policy& pi, const WeightVector& w) const;

private:
    std::vector<InteractionRecord> records_;
    std::map<std::int64_t, ContextAgg> by_context_;
};

// eta_t(pi, w) = (1/t) sum_i <w, yhat_i(pi(x_i))>.
double empirical_reward(const History& history, const Policy& pi, const WeightVector& w);

// Reg-hat_t(pi, w) = max_pi' eta_t(pi', w) - eta_t(pi, w), maximizer via one
// AMO call. May be negative with approximate oracles; never clamped.
double empirical_regret(const History& history, const Policy& pi, const WeightVector& w,
                        Amo& amo);

}  // namespace semibandit
