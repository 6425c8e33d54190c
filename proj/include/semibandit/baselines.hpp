#pragma once

#include "semibandit/estimation.hpp"
#include "semibandit/linalg.hpp"

#include <optional>

namespace semibandit {

// Exploration length for the explore-first variant:
// ceil(T^{2/3} (K ln(2N/delta) / L)^{1/3}), clamped to [1, T].
long egreedy_n(long T, int K, int L, std::size_t N, double delta);

struct EpsGreedyConfig {
    enum class Mode { ExploreFirst, Mixed };
    Mode mode = Mode::Mixed;
    double epsilon = 0.1;  // mixed mode
    long n = 0;            // explore-first exploration length
};

// Uniform exploration plus greedy exploitation of the empirically best
// policy. Mixed mode explores with probability epsilon every round, refits
// on the ceil(2^{i/2}) schedule, and importance-weights all rounds
// (exploitation included). Explore-first plays uniformly for n rounds,
// fits once, then exploits.
class EpsGreedy {
public:
    struct RoundResult {
        Ranking chosen;
        bool explored = false;
        double reward = 0.0;
        bool refit = false;
    };

    EpsGreedy(PolicyRegistry& registry, Amo& amo, EpsGreedyConfig config, WeightVector w,
              int K, int L);

    RoundResult step(const RoundSample& sample, Rng& rng);

    const History& history() const { return history_; }
    const std::optional<Policy>& best_policy() const { return best_; }
    // Probability the given action lands in the played ranking this round.
    double action_marginal(const Context& x, int a) const;

private:
    PolicyRegistry& registry_;
    Amo& amo_;
    EpsGreedyConfig config_;
    WeightVector w_;
    int K_;
    int L_;
    History history_;
    MixingDistribution uniform_;
    std::optional<Policy> best_;
};

struct LinUcbConfig {
    double alpha = 1.0;
    int update_period = 100;
};

// Optimism-based linear baseline for the all-ones weight regime: scores
// actions by phi'theta + alpha * phi' Sigma^{-1} phi, plays the top L, and
// refits the ridge system Sigma = I + sum phi phi', theta = Sigma^{-1} sum
// phi y from running full-history sums every update_period rounds.
class LinUcb {
public:
    struct RoundResult {
        Ranking chosen;
        double reward = 0.0;
        bool refit = false;
    };

    LinUcb(int d, int L, LinUcbConfig config);

    double score(const Context& x, int a) const;
    Ranking choose(const Context& x) const;
    RoundResult step(const RoundSample& sample, const WeightVector& w);

    const std::vector<double>& theta() const { return theta_; }
    const SymMatrix& sigma() const { return sigma_; }

private:
    void refit();

    int d_;
    int L_;
    LinUcbConfig config_;
    long rounds_ = 0;
    SymMatrix gram_;              // sum phi phi' over all observed slots
    std::vector<double> rhs_;     // sum phi y
    SymMatrix sigma_;             // I + gram at the last refit
    SymMatrix sigma_inv_;
    std::vector<double> theta_;
};

// Plays a uniformly random valid ranking every round.
class UniformBaseline {
public:
    UniformBaseline(int K, int L);

    struct RoundResult {
        Ranking chosen;
        double reward = 0.0;
    };

    RoundResult step(const RoundSample& sample, const WeightVector& w, Rng& rng);

private:
    MixingDistribution uniform_;
};

}  // namespace semibandit
