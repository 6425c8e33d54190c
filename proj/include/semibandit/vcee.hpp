#pragma once

#include "semibandit/estimation.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace semibandit {

// Inputs of the feasibility problem. psi scales the regret penalty b_pi
// (100 in the theoretical statement, 1 in the experimental preset).
struct OpParams {
    double psi = 100.0;
    double mu = 0.0;
    double p_min = 0.0;
    int K = 0;
    int L = 0;
    WeightVector w;
    // Exact oracles must respect the theoretical iteration bound; approximate
    // ones get a 2x allowance before the solver reports a stall.
    bool exact_oracle = true;
    bool record_trace = false;

    void validate() const;
};

// Per-policy solver quantities: V = empirical sum of inverse smoothed
// marginals over the policy's slots, S = same with squared marginals,
// b = scaled empirical regret penalty, D = V - 2KL/p_min - b.
struct PolicyQuantities {
    double V = 0.0;
    double S = 0.0;
    double b = 0.0;
    double D = 0.0;
};

struct TraceRow {
    long iteration = 0;
    char kind = '?';  // 'i' initial state, 's' shrink, 'a' additive, 'l' leader switch, 'h' halt
    double phi = 0.0;
    int violator_id = -1;
    double value = 0.0;  // shrink factor c or step size alpha
};

struct OpResult {
    SparseSubdistribution Q;
    long iterations = 0;
    long leader_switches = 0;
    std::vector<TraceRow> trace;
};

struct FeasibilityReport {
    double mass_violation = 0.0;        // sum Q(pi) b_pi - 2KL/p_min, clamped at 0
    double variance_violation = 0.0;    // max over policies of V - 2KL/p_min - b
    double total_weight = 0.0;
    bool feasible(double tol = 1e-9) const {
        return mass_violation <= tol && variance_violation <= tol && total_weight <= 1.0 + tol;
    }
};

struct SolverStall : std::runtime_error {
    explicit SolverStall(const std::string& what) : std::runtime_error(what) {}
};

// Coordinate-ascent solver over a fixed history. Precomputes per-context
// aggregates so every quantity is a sum over distinct contexts, not rounds.
class OpSolver {
public:
    OpSolver(const History& history, OpParams params, Amo& amo, PolicyRegistry& registry);

    // Runs the ascent from Q = 0. The returned subdistribution carries the
    // final leader (empirical-reward maximizer, switched if the oracle turns
    // up a better policy mid-solve).
    OpResult solve();

    PolicyQuantities quantities(const SparseSubdistribution& Q, const Policy& pi) const;
    double potential(const SparseSubdistribution& Q);
    // Checks the mass and variance constraints against every registered policy.
    FeasibilityReport feasibility(const SparseSubdistribution& Q);

    int leader_id() const { return leader_id_; }
    long iteration_cap() const;

private:
    struct Ctx {
        const History::ContextAgg* agg;
        double weight;  // count / t
    };

    using Coverage = std::map<std::int64_t, std::vector<double>>;

    double marginal(const Ctx& c, const std::vector<double>& cov, int a) const;
    double scaled_reward(int policy_id);
    double b_value(int policy_id);
    PolicyQuantities quantities_from(const Coverage& cov, const Policy& pi, double b) const;
    AmoDataset violator_dataset(const Coverage& cov) const;
    double potential_from(const Coverage& cov, const std::map<int, double>& weights);

    const History& history_;
    OpParams params_;
    Amo& amo_;
    PolicyRegistry& registry_;
    std::vector<Ctx> contexts_;
    double t_ = 0.0;
    double bound_ = 0.0;  // 2KL/p_min
    double bcoef_ = 0.0;  // (||w||_1 / ||w||_2^2) / (psi mu p_min)
    int leader_id_ = -1;
    double eta_max_scaled_ = 0.0;
    std::map<int, double> reward_cache_;  // policy id -> t * eta(pi)
};

// Exploration schedule: min{1/(2K), sqrt(ln(16 t^2 N / delta) / (K t p_min))}.
double mu_schedule(long t, int K, double p_min, std::size_t N, double delta);
// Experimental override: c / sqrt(K L T).
double mu_experimental(double c, int K, int L, long horizon);

struct VceeConfig {
    double psi = 100.0;
    double delta = 0.05;
    // Experimental mode fixes mu = c / sqrt(KLT) for the whole run.
    bool experimental_mu = false;
    double mu_c = 0.008;
    long horizon = 0;  // required in experimental mode
    bool solve_every_round = false;  // default: epoch schedule ceil(2^{i/2})
    bool record_trace = false;
    bool exact_oracle = true;  // governs the solver's iteration-cap policy
};

// True when an OP re-solve is scheduled after round t (deduplicated
// ceil(2^{i/2}) boundaries: 1, 2, 3, 4, 6, 8, 12, 16, ...).
bool epoch_boundary(long t);

// One full run of the epoch-greedy variance-controlled learner.
class VceeRunner {
public:
    struct RoundResult {
        Ranking chosen;
        bool explored = false;
        double reward = 0.0;
        bool solved = false;  // OP re-solved after this round
    };

    VceeRunner(PolicyRegistry& registry, Amo& amo, VceeConfig config, WeightVector w,
               int K, int L);

    RoundResult step(const RoundSample& sample, Rng& rng);

    const History& history() const { return history_; }
    const SparseSubdistribution& Q() const { return Q_; }
    double current_mu() const { return mu_; }
    const std::vector<TraceRow>& last_trace() const { return last_trace_; }

private:
    const MixingDistribution& mixing_for(const Context& x);

    PolicyRegistry& registry_;
    Amo& amo_;
    VceeConfig config_;
    WeightVector w_;
    int K_;
    int L_;
    History history_;
    SparseSubdistribution Q_;
    double mu_ = 0.0;
    double p_min_ = 0.0;
    std::map<std::int64_t, MixingDistribution> mixing_cache_;
    std::vector<TraceRow> last_trace_;
};

}  // namespace semibandit
