#pragma once

#include "semibandit/environment.hpp"
#include "semibandit/linalg.hpp"
#include "semibandit/oracle.hpp"
#include "semibandit/rng.hpp"

#include <optional>
#include <string>

namespace semibandit {

struct EelsConfig {
    long T = 0;
    int K = 0;
    int L = 0;
    std::size_t N = 1000;  // class size, or the configured surrogate for infinite classes
    double delta = 0.05;
    double B = 1.0;  // bound on ||w*||_2
    // Test hook: replaces the computed eigenvalue gate (0 disables the gate,
    // so exploration ends exactly at the minimum round count).
    std::optional<double> lambda_star_override;

    void validate() const;
};

// Minimum exploration length: ceil(T^{2/3} (K ln(N/delta) / L)^{1/3}
// max{1, (B sqrt(L))^{-2/3}}), clamped to [1, T]. Requires the horizon
// precondition T >= K ln(N/delta) / min{L, (BL)^2}.
long n_star(const EelsConfig& cfg);

// Per-round variance statistic: (1/(2K^2)) sum over ordered pairs of chosen
// slots of (y(a)-y(b))^2 / U(a,b in A), with U(a,b in A) = L(L-1)/(K(K-1))
// under uniform exploration. Always in [0, 1/2]; the variance estimate is
// the mean of these over the first n* rounds.
double vhat_round_term(const std::vector<double>& y_chosen, int K, int L);

// Upper confidence adjustment: 2 vhat + 3 ln(2/delta) / (2 n*).
double v_tilde(double vhat, long n_star_rounds, double delta);

// Eigenvalue gate: max{6 L^2 ln(4LT/delta), (T vtilde / B)^{2/3} (L ln(2/delta))^{1/3}}.
double lambda_star(double vtilde, const EelsConfig& cfg);

// Running second-moment system for the least-squares weight recovery:
// Sigma accumulates y(A) y(A)^T, cross accumulates y(A) * r.
struct SecondMomentAccumulator {
    SymMatrix Sigma;
    std::vector<double> cross;
    long count = 0;

    explicit SecondMomentAccumulator(int L)
        : Sigma(static_cast<size_t>(L)), cross(static_cast<size_t>(L), 0.0) {}

    void add(const std::vector<double>& y_chosen, double reward);
};

// Solves Sigma w = cross; minimum-norm pseudoinverse solution when singular.
WeightVector least_squares_weights(const SecondMomentAccumulator& acc);

struct EelsTraceRow {
    long t = 0;
    std::string phase;   // explore-min | explore-gate | exploit
    double reward = 0.0;
    double lambda_min = 0.0;  // snapshot at gate checks; NaN otherwise
    bool explored = false;
};

struct EelsResult {
    std::vector<EelsTraceRow> trace;
    WeightVector w_hat;
    Policy pi_hat;
    long explore_rounds = 0;
    double vhat = 0.0;
    double vtilde = 0.0;
    double gate = 0.0;  // lambda_star actually used
    // Set when the eigenvalue gate never opened before the horizon; the run
    // still fits weights and a policy but plays no exploitation rounds.
    bool exploration_exhausted = false;
};

// Full run: uniform exploration with variance estimation for n* rounds, then
// uniform exploration until lambda_min(Sigma) exceeds the gate, then weight
// recovery, one policy optimization call, and pure exploitation.
EelsResult eels_run(const EelsConfig& cfg, Environment& env, Amo& amo, Rng& rng);

}  // namespace semibandit
