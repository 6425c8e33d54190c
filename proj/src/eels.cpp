#include "semibandit/eels.hpp"

#include "semibandit/estimation.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace semibandit {

void EelsConfig::validate() const {
    if (T < 1) throw std::invalid_argument("horizon must be positive");
    if (K <= 0 || L < 2 || L > K)
        throw std::invalid_argument("need K >= L >= 2 (pairwise variance estimation)");
    if (N < 1) throw std::invalid_argument("class-size surrogate must be >= 1");
    if (!(delta > 0.0) || delta >= 1.0) throw std::invalid_argument("delta must be in (0,1)");
    if (!(B > 0.0)) throw std::invalid_argument("weight-norm bound must be positive");
}

long n_star(const EelsConfig& cfg) {
    cfg.validate();
    const double log_term = std::log(static_cast<double>(cfg.N) / cfg.delta);
    const double bl = cfg.B * static_cast<double>(cfg.L);
    const double denom = std::min(static_cast<double>(cfg.L), bl * bl);
    if (static_cast<double>(cfg.T) < cfg.K * log_term / denom) {
        std::ostringstream msg;
        msg << "horizon too short: need T >= K ln(N/delta) / min{L, (BL)^2} = "
            << cfg.K * log_term / denom;
        throw std::invalid_argument(msg.str());
    }
    const double b_sqrt_l = cfg.B * std::sqrt(static_cast<double>(cfg.L));
    const double factor = std::max(1.0, std::pow(b_sqrt_l, -2.0 / 3.0));
    const double raw = std::pow(static_cast<double>(cfg.T), 2.0 / 3.0) *
                       std::cbrt(cfg.K * log_term / cfg.L) * factor;
    long n = static_cast<long>(std::ceil(raw));
    return std::max(1L, std::min(n, cfg.T));
}

double vhat_round_term(const std::vector<double>& y_chosen, int K, int L) {
    if (L < 2) throw std::invalid_argument("pairwise variance needs L >= 2");
    if (static_cast<int>(y_chosen.size()) != L)
        throw std::invalid_argument("expected one observation per slot");
    const double pair_prob = static_cast<double>(L) * (L - 1) /
                             (static_cast<double>(K) * (K - 1));
    double s = 0.0;
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            if (i == j) continue;
            const double d = y_chosen[static_cast<size_t>(i)] - y_chosen[static_cast<size_t>(j)];
            s += d * d / pair_prob;
        }
    return s / (2.0 * K * K);
}

double v_tilde(double vhat, long n_star_rounds, double delta) {
    if (vhat < 0.0) throw std::invalid_argument("variance estimate cannot be negative");
    return 2.0 * vhat + 3.0 * std::log(2.0 / delta) / (2.0 * static_cast<double>(n_star_rounds));
}

double lambda_star(double vtilde, const EelsConfig& cfg) {
    const double first = 6.0 * cfg.L * cfg.L *
                         std::log(4.0 * cfg.L * static_cast<double>(cfg.T) / cfg.delta);
    const double second = std::pow(static_cast<double>(cfg.T) * vtilde / cfg.B, 2.0 / 3.0) *
                          std::cbrt(cfg.L * std::log(2.0 / cfg.delta));
    return std::max(first, second);
}

void SecondMomentAccumulator::add(const std::vector<double>& y_chosen, double reward) {
    if (y_chosen.size() != cross.size())
        throw std::invalid_argument("observation length must match the slot count");
    Sigma.add_outer(y_chosen);
    for (size_t l = 0; l < cross.size(); ++l) cross[l] += y_chosen[l] * reward;
    ++count;
}

WeightVector least_squares_weights(const SecondMomentAccumulator& acc) {
    if (acc.count < 1) throw std::invalid_argument("no accumulated rounds");
    WeightVector w;
    w.w = solve_sym(acc.Sigma, acc.cross);
    return w;
}

EelsResult eels_run(const EelsConfig& cfg, Environment& env, Amo& amo, Rng& rng) {
    cfg.validate();
    const WeightVector& w_true = env.spec().weight;
    const long n_min = n_star(cfg);

    MixingDistribution uniform;
    uniform.kind = MixingDistribution::Kind::AllRankingsUniform;
    uniform.K = cfg.K;
    uniform.L = cfg.L;
    uniform.p_min = static_cast<double>(cfg.L);
    const double q_uniform = static_cast<double>(cfg.L) / cfg.K;

    EelsResult res;
    res.trace.reserve(static_cast<size_t>(cfg.T));
    SecondMomentAccumulator acc(cfg.L);
    double vhat_sum = 0.0;
    double gate = 0.0;
    bool gate_ready = false;
    bool exploring = true;

    // Exploration rounds kept for the one-shot policy optimization: each
    // becomes an importance-weighted feature row y(a) K/L at chosen actions.
    AmoDataset explore_data;

    auto finish_exploration = [&](long explored) {
        res.explore_rounds = explored;
        res.w_hat = least_squares_weights(acc);
        for (auto& row : explore_data.rows) row.v = res.w_hat.w;
        AmoPick pick = amo.best(explore_data);
        res.pi_hat = std::move(pick.policy);
        exploring = false;
    };

    for (long t = 1; t <= cfg.T; ++t) {
        RoundSample sample = env.draw(rng);
        EelsTraceRow row;
        row.t = t;
        row.lambda_min = std::numeric_limits<double>::quiet_NaN();

        if (exploring) {
            const Ranking A = uniform.sample(sample.context, rng);
            row.reward = realized_reward(A, sample.y, w_true, sample.noise);
            row.explored = true;
            row.phase = t <= n_min ? "explore-min" : "explore-gate";

            std::vector<double> y_chosen(static_cast<size_t>(cfg.L));
            for (size_t l = 0; l < y_chosen.size(); ++l)
                y_chosen[l] = sample.y.values[static_cast<size_t>(A.slots[l])];
            acc.add(y_chosen, row.reward);

            AmoRow arow;
            arow.context = sample.context;
            arow.y.assign(static_cast<size_t>(cfg.K), 0.0);
            for (size_t l = 0; l < y_chosen.size(); ++l)
                arow.y[static_cast<size_t>(A.slots[l])] = y_chosen[l] / q_uniform;
            explore_data.rows.push_back(std::move(arow));

            if (t <= n_min) vhat_sum += vhat_round_term(y_chosen, cfg.K, cfg.L);
            if (t == n_min) {
                res.vhat = vhat_sum / static_cast<double>(n_min);
                res.vtilde = v_tilde(res.vhat, n_min, cfg.delta);
                gate = cfg.lambda_star_override ? *cfg.lambda_star_override
                                                : lambda_star(res.vtilde, cfg);
                res.gate = gate;
                gate_ready = true;
            }
            if (gate_ready) {
                row.lambda_min = min_eigenvalue(acc.Sigma);
                res.trace.push_back(row);
                if (row.lambda_min > gate) finish_exploration(t);
                continue;
            }
        } else {
            const Ranking A = res.pi_hat.act(sample.context);
            row.reward = realized_reward(A, sample.y, w_true, sample.noise);
            row.phase = "exploit";
        }
        res.trace.push_back(row);
    }

    if (exploring) {
        res.exploration_exhausted = true;
        finish_exploration(cfg.T);
    }
    return res;
}

}  // namespace semibandit
