#include "semibandit/vcee.hpp"

#include "semibandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace semibandit {

void OpParams::validate() const {
    if (!(psi > 0.0)) throw std::invalid_argument("psi must be positive");
    if (!(mu > 0.0) || mu > 1.0 / (2.0 * K) + 1e-15)
        throw std::invalid_argument("mu must lie in (0, 1/(2K)]");
    if (!(p_min > 0.0) || p_min > static_cast<double>(K))
        throw std::invalid_argument("p_min must lie in (0, K]");
    if (K <= 0 || L <= 0 || L > K) throw std::invalid_argument("need 0 < L <= K");
    if (w.length() != L) throw std::invalid_argument("weight length must equal L");
}

OpSolver::OpSolver(const History& history, OpParams params, Amo& amo, PolicyRegistry& registry)
    : history_(history), params_(std::move(params)), amo_(amo), registry_(registry) {
    params_.validate();
    if (history_.rounds() == 0) throw std::invalid_argument("solver requires a nonempty history");
    t_ = static_cast<double>(history_.rounds());
    for (const auto& [id, agg] : history_.contexts())
        contexts_.push_back({&agg, static_cast<double>(agg.count) / t_});
    bound_ = 2.0 * params_.K * params_.L / params_.p_min;
    bcoef_ = (params_.w.l1() / params_.w.l2_squared()) /
             (params_.psi * params_.mu * params_.p_min);

    AmoPick pick = amo_.best(history_.reward_dataset(params_.w));
    leader_id_ = pick.policy_id >= 0 ? pick.policy_id : registry_.add(std::move(pick.policy));
    eta_max_scaled_ = scaled_reward(leader_id_);
}

double OpSolver::marginal(const Ctx& c, const std::vector<double>& cov, int a) const {
    const double k_mu = params_.K * params_.mu;
    return (1.0 - k_mu) * cov[static_cast<size_t>(a)] +
           k_mu * c.agg->mixing.action_marginal(c.agg->context, a);
}

double OpSolver::scaled_reward(int policy_id) {
    auto it = reward_cache_.find(policy_id);
    if (it != reward_cache_.end()) return it->second;
    const double s = history_.scaled_reward(registry_[policy_id], params_.w);
    reward_cache_.emplace(policy_id, s);
    return s;
}

double OpSolver::b_value(int policy_id) {
    return bcoef_ * (eta_max_scaled_ - scaled_reward(policy_id)) / t_;
}

PolicyQuantities OpSolver::quantities_from(const Coverage& cov, const Policy& pi,
                                           double b) const {
    PolicyQuantities q;
    q.b = b;
    for (const Ctx& c : contexts_) {
        const std::vector<double>& cv = cov.at(c.agg->context.id);
        const Ranking A = pi.act(c.agg->context);
        for (int slot : A.slots) {
            const double m = marginal(c, cv, slot);
            if (!(m > 0.0)) throw std::logic_error("zero smoothed marginal with mu > 0");
            q.V += c.weight / m;
            q.S += c.weight / (m * m);
        }
    }
    q.D = q.V - bound_ - b;
    return q;
}

AmoDataset OpSolver::violator_dataset(const Coverage& cov) const {
    // Two rows per distinct context (algebraically the 2t-row construction
    // with repeated contexts merged): a variance row whose objective sums
    // the inverse smoothed marginals, and a regret row contributing
    // bcoef * eta(pi). The oracle's argmax then maximizes D + const.
    AmoDataset data;
    data.rows.reserve(2 * contexts_.size());
    const std::vector<double> ones(static_cast<size_t>(params_.L), 1.0);
    for (const Ctx& c : contexts_) {
        const std::vector<double>& cv = cov.at(c.agg->context.id);
        AmoRow var_row;
        var_row.context = c.agg->context;
        var_row.y.assign(static_cast<size_t>(params_.K), 0.0);
        for (int a = 0; a < params_.K; ++a) {
            if (!c.agg->context.action_valid(a)) continue;
            var_row.y[static_cast<size_t>(a)] = c.weight / marginal(c, cv, a);
        }
        var_row.v = ones;
        data.rows.push_back(std::move(var_row));

        AmoRow reg_row;
        reg_row.context = c.agg->context;
        reg_row.y.resize(static_cast<size_t>(params_.K));
        for (int a = 0; a < params_.K; ++a)
            reg_row.y[static_cast<size_t>(a)] = bcoef_ / t_ * c.agg->yhat_sum[static_cast<size_t>(a)];
        reg_row.v = params_.w.w;
        data.rows.push_back(std::move(reg_row));
    }
    return data;
}

double OpSolver::potential_from(const Coverage& cov, const std::map<int, double>& weights) {
    const double k_mu = params_.K * params_.mu;
    double re = 0.0;
    for (const Ctx& c : contexts_) {
        const std::vector<double>& cv = cov.at(c.agg->context.id);
        for (int a = 0; a < params_.K; ++a) {
            if (!c.agg->context.action_valid(a)) continue;
            const double u = c.agg->mixing.action_marginal(c.agg->context, a);
            const double q = marginal(c, cv, a);
            if (u > 0.0)
                re += c.weight * (u * std::log(u / q) + q - u);
            else
                re += c.weight * q;
        }
    }
    double penalty = 0.0;
    for (const auto& [id, q] : weights) penalty += q * b_value(id);
    return re / (1.0 - k_mu) + penalty * params_.p_min / (2.0 * params_.K);
}

long OpSolver::iteration_cap() const {
    const double k_mu = params_.K * params_.mu;
    return static_cast<long>(
        std::ceil(8.0 * std::log(1.0 / k_mu) / (params_.mu * params_.p_min)));
}

OpResult OpSolver::solve() {
    OpResult res;
    std::map<int, double> weights;
    Coverage cov;
    for (const Ctx& c : contexts_)
        cov.emplace(c.agg->context.id, std::vector<double>(static_cast<size_t>(params_.K), 0.0));

    const double k_mu = params_.K * params_.mu;
    const long cap = params_.exact_oracle ? iteration_cap() : 2 * iteration_cap();
    constexpr long kMaxLeaderSwitches = 100;
    long iter = 0;

    auto record = [&](char kind, int violator, double value) {
        if (!params_.record_trace) return;
        TraceRow row;
        row.iteration = res.iterations;
        row.kind = kind;
        row.phi = potential_from(cov, weights);
        row.violator_id = violator;
        row.value = value;
        res.trace.push_back(row);
    };
    record('i', -1, 0.0);  // phi at Q = 0, before any step

    while (true) {
        if (++iter > cap) {
            std::ostringstream msg;
            msg << "feasibility solver exceeded " << cap << " iterations (t=" << history_.rounds()
                << ", mu=" << params_.mu << ", support=" << weights.size()
                << ", leader switches=" << res.leader_switches << ")";
            throw SolverStall(msg.str());
        }
        ++res.iterations;

        double mass = 0.0;
        for (const auto& [id, q] : weights) mass += q * (bound_ + b_value(id));
        if (mass > bound_ * (1.0 + 1e-12)) {
            const double c = bound_ / mass;
            for (auto& [id, q] : weights) q *= c;
            for (auto& [cid, cv] : cov)
                for (double& v : cv) v *= c;
            record('s', -1, c);
            continue;
        }

        AmoPick pick = amo_.best(violator_dataset(cov));
        const int pid = pick.policy_id >= 0 ? pick.policy_id : registry_.add(std::move(pick.policy));
        if (scaled_reward(pid) > eta_max_scaled_ * (1.0 + 1e-12) + 1e-12) {
            // Negative empirical regret: the oracle found a better leader.
            // Restart with fresh penalties against it, keeping Q.
            leader_id_ = pid;
            eta_max_scaled_ = scaled_reward(pid);
            if (++res.leader_switches > kMaxLeaderSwitches)
                throw SolverStall("feasibility solver switched leaders too many times");
            iter = 0;
            record('l', pid, 0.0);
            continue;
        }

        const PolicyQuantities q = quantities_from(cov, registry_[pid], b_value(pid));
        if (q.D > 0.0) {
            const double alpha = (q.V + q.D) / (2.0 * (1.0 - k_mu) * q.S);
            weights[pid] += alpha;
            for (const Ctx& c : contexts_) {
                std::vector<double>& cv = cov[c.agg->context.id];
                const Ranking A = registry_[pid].act(c.agg->context);
                for (int slot : A.slots) cv[static_cast<size_t>(slot)] += alpha;
            }
            record('a', pid, alpha);
            continue;
        }

        record('h', pid, 0.0);
        break;
    }

    res.Q.weights = std::move(weights);
    res.Q.leader = leader_id_;
    return res;
}

PolicyQuantities OpSolver::quantities(const SparseSubdistribution& Q, const Policy& pi) const {
    Coverage cov;
    for (const Ctx& c : contexts_) {
        std::vector<double> cv(static_cast<size_t>(params_.K), 0.0);
        for (const auto& [id, q] : Q.weights) {
            const Ranking A = registry_[id].act(c.agg->context);
            for (int slot : A.slots) cv[static_cast<size_t>(slot)] += q;
        }
        cov.emplace(c.agg->context.id, std::move(cv));
    }
    const double b = bcoef_ *
                     (eta_max_scaled_ - history_.scaled_reward(pi, params_.w)) / t_;
    return quantities_from(cov, pi, b);
}

double OpSolver::potential(const SparseSubdistribution& Q) {
    Coverage cov;
    for (const Ctx& c : contexts_) {
        std::vector<double> cv(static_cast<size_t>(params_.K), 0.0);
        for (const auto& [id, q] : Q.weights) {
            const Ranking A = registry_[id].act(c.agg->context);
            for (int slot : A.slots) cv[static_cast<size_t>(slot)] += q;
        }
        cov.emplace(c.agg->context.id, std::move(cv));
    }
    return potential_from(cov, Q.weights);
}

FeasibilityReport OpSolver::feasibility(const SparseSubdistribution& Q) {
    FeasibilityReport report;
    double mass = 0.0;
    for (const auto& [id, q] : Q.weights) {
        mass += q * b_value(id);
        report.total_weight += q;
    }
    report.mass_violation = std::max(0.0, mass - bound_);
    report.variance_violation = -std::numeric_limits<double>::infinity();
    for (int id = 0; id < registry_.size(); ++id) {
        const PolicyQuantities q = quantities(Q, registry_[id]);
        report.variance_violation = std::max(report.variance_violation, q.D);
    }
    return report;
}

double mu_schedule(long t, int K, double p_min, std::size_t N, double delta) {
    if (t < 1) throw std::invalid_argument("round index must be >= 1");
    const double td = static_cast<double>(t);
    const double log_term =
        std::log(16.0 * td * td * static_cast<double>(N) / delta);
    return std::min(1.0 / (2.0 * K), std::sqrt(log_term / (K * td * p_min)));
}

double mu_experimental(double c, int K, int L, long horizon) {
    if (horizon < 1) throw std::invalid_argument("experimental schedule needs a horizon");
    return c / std::sqrt(static_cast<double>(K) * L * static_cast<double>(horizon));
}

bool epoch_boundary(long t) {
    if (t < 1) return false;
    for (int i = 0;; ++i) {
        const long boundary =
            static_cast<long>(std::ceil(std::pow(2.0, static_cast<double>(i) / 2.0)));
        if (boundary == t) return true;
        if (boundary > t) return false;
    }
}

VceeRunner::VceeRunner(PolicyRegistry& registry, Amo& amo, VceeConfig config, WeightVector w,
                       int K, int L)
    : registry_(registry), amo_(amo), config_(config), w_(std::move(w)), K_(K), L_(L) {
    if (registry_.size() == 0) throw std::invalid_argument("empty policy class");
    if (config_.experimental_mu && config_.horizon < 1)
        throw std::invalid_argument("experimental mu schedule requires a horizon");
    Q_.leader = 0;  // arbitrary initial leader; replaced at the first solve
}

const MixingDistribution& VceeRunner::mixing_for(const Context& x) {
    auto it = mixing_cache_.find(x.id);
    if (it == mixing_cache_.end())
        it = mixing_cache_.emplace(x.id, build_mixing(x, L_, &amo_)).first;
    return it->second;
}

VceeRunner::RoundResult VceeRunner::step(const RoundSample& sample, Rng& rng) {
    const Context& x = sample.context;
    const MixingDistribution& U = mixing_for(x);
    if (p_min_ == 0.0) {
        p_min_ = U.p_min;
        mu_ = config_.experimental_mu
                  ? std::min(mu_experimental(config_.mu_c, K_, L_, config_.horizon),
                             1.0 / (2.0 * K_))
                  : mu_schedule(1, K_, p_min_, static_cast<std::size_t>(registry_.size()),
                                config_.delta);
    }

    RoundResult out;
    auto [A, explored] = sample_ranking(Q_, registry_, x, mu_, U, rng);
    out.chosen = A;
    out.explored = explored;
    out.reward = realized_reward(A, sample.y, w_, sample.noise);

    InteractionRecord record;
    record.context = x;
    record.chosen = A;
    record.observed_y.reserve(A.slots.size());
    record.marginals.reserve(A.slots.size());
    for (int slot : A.slots) {
        record.observed_y.push_back(sample.y.values[static_cast<size_t>(slot)]);
        record.marginals.push_back(smoothed_marginal(Q_, registry_, x, mu_, U, slot));
    }
    record.reward = out.reward;
    history_.append(record, U);

    const long t = history_.rounds();
    if (config_.solve_every_round || epoch_boundary(t)) {
        const double mu_t =
            config_.experimental_mu
                ? mu_
                : mu_schedule(t, K_, p_min_, static_cast<std::size_t>(registry_.size()),
                              config_.delta);
        OpParams params;
        params.psi = config_.psi;
        params.mu = mu_t;
        params.p_min = p_min_;
        params.K = K_;
        params.L = L_;
        params.w = w_;
        params.exact_oracle = config_.exact_oracle;
        params.record_trace = config_.record_trace;
        OpSolver solver(history_, params, amo_, registry_);
        OpResult res = solver.solve();
        Q_ = std::move(res.Q);
        last_trace_ = std::move(res.trace);
        mu_ = mu_t;
        out.solved = true;
    }
    return out;
}

}  // namespace semibandit
