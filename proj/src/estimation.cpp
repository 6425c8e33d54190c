#include "semibandit/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace semibandit {

void SparseSubdistribution::check() const {
    double s = 0.0;
    for (const auto& [id, q] : weights) {
        if (q < 0.0) throw std::invalid_argument("subdistribution weight is negative");
        s += q;
    }
    if (s > 1.0 + 1e-12) throw std::invalid_argument("subdistribution mass exceeds 1");
}

double MixingDistribution::action_marginal(const Context& x, int a) const {
    if (a < 0 || a >= K) throw std::invalid_argument("action index out of range");
    if (!x.action_valid(a)) return 0.0;
    if (kind == Kind::AllRankingsUniform) {
        return static_cast<double>(L) / static_cast<double>(x.num_valid());
    }
    int hits = 0;
    for (const auto& A : per_action)
        if (A.contains(a)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(per_action.size());
}

Ranking MixingDistribution::sample(const Context& x, Rng& rng) const {
    if (kind == Kind::PerActionList) {
        return per_action[rng.uniform_index(per_action.size())];
    }
    // Partial Fisher-Yates over the valid actions: uniform over ordered
    // L-tuples of distinct actions.
    std::vector<int> pool;
    pool.reserve(static_cast<size_t>(K));
    for (int a = 0; a < K; ++a)
        if (x.action_valid(a)) pool.push_back(a);
    if (static_cast<int>(pool.size()) < L)
        throw std::invalid_argument("fewer valid actions than slots");
    Ranking A;
    A.slots.resize(static_cast<size_t>(L));
    for (int l = 0; l < L; ++l) {
        const size_t j = static_cast<size_t>(l) + rng.uniform_index(pool.size() - static_cast<size_t>(l));
        std::swap(pool[static_cast<size_t>(l)], pool[j]);
        A.slots[static_cast<size_t>(l)] = pool[static_cast<size_t>(l)];
    }
    return A;
}

MixingDistribution build_mixing(const Context& x, int L, Amo* amo) {
    MixingDistribution U;
    U.K = x.K;
    U.L = L;
    if (x.num_valid() == x.K) {
        U.kind = MixingDistribution::Kind::AllRankingsUniform;
        U.p_min = static_cast<double>(L);
        return U;
    }
    if (amo == nullptr)
        throw std::invalid_argument("restricted action space requires an oracle to build U_x");
    U.kind = MixingDistribution::Kind::PerActionList;
    U.p_min = 1.0;
    for (int a = 0; a < x.K; ++a) {
        if (!x.action_valid(a)) continue;
        AmoDataset point;
        AmoRow row;
        row.context = x;
        row.y.assign(static_cast<size_t>(x.K), 0.0);
        row.y[static_cast<size_t>(a)] = 1.0;
        row.v.assign(static_cast<size_t>(L), 1.0);
        point.rows.push_back(std::move(row));
        const Ranking A = amo->best(point).policy.act(x);
        if (!A.contains(a))
            throw OracleFailure("oracle returned a ranking not covering the requested action");
        U.per_action.push_back(A);
    }
    return U;
}

namespace {

void check_mu(double mu, int K) {
    if (!(mu >= 0.0) || mu > 1.0 / static_cast<double>(K) + 1e-15)
        throw std::invalid_argument("smoothing parameter must lie in [0, 1/K]");
}

}  // namespace

double smoothed_marginal(const SparseSubdistribution& Q, const PolicyRegistry& registry,
                         const Context& x, double mu, const MixingDistribution& U, int a) {
    check_mu(mu, x.K);
    double mass = 0.0;
    double covered = 0.0;
    for (const auto& [id, q] : Q.weights) {
        mass += q;
        if (registry[id].act(x).contains(a)) covered += q;
    }
    if (Q.leader && mass < 1.0) {
        if (registry[*Q.leader].act(x).contains(a)) covered += 1.0 - mass;
    }
    const double k_mu = static_cast<double>(x.K) * mu;
    return (1.0 - k_mu) * covered + k_mu * U.action_marginal(x, a);
}

std::pair<Ranking, bool> sample_ranking(const SparseSubdistribution& Q,
                                        const PolicyRegistry& registry, const Context& x,
                                        double mu, const MixingDistribution& U, Rng& rng) {
    check_mu(mu, x.K);
    const double k_mu = static_cast<double>(x.K) * mu;
    if (k_mu > 0.0 && rng.bernoulli(k_mu)) {
        return {U.sample(x, rng), true};
    }
    // Draw a policy from Qtilde: walk the sparse support, residual to the leader.
    double u = rng.uniform();
    double acc = 0.0;
    for (const auto& [id, q] : Q.weights) {
        acc += q;
        if (u < acc) return {registry[id].act(x), false};
    }
    if (!Q.leader)
        throw std::logic_error("subdistribution has residual mass but no leader");
    return {registry[*Q.leader].act(x), false};
}

std::vector<double> importance_weight(const InteractionRecord& record, int K) {
    std::vector<double> yhat(static_cast<size_t>(K), 0.0);
    for (size_t l = 0; l < record.chosen.slots.size(); ++l) {
        const double q = record.marginals[l];
        if (!(q > 0.0)) throw std::domain_error("zero propensity in importance weighting");
        yhat[static_cast<size_t>(record.chosen.slots[l])] = record.observed_y[l] / q;
    }
    return yhat;
}

void History::append(const InteractionRecord& record, const MixingDistribution& mixing) {
    records_.push_back(record);
    auto it = by_context_.find(record.context.id);
    if (it == by_context_.end()) {
        ContextAgg agg;
        agg.context = record.context;
        agg.yhat_sum.assign(static_cast<size_t>(record.context.K), 0.0);
        agg.mixing = mixing;
        it = by_context_.emplace(record.context.id, std::move(agg)).first;
    }
    ContextAgg& agg = it->second;
    ++agg.count;
    const std::vector<double> yhat = importance_weight(record, record.context.K);
    for (size_t a = 0; a < yhat.size(); ++a) agg.yhat_sum[a] += yhat[a];
}

AmoDataset History::reward_dataset(const WeightVector& w) const {
    AmoDataset data;
    data.rows.reserve(by_context_.size());
    for (const auto& [id, agg] : by_context_) {
        AmoRow row;
        row.context = agg.context;
        row.y = agg.yhat_sum;
        row.v = w.w;
        data.rows.push_back(std::move(row));
    }
    return data;
}

double History::scaled_reward(const Policy& pi, const WeightVector& w) const {
    double s = 0.0;
    for (const auto& [id, agg] : by_context_) {
        const Ranking A = pi.act(agg.context);
        for (size_t l = 0; l < A.slots.size(); ++l)
            s += w.w[l] * agg.yhat_sum[static_cast<size_t>(A.slots[l])];
    }
    return s;
}

double empirical_reward(const History& history, const Policy& pi, const WeightVector& w) {
    if (history.rounds() == 0) throw std::invalid_argument("empty history");
    return history.scaled_reward(pi, w) / static_cast<double>(history.rounds());
}

double empirical_regret(const History& history, const Policy& pi, const WeightVector& w,
                        Amo& amo) {
    if (history.rounds() == 0) throw std::invalid_argument("empty history");
    const AmoPick best = amo.best(history.reward_dataset(w));
    const double t = static_cast<double>(history.rounds());
    return history.scaled_reward(best.policy, w) / t - history.scaled_reward(pi, w) / t;
}

}  // namespace semibandit
