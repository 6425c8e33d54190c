#include "semibandit/types.hpp"

#include <algorithm>
#include <cmath>

namespace semibandit {

double WeightVector::l1() const {
    double s = 0.0;
    for (double v : w) s += std::fabs(v);
    return s;
}

double WeightVector::l2_squared() const {
    double s = 0.0;
    for (double v : w) s += v * v;
    return s;
}

double WeightVector::l2() const { return std::sqrt(l2_squared()); }

bool WeightVector::is_all_ones() const {
    for (double v : w)
        if (v != 1.0) return false;
    return !w.empty();
}

WeightVector WeightVector::ones(int L) {
    WeightVector wv;
    wv.w.assign(L, 1.0);
    return wv;
}

void check_ranking(const Ranking& A, const Context& x, int L) {
    if (A.length() != L) throw std::invalid_argument("ranking has wrong length");
    for (int i = 0; i < A.length(); ++i) {
        const int a = A.slots[i];
        if (a < 0 || a >= x.K) throw std::invalid_argument("ranking entry out of range");
        if (!x.action_valid(a)) throw std::invalid_argument("ranking uses an invalid action");
        for (int j = i + 1; j < A.length(); ++j)
            if (A.slots[j] == a) throw std::invalid_argument("ranking entries not distinct");
    }
}

Ranking top_l_by_score(const std::vector<double>& scores, const Context& x, int L) {
    std::vector<int> order;
    order.reserve(x.K);
    for (int a = 0; a < x.K; ++a)
        if (x.action_valid(a)) order.push_back(a);
    if (static_cast<int>(order.size()) < L)
        throw std::invalid_argument("fewer than L valid actions");
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
        if (scores[l] != scores[r]) return scores[l] > scores[r];
        return l < r;
    });
    Ranking out;
    out.slots.assign(order.begin(), order.begin() + L);
    return out;
}

Ranking greedy_ranking(const std::vector<double>& scores, const Context& x,
                       const WeightVector& w) {
    for (double wl : w.w)
        if (wl < 0.0) throw std::invalid_argument("greedy_ranking: negative slot weight");
    const int L = w.length();
    const Ranking best = top_l_by_score(scores, x, L);
    // k-th best action into the k-th heaviest slot (rearrangement inequality)
    std::vector<int> slot_order(L);
    for (int l = 0; l < L; ++l) slot_order[l] = l;
    std::stable_sort(slot_order.begin(), slot_order.end(),
                     [&](int l, int r) { return w.w[l] > w.w[r]; });
    Ranking out;
    out.slots.assign(L, -1);
    for (int k = 0; k < L; ++k) out.slots[slot_order[k]] = best.slots[k];
    return out;
}

Ranking Policy::act(const Context& x) const {
    if (kind == PolicyKind::Tabular) {
        auto it = table.find(x.id);
        return it != table.end() ? it->second : fallback;
    }
    std::vector<double> scores(x.K, 0.0);
    for (int a = 0; a < x.K; ++a) {
        auto phi = x.action_features(a);
        double s = 0.0;
        for (int j = 0; j < x.d; ++j) s += theta[j] * phi[j];
        scores[a] = s;
    }
    if (!slot_weights.empty()) {
        WeightVector wv;
        wv.w = slot_weights;
        return greedy_ranking(scores, x, wv);
    }
    return top_l_by_score(scores, x, L);
}

Policy Policy::tabular(int L, std::unordered_map<std::int64_t, Ranking> table,
                       Ranking fallback) {
    Policy p;
    p.kind = PolicyKind::Tabular;
    p.L = L;
    p.table = std::move(table);
    p.fallback = std::move(fallback);
    return p;
}

Policy Policy::linear_greedy(int L, std::vector<double> theta) {
    Policy p;
    p.kind = PolicyKind::LinearGreedy;
    p.L = L;
    p.theta = std::move(theta);
    return p;
}

Policy Policy::linear_greedy(int L, std::vector<double> theta,
                             std::vector<double> slot_weights) {
    Policy p = linear_greedy(L, std::move(theta));
    p.slot_weights = std::move(slot_weights);
    return p;
}

void EnvironmentSpec::validate() const {
    if (L < 1 || L > K) throw std::invalid_argument("environment requires 1 <= L <= K");
    if (noise_halfwidth < 0.0 || noise_halfwidth > 1.0)
        throw std::invalid_argument("noise_halfwidth must lie in [0,1]");
    if (kind != EnvironmentKind::LetorReplay && d < 1)
        throw std::invalid_argument("synthetic environments need d >= 1");
}

}  // namespace semibandit
