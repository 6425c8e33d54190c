#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace semibandit {

// A composite action: ordered tuple of L distinct simple-action indices.
struct Ranking {
    std::vector<int> slots;

    int length() const { return static_cast<int>(slots.size()); }
    bool contains(int action) const {
        for (int a : slots)
            if (a == action) return true;
        return false;
    }
    bool operator==(const Ranking& o) const { return slots == o.slots; }
};

// Per-action context: K rows of d features plus a validity mask.
struct Context {
    std::int64_t id = 0;
    int K = 0;
    int d = 0;
    std::vector<double> features;  // K*d, row-major
    std::vector<char> valid;       // K entries; empty means all valid

    std::span<const double> action_features(int a) const {
        return {features.data() + static_cast<std::size_t>(a) * d,
                static_cast<std::size_t>(d)};
    }
    bool action_valid(int a) const { return valid.empty() || valid[a] != 0; }
    int num_valid() const {
        if (valid.empty()) return K;
        int n = 0;
        for (char v : valid) n += (v != 0);
        return n;
    }
};

// Length-K reward-feature vector. Environment draws lie in [0,1];
// importance-weighted versions are nonnegative but unbounded above.
struct RewardFeatures {
    std::vector<double> values;
};

struct RoundSample {
    Context context;
    RewardFeatures y;
    double noise = 0.0;
};

struct WeightVector {
    std::vector<double> w;
    std::optional<double> norm_bound;

    int length() const { return static_cast<int>(w.size()); }
    double l1() const;
    double l2() const;
    double l2_squared() const;
    bool is_all_ones() const;

    static WeightVector ones(int L);
};

// Throws std::invalid_argument unless the ranking has exactly L distinct
// valid entries for this context.
void check_ranking(const Ranking& A, const Context& x, int L);

enum class PolicyKind { Tabular, LinearGreedy };

// A deterministic map from contexts to rankings. Tabular policies look up
// the context id and fall back to a fixed default ranking for unseen ids;
// linear-greedy policies take the top-L valid actions by theta'phi(x,a),
// breaking ties toward the lowest action index.
struct Policy {
    PolicyKind kind = PolicyKind::Tabular;
    int L = 0;
    std::unordered_map<std::int64_t, Ranking> table;
    Ranking fallback;
    std::vector<double> theta;
    // Nonempty for greedy policies induced by a non-uniform weight vector:
    // the k-th best action goes to the k-th heaviest slot.
    std::vector<double> slot_weights;

    Ranking act(const Context& x) const;

    static Policy tabular(int L, std::unordered_map<std::int64_t, Ranking> table,
                          Ranking fallback);
    static Policy linear_greedy(int L, std::vector<double> theta);
    static Policy linear_greedy(int L, std::vector<double> theta,
                                std::vector<double> slot_weights);
};

enum class EnvironmentKind { Logistic, Linear, LetorReplay };

struct EnvironmentSpec {
    int K = 0;
    int L = 0;
    int d = 0;
    EnvironmentKind kind = EnvironmentKind::Logistic;
    double noise_halfwidth = 0.0;
    std::uint64_t latent_score_seed = 0;
    WeightVector weight;
    // Size of the recurring context pool; 0 draws a fresh context each round.
    int context_pool = 0;
    // When true, a fixed random subset of actions is invalid per pooled
    // context (at least L stay valid), exercising the p_min = 1 path.
    bool mask_actions = false;

    void validate() const;
};

// Top-L valid actions by score, descending, ties toward the lowest index.
Ranking top_l_by_score(const std::vector<double>& scores, const Context& x, int L);

// Best valid ranking under per-action scores and nonnegative slot weights:
// actions sorted by score descending (ties toward the lowest index), the
// k-th best assigned to the k-th heaviest slot. For w = 1 this reduces to
// top_l_by_score. Negative weights are rejected.
Ranking greedy_ranking(const std::vector<double>& scores, const Context& x,
                       const WeightVector& w);

}  // namespace semibandit
