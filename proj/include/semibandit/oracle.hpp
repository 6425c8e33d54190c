#pragma once

#include "semibandit/kernels.hpp"
#include "semibandit/types.hpp"

#include <memory>
#include <vector>

namespace semibandit {

// Grows as approximate oracles return previously unseen policies; for a
// finite enumerable class it is simply that class.
class PolicyRegistry {
public:
    PolicyRegistry() = default;
    explicit PolicyRegistry(std::vector<Policy> policies) : policies_(std::move(policies)) {}

    int size() const { return static_cast<int>(policies_.size()); }
    const Policy& operator[](int id) const { return policies_[id]; }
    const std::vector<Policy>& all() const { return policies_; }

    int add(Policy p) {
        policies_.push_back(std::move(p));
        return size() - 1;
    }

private:
    std::vector<Policy> policies_;
};

struct OracleFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AmoPick {
    int policy_id = -1;  // -1 when the oracle synthesized a new policy
    Policy policy;
};

// Argmax oracle: argmax_pi sum_i <v_i, y_i(pi(x_i))>.
class Amo {
public:
    virtual ~Amo() = default;
    virtual AmoPick best(const AmoDataset& data) = 0;
    long calls() const { return calls_; }

protected:
    long calls_ = 0;
};

// Exhaustive maximization over a finite policy class; ties resolve to the
// lowest policy id.
class ExactAmo : public Amo {
public:
    explicit ExactAmo(const PolicyRegistry& registry, int max_class_size = 100000);
    AmoPick best(const AmoDataset& data) override;
    int best_id(const AmoDataset& data);

private:
    const PolicyRegistry& registry_;
};

// Weighted squared-loss regression data: per row, the listed actions with
// their targets and nonnegative weights.
struct RegressionRow {
    Context context;
    std::vector<int> actions;
    std::vector<double> targets;
    std::vector<double> weights;
};

struct RegressionDataset {
    std::vector<RegressionRow> rows;
};

// Minimizes sum_i sum_{a in A_i} gamma_i(a) (theta'phi(x_i,a) - y_i(a))^2
// by the normal equations; rank-deficient systems get the minimum-norm
// solution. Requires at least one positively weighted term.
std::vector<double> fit_regressor(const RegressionDataset& data, int d);

// Lowers an AMO dataset to regression rows listing all K actions with unit
// weights (the variance-constraint access pattern).
RegressionDataset lower_amo_dataset(const AmoDataset& data);

// Regression-reduction oracle: fits the linear regressor and returns the
// induced greedy policy. Approximate; exact only when the linear class
// realizes the targets.
class RegressionAmo : public Amo {
public:
    RegressionAmo(int d, WeightVector w);
    AmoPick best(const AmoDataset& data) override;
    AmoPick best_regression(const RegressionDataset& data);

private:
    int d_;
    WeightVector w_;
};

}  // namespace semibandit
