#include "semibandit/oracle.hpp"

#include "semibandit/linalg.hpp"

#include <stdexcept>

namespace semibandit {

ExactAmo::ExactAmo(const PolicyRegistry& registry, int max_class_size)
    : registry_(registry) {
    if (registry.size() == 0) throw std::invalid_argument("ExactAmo: empty policy class");
    if (registry.size() > max_class_size)
        throw std::invalid_argument("ExactAmo: policy class exceeds enumeration cap");
}

int ExactAmo::best_id(const AmoDataset& data) {
    ++calls_;
    std::vector<double> objectives;
    kernels::amo_objectives_parallel(registry_.all(), data, objectives);
    int best = 0;
    for (int p = 1; p < registry_.size(); ++p)
        if (objectives[p] > objectives[best]) best = p;
    return best;
}

AmoPick ExactAmo::best(const AmoDataset& data) {
    const int id = best_id(data);
    return {id, registry_[id]};
}

std::vector<double> fit_regressor(const RegressionDataset& data, int d) {
    SymMatrix gram(d);
    std::vector<double> rhs(d, 0.0);
    bool any_positive = false;
    for (const RegressionRow& row : data.rows) {
        for (std::size_t k = 0; k < row.actions.size(); ++k) {
            const double g = row.weights[k];
            if (g < 0.0) throw std::invalid_argument("fit_regressor: negative weight");
            if (g == 0.0) continue;
            any_positive = true;
            const int a = row.actions[k];
            if (!row.context.action_valid(a))
                throw std::invalid_argument("fit_regressor: invalid action listed");
            auto phi = row.context.action_features(a);
            for (int i = 0; i < d; ++i) {
                rhs[i] += g * row.targets[k] * phi[i];
                for (int j = 0; j < d; ++j) gram(i, j) += g * phi[i] * phi[j];
            }
        }
    }
    if (!any_positive)
        throw std::invalid_argument("fit_regressor: no positively weighted rows");
    return pinv_solve(gram, rhs, 1e-10);
}

RegressionDataset lower_amo_dataset(const AmoDataset& data) {
    RegressionDataset out;
    out.rows.reserve(data.rows.size());
    for (const AmoRow& row : data.rows) {
        RegressionRow r;
        r.context = row.context;
        for (int a = 0; a < row.context.K; ++a) {
            if (!row.context.action_valid(a)) continue;
            r.actions.push_back(a);
            r.targets.push_back(row.y[a]);
            r.weights.push_back(1.0);
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

RegressionAmo::RegressionAmo(int d, WeightVector w) : d_(d), w_(std::move(w)) {}

AmoPick RegressionAmo::best(const AmoDataset& data) {
    return best_regression(lower_amo_dataset(data));
}

AmoPick RegressionAmo::best_regression(const RegressionDataset& data) {
    ++calls_;
    std::vector<double> theta = fit_regressor(data, d_);
    AmoPick pick;
    pick.policy_id = -1;
    pick.policy = w_.is_all_ones()
                      ? Policy::linear_greedy(w_.length(), std::move(theta))
                      : Policy::linear_greedy(w_.length(), std::move(theta), w_.w);
    return pick;
}

}  // namespace semibandit
