#pragma once

#include "semibandit/types.hpp"

#include <vector>

namespace semibandit {

struct AmoRow {
    Context context;
    std::vector<double> y;  // length K
    std::vector<double> v;  // length L
};

struct AmoDataset {
    std::vector<AmoRow> rows;
};

namespace kernels {

// Oracle objective sum_i <v_i, y_i(pi(x_i))> for every policy.
// The parallel variant distributes policies across OpenMP threads;
// per-policy accumulation order is identical to the serial variant, so the
// two agree bit for bit.
void amo_objectives_serial(const std::vector<Policy>& policies, const AmoDataset& data,
                           std::vector<double>& out);
void amo_objectives_parallel(const std::vector<Policy>& policies, const AmoDataset& data,
                             std::vector<double>& out);

// Per-sample realized reward of a fixed policy (zero noise);
// the caller reduces the buffer in index order.
void policy_rewards_serial(const Policy& pi, const std::vector<RoundSample>& samples,
                           const WeightVector& w, std::vector<double>& out);
void policy_rewards_parallel(const Policy& pi, const std::vector<RoundSample>& samples,
                             const WeightVector& w, std::vector<double>& out);

bool openmp_enabled();

}  // namespace kernels
}  // namespace semibandit
