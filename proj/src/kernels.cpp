#include "semibandit/kernels.hpp"

#include "semibandit/environment.hpp"

namespace semibandit::kernels {

namespace {

double objective_for(const Policy& pi, const AmoDataset& data) {
    double total = 0.0;
    for (const AmoRow& row : data.rows) {
        const Ranking A = pi.act(row.context);
        for (int l = 0; l < A.length(); ++l) total += row.v[l] * row.y[A.slots[l]];
    }
    return total;
}

}  // namespace

void amo_objectives_serial(const std::vector<Policy>& policies, const AmoDataset& data,
                           std::vector<double>& out) {
    out.resize(policies.size());
    for (std::size_t p = 0; p < policies.size(); ++p) out[p] = objective_for(policies[p], data);
}

void amo_objectives_parallel(const std::vector<Policy>& policies, const AmoDataset& data,
                             std::vector<double>& out) {
    out.resize(policies.size());
    const long n = static_cast<long>(policies.size());
#pragma omp parallel for schedule(static)
    for (long p = 0; p < n; ++p) out[p] = objective_for(policies[p], data);
}

void policy_rewards_serial(const Policy& pi, const std::vector<RoundSample>& samples,
                           const WeightVector& w, std::vector<double>& out) {
    out.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        out[i] = realized_reward(pi.act(samples[i].context), samples[i].y, w, 0.0);
}

void policy_rewards_parallel(const Policy& pi, const std::vector<RoundSample>& samples,
                             const WeightVector& w, std::vector<double>& out) {
    out.resize(samples.size());
    const long n = static_cast<long>(samples.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        out[i] = realized_reward(pi.act(samples[i].context), samples[i].y, w, 0.0);
}

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

}  // namespace semibandit::kernels
