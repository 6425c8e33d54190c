// Serial vs. OpenMP kernel comparison: oracle objective evaluation across a
// policy class, and Monte Carlo policy-reward evaluation.
#include "semibandit/environment.hpp"
#include "semibandit/kernels.hpp"
#include "semibandit/rng.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace semibandit;

namespace {

struct Fixture {
    std::vector<Policy> policies;
    AmoDataset dataset;
    std::vector<RoundSample> samples;

    Fixture(int n_policies, int n_rows, int K, int L) {
        EnvironmentSpec spec;
        spec.K = K;
        spec.L = L;
        spec.d = 8;
        spec.kind = EnvironmentKind::Logistic;
        spec.latent_score_seed = 9;
        spec.context_pool = 50;
        spec.weight = WeightVector::ones(L);
        SyntheticEnv env(spec);
        Rng rng(1);
        for (int i = 0; i < n_rows; ++i) {
            RoundSample s = env.draw(rng);
            AmoRow row;
            row.context = s.context;
            row.y = s.y.values;
            row.v.assign(static_cast<size_t>(L), 1.0);
            dataset.rows.push_back(row);
            samples.push_back(std::move(s));
        }
        for (int p = 0; p < n_policies; ++p) {
            std::unordered_map<std::int64_t, Ranking> table;
            for (int c = 0; c < spec.context_pool; ++c) {
                std::vector<int> actions;
                for (int a = 0; a < K; ++a) actions.push_back(a);
                Ranking A;
                for (int l = 0; l < L; ++l) {
                    const size_t j = static_cast<size_t>(l) +
                                     rng.uniform_index(actions.size() - static_cast<size_t>(l));
                    std::swap(actions[static_cast<size_t>(l)], actions[j]);
                    A.slots.push_back(actions[static_cast<size_t>(l)]);
                }
                table[c] = A;
            }
            policies.push_back(Policy::tabular(L, std::move(table), Ranking{{0, 1}}));
        }
    }
};

const Fixture& fixture() {
    static Fixture f(200, 2000, 10, 3);
    return f;
}

void bm_amo_objectives_serial(benchmark::State& state) {
    const Fixture& f = fixture();
    std::vector<double> out;
    for (auto _ : state) {
        kernels::amo_objectives_serial(f.policies, f.dataset, out);
        benchmark::DoNotOptimize(out);
    }
}

void bm_amo_objectives_parallel(benchmark::State& state) {
    const Fixture& f = fixture();
    std::vector<double> out;
    for (auto _ : state) {
        kernels::amo_objectives_parallel(f.policies, f.dataset, out);
        benchmark::DoNotOptimize(out);
    }
}

void bm_policy_rewards_serial(benchmark::State& state) {
    const Fixture& f = fixture();
    const WeightVector w = WeightVector::ones(3);
    std::vector<double> out;
    for (auto _ : state) {
        kernels::policy_rewards_serial(f.policies[0], f.samples, w, out);
        benchmark::DoNotOptimize(out);
    }
}

void bm_policy_rewards_parallel(benchmark::State& state) {
    const Fixture& f = fixture();
    const WeightVector w = WeightVector::ones(3);
    std::vector<double> out;
    for (auto _ : state) {
        kernels::policy_rewards_parallel(f.policies[0], f.samples, w, out);
        benchmark::DoNotOptimize(out);
    }
}

BENCHMARK(bm_amo_objectives_serial);
BENCHMARK(bm_amo_objectives_parallel);
BENCHMARK(bm_policy_rewards_serial);
BENCHMARK(bm_policy_rewards_parallel);

}  // namespace

BENCHMARK_MAIN();
