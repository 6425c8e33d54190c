#include "semibandit/environment.hpp"
#include "semibandit/kernels.hpp"
#include "semibandit/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace semibandit;

namespace {

Context random_context(std::int64_t id, int K, int d, Rng& rng) {
    Context x;
    x.id = id;
    x.K = K;
    x.d = d;
    x.features.resize(static_cast<size_t>(K) * d);
    for (double& f : x.features) f = rng.uniform();
    return x;
}

PolicyRegistry random_tabular_class(int N, int num_contexts, int K, int L, Rng& rng) {
    PolicyRegistry registry;
    for (int p = 0; p < N; ++p) {
        std::unordered_map<std::int64_t, Ranking> table;
        for (int c = 0; c < num_contexts; ++c) {
            std::vector<int> pool;
            for (int a = 0; a < K; ++a) pool.push_back(a);
            Ranking A;
            for (int l = 0; l < L; ++l) {
                const size_t j =
                    static_cast<size_t>(l) + rng.uniform_index(pool.size() - static_cast<size_t>(l));
                std::swap(pool[static_cast<size_t>(l)], pool[j]);
                A.slots.push_back(pool[static_cast<size_t>(l)]);
            }
            table[c] = A;
        }
        registry.add(Policy::tabular(L, std::move(table), Ranking{{0, 1}}));
    }
    return registry;
}

AmoDataset random_dataset(int rows, int K, int L, int num_contexts, Rng& rng) {
    AmoDataset data;
    for (int i = 0; i < rows; ++i) {
        AmoRow row;
        row.context = random_context(static_cast<std::int64_t>(rng.uniform_index(
                                         static_cast<std::uint64_t>(num_contexts))),
                                     K, 1, rng);
        for (int a = 0; a < K; ++a) row.y.push_back(rng.uniform(-1.0, 2.0));
        for (int l = 0; l < L; ++l) row.v.push_back(rng.uniform());
        data.rows.push_back(std::move(row));
    }
    return data;
}

}  // namespace

TEST_CASE("parallel kernels agree bitwise with serial") {
    Rng rng(31);
    PolicyRegistry registry = random_tabular_class(40, 6, 5, 2, rng);
    AmoDataset data = random_dataset(200, 5, 2, 6, rng);
    std::vector<double> serial, parallel;
    kernels::amo_objectives_serial(registry.all(), data, serial);
    kernels::amo_objectives_parallel(registry.all(), data, parallel);
    REQUIRE(serial.size() == parallel.size());
    for (size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);

    std::vector<RoundSample> samples;
    for (int i = 0; i < 300; ++i) {
        RoundSample s;
        s.context = random_context(i % 6, 5, 1, rng);
        for (int a = 0; a < 5; ++a) s.y.values.push_back(rng.uniform());
        samples.push_back(std::move(s));
    }
    WeightVector w;
    w.w = {1.0, 0.5};
    std::vector<double> rs, rp;
    kernels::policy_rewards_serial(registry[0], samples, w, rs);
    kernels::policy_rewards_parallel(registry[0], samples, w, rp);
    REQUIRE(rs.size() == rp.size());
    for (size_t i = 0; i < rs.size(); ++i) CHECK(rs[i] == rp[i]);
}

TEST_CASE("exact enumeration oracle matches brute force") {
    Rng rng(17);
    PolicyRegistry registry = random_tabular_class(25, 4, 5, 2, rng);
    ExactAmo amo(registry);
    for (int trial = 0; trial < 10; ++trial) {
        AmoDataset data = random_dataset(30, 5, 2, 4, rng);
        const AmoPick pick = amo.best(data);
        REQUIRE(pick.policy_id >= 0);
        std::vector<double> objectives;
        kernels::amo_objectives_serial(registry.all(), data, objectives);
        int best = 0;
        for (int p = 1; p < registry.size(); ++p)
            if (objectives[static_cast<size_t>(p)] > objectives[static_cast<size_t>(best)])
                best = p;
        CHECK(pick.policy_id == best);
    }
    CHECK(amo.calls() == 10);
}

TEST_CASE("exact oracle breaks ties toward the lowest policy id") {
    PolicyRegistry registry;
    // two identical policies
    for (int i = 0; i < 2; ++i)
        registry.add(Policy::tabular(2, {}, Ranking{{0, 1}}));
    ExactAmo amo(registry);
    AmoDataset data;
    AmoRow row;
    row.context.K = 3;
    row.context.d = 1;
    row.context.features = {0, 0, 0};
    row.y = {1.0, 0.5, 0.0};
    row.v = {1.0, 1.0};
    data.rows.push_back(row);
    CHECK(amo.best(data).policy_id == 0);
}

TEST_CASE("weighted least-squares regression recovers a linear target") {
    Rng rng(8);
    const int d = 3;
    const std::vector<double> theta = {0.4, -0.2, 0.7};
    RegressionDataset data;
    for (int i = 0; i < 50; ++i) {
        RegressionRow row;
        row.context = random_context(i, 4, d, rng);
        for (int a = 0; a < 4; ++a) {
            double target = 0.0;
            const auto phi = row.context.action_features(a);
            for (int k = 0; k < d; ++k) target += phi[static_cast<size_t>(k)] * theta[static_cast<size_t>(k)];
            row.actions.push_back(a);
            row.targets.push_back(target);
            row.weights.push_back(0.5 + rng.uniform());
        }
        data.rows.push_back(std::move(row));
    }
    const std::vector<double> fit = fit_regressor(data, d);
    for (int k = 0; k < d; ++k)
        CHECK(fit[static_cast<size_t>(k)] == doctest::Approx(theta[static_cast<size_t>(k)]).epsilon(1e-8));
}

TEST_CASE("regression oracle returns the greedy policy of the fit") {
    Rng rng(9);
    const int d = 2, K = 5, L = 2;
    const std::vector<double> theta = {1.0, 0.5};
    AmoDataset data;
    for (int i = 0; i < 40; ++i) {
        AmoRow row;
        row.context = random_context(i, K, d, rng);
        for (int a = 0; a < K; ++a) {
            double y = 0.0;
            const auto phi = row.context.action_features(a);
            for (int k = 0; k < d; ++k) y += phi[static_cast<size_t>(k)] * theta[static_cast<size_t>(k)];
            row.y.push_back(y);
        }
        row.v = {1.0, 1.0};
        data.rows.push_back(std::move(row));
    }
    RegressionAmo amo(d, WeightVector::ones(L));
    const AmoPick pick = amo.best(data);
    CHECK(pick.policy_id == -1);
    // On fresh contexts the synthesized policy must match the true greedy rule.
    for (int i = 0; i < 10; ++i) {
        Context x = random_context(1000 + i, K, d, rng);
        std::vector<double> scores(static_cast<size_t>(K), 0.0);
        for (int a = 0; a < K; ++a) {
            const auto phi = x.action_features(a);
            for (int k = 0; k < d; ++k)
                scores[static_cast<size_t>(a)] += phi[static_cast<size_t>(k)] * theta[static_cast<size_t>(k)];
        }
        CHECK(pick.policy.act(x) == top_l_by_score(scores, x, L));
    }
}
