#include "semibandit/environment.hpp"
#include "semibandit/rng.hpp"
#include "semibandit/types.hpp"

#include <doctest.h>

#include <cmath>

using namespace semibandit;

namespace {

Context plain_context(int K, int d = 1) {
    Context x;
    x.K = K;
    x.d = d;
    x.features.assign(static_cast<size_t>(K) * d, 0.0);
    return x;
}

}  // namespace

TEST_CASE("check_ranking validates length, distinctness, and masks") {
    Context x = plain_context(4);
    CHECK_NOTHROW(check_ranking(Ranking{{0, 3}}, x, 2));
    CHECK_THROWS_AS(check_ranking(Ranking{{0}}, x, 2), std::invalid_argument);
    CHECK_THROWS_AS(check_ranking(Ranking{{1, 1}}, x, 2), std::invalid_argument);
    CHECK_THROWS_AS(check_ranking(Ranking{{0, 4}}, x, 2), std::invalid_argument);
    x.valid = {1, 0, 1, 1};
    CHECK_THROWS_AS(check_ranking(Ranking{{0, 1}}, x, 2), std::invalid_argument);
    CHECK_NOTHROW(check_ranking(Ranking{{0, 2}}, x, 2));
}

TEST_CASE("top_l_by_score orders by score with lowest-index ties") {
    Context x = plain_context(5);
    CHECK(top_l_by_score({0.1, 0.9, 0.9, 0.2, 0.0}, x, 3) == Ranking{{1, 2, 3}});
    x.valid = {1, 0, 1, 1, 1};
    CHECK(top_l_by_score({0.1, 0.9, 0.9, 0.2, 0.0}, x, 2) == Ranking{{2, 3}});
}

TEST_CASE("greedy_ranking puts better actions on heavier slots") {
    Context x = plain_context(4);
    WeightVector w;
    w.w = {0.5, 1.0};  // second slot heavier
    const Ranking A = greedy_ranking({0.9, 0.1, 0.5, 0.2}, x, w);
    // best action (0) goes to the heaviest slot (index 1)
    CHECK(A == Ranking{{2, 0}});
    WeightVector ones = WeightVector::ones(2);
    CHECK(greedy_ranking({0.9, 0.1, 0.5, 0.2}, x, ones) ==
          top_l_by_score({0.9, 0.1, 0.5, 0.2}, x, 2));
    WeightVector bad;
    bad.w = {1.0, -0.2};
    CHECK_THROWS_AS(greedy_ranking({0.9, 0.1, 0.5, 0.2}, x, bad), std::invalid_argument);
}

TEST_CASE("realized_reward is the weighted slot sum plus noise") {
    RewardFeatures y;
    y.values = {0.2, 0.8, 0.5};
    WeightVector w;
    w.w = {1.0, 0.5};
    CHECK(realized_reward(Ranking{{1, 2}}, y, w, 0.1) ==
          doctest::Approx(0.8 + 0.25 + 0.1).epsilon(1e-12));
    CHECK_THROWS_AS(realized_reward(Ranking{{1}}, y, w, 0.0), std::invalid_argument);
}

TEST_CASE("tabular policy lookup with fallback") {
    std::unordered_map<std::int64_t, Ranking> table;
    table[3] = Ranking{{2, 0}};
    Policy pi = Policy::tabular(2, table, Ranking{{0, 1}});
    Context x = plain_context(4);
    x.id = 3;
    CHECK(pi.act(x) == Ranking{{2, 0}});
    x.id = 9;
    CHECK(pi.act(x) == Ranking{{0, 1}});
}

TEST_CASE("linear-greedy policy ranks by theta'phi") {
    Context x = plain_context(3, 2);
    // phi rows: (1,0), (0,1), (1,1)
    x.features = {1, 0, 0, 1, 1, 1};
    Policy pi = Policy::linear_greedy(2, {1.0, 2.0});
    CHECK(pi.act(x) == Ranking{{2, 1}});  // scores 1, 2, 3
}

TEST_CASE("rng streams are deterministic and seed-sensitive") {
    Rng a(123), b(123), c(124);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double ua = a.uniform();
        CHECK(ua == b.uniform());
        CHECK(ua >= 0.0);
        CHECK(ua < 1.0);
        if (ua != c.uniform()) differs = true;
    }
    CHECK(differs);
    Rng d(5);
    for (int i = 0; i < 1000; ++i) CHECK(d.uniform_index(7) < 7);
}

TEST_CASE("pooled synthetic contexts are reproducible") {
    EnvironmentSpec spec;
    spec.K = 5;
    spec.L = 2;
    spec.d = 3;
    spec.kind = EnvironmentKind::Logistic;
    spec.latent_score_seed = 11;
    spec.context_pool = 4;
    spec.weight = WeightVector::ones(2);
    SyntheticEnv env(spec);
    SyntheticEnv env2(spec);
    for (int i = 0; i < 4; ++i) {
        const Context a = env.pooled_context(i);
        const Context b = env2.pooled_context(i);
        CHECK(a.id == i);
        CHECK(a.features == b.features);
    }
    // draws cycle through the pool
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        RoundSample s = env.draw(rng);
        CHECK(s.context.id >= 0);
        CHECK(s.context.id < 4);
        CHECK(s.context.features == env.pooled_context(s.context.id).features);
        for (double y : s.y.values) {
            CHECK(y >= 0.0);
            CHECK(y <= 1.0);
        }
    }
}

TEST_CASE("linear synthetic environment is exactly realizable") {
    EnvironmentSpec spec;
    spec.K = 4;
    spec.L = 2;
    spec.d = 3;
    spec.kind = EnvironmentKind::Linear;
    spec.latent_score_seed = 2;
    spec.weight = WeightVector::ones(2);
    SyntheticEnv env(spec);
    const std::vector<double>& theta = env.latent_theta();
    double l1 = 0.0;
    for (double v : theta) {
        CHECK(v >= 0.0);
        l1 += v;
    }
    CHECK(l1 == doctest::Approx(1.0).epsilon(1e-12));
    Rng rng(3);
    RoundSample s = env.draw(rng);
    for (int a = 0; a < spec.K; ++a) {
        double dot = 0.0;
        const auto phi = s.context.action_features(a);
        for (int i = 0; i < spec.d; ++i) dot += phi[static_cast<size_t>(i)] * theta[static_cast<size_t>(i)];
        CHECK(s.y.values[static_cast<size_t>(a)] == doctest::Approx(dot).epsilon(1e-12));
    }
}

TEST_CASE("exact_policy_reward matches Monte Carlo on the pool") {
    EnvironmentSpec spec;
    spec.K = 4;
    spec.L = 2;
    spec.d = 2;
    spec.kind = EnvironmentKind::Logistic;
    spec.latent_score_seed = 7;
    spec.context_pool = 3;
    spec.noise_halfwidth = 0.0;
    spec.weight = WeightVector::ones(2);
    SyntheticEnv env(spec);
    std::unordered_map<std::int64_t, Ranking> table;
    for (int i = 0; i < 3; ++i) table[i] = Ranking{{i % 4, (i + 1) % 4}};
    Policy pi = Policy::tabular(2, table, Ranking{{0, 1}});
    const double exact = env.exact_policy_reward(pi, spec.weight);
    Rng rng(99);
    const double mc = expected_policy_reward(pi, env, spec.weight, 20000, rng);
    CHECK(mc == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("masked contexts keep at least L valid actions") {
    EnvironmentSpec spec;
    spec.K = 6;
    spec.L = 2;
    spec.d = 2;
    spec.kind = EnvironmentKind::Logistic;
    spec.latent_score_seed = 5;
    spec.context_pool = 10;
    spec.mask_actions = true;
    spec.weight = WeightVector::ones(2);
    SyntheticEnv env(spec);
    bool any_masked = false;
    for (int i = 0; i < 10; ++i) {
        const Context x = env.pooled_context(i);
        CHECK(x.num_valid() >= 2);
        if (x.num_valid() < 6) any_masked = true;
    }
    CHECK(any_masked);
}
