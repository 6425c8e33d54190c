#include "semibandit/harness.hpp"

#include "semibandit/kernels.hpp"
#include "semibandit/letor.hpp"
#include "semibandit/oracle.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace semibandit;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("dataset line grammar") {
    const LetorRecord r = parse_letor_line("2 qid:10 1:0.5 3:-1 # docA");
    CHECK(r.relevance == 2);
    CHECK(r.query_id == "10");
    CHECK(r.features.size() == 2);
    CHECK(r.features.at(1) == doctest::Approx(0.5));
    CHECK(r.features.at(3) == doctest::Approx(-1.0));
    REQUIRE(r.comment.has_value());
    CHECK(*r.comment == "docA");

    const LetorRecord bare = parse_letor_line("0 qid:q");
    CHECK(bare.relevance == 0);
    CHECK(bare.query_id == "q");
    CHECK(bare.features.empty());
    CHECK_FALSE(bare.comment.has_value());

    // duplicates: the last occurrence wins
    const LetorRecord dup = parse_letor_line("1 qid:a 2:1.0 2:3.0");
    CHECK(dup.features.size() == 1);
    CHECK(dup.features.at(2) == doctest::Approx(3.0));
}

TEST_CASE("dataset line errors carry 1-based token columns") {
    try {
        parse_letor_line("x qid:1 1:0.5");
        FAIL("expected a parse error");
    } catch (const LetorParseError& e) {
        CHECK(e.column == 1);
        CHECK(e.line == 0);
    }
    try {
        parse_letor_line("1 qid:1 1:abc");
        FAIL("expected a parse error");
    } catch (const LetorParseError& e) {
        CHECK(e.column == 11);  // points at the value part of the pair
    }
    CHECK_THROWS_AS(parse_letor_line(""), LetorParseError);
    CHECK_THROWS_AS(parse_letor_line("1 1:0.5"), LetorParseError);  // missing qid
}

TEST_CASE("serialize/parse round-trip") {
    Rng rng(404);
    std::vector<LetorRecord> originals;
    std::string body;
    for (int i = 0; i < 50; ++i) {
        LetorRecord r;
        r.relevance = static_cast<int>(rng.uniform_index(5));
        r.query_id = "q" + std::to_string(rng.uniform_index(7));
        const int nf = 1 + static_cast<int>(rng.uniform_index(6));
        for (int f = 0; f < nf; ++f)
            r.features[1 + static_cast<int>(rng.uniform_index(10))] =
                rng.uniform() * 2.0 - 1.0;
        if (rng.uniform() < 0.3) r.comment = "doc " + std::to_string(i);
        originals.push_back(r);
        body += serialize_letor(r) + "\n";
    }
    const std::string path = temp_path("semibandit_roundtrip.txt");
    write_file(path, body);
    const std::vector<LetorRecord> parsed = parse_letor_file(path);
    REQUIRE(parsed.size() == originals.size());
    for (size_t i = 0; i < parsed.size(); ++i) CHECK(parsed[i] == originals[i]);
    std::remove(path.c_str());
}

TEST_CASE("file parsing reports line numbers and skips blanks") {
    const std::string path = temp_path("semibandit_badfile.txt");
    write_file(path, "1 qid:a 1:0.5\n\n2 qid:b 1:oops\n");
    try {
        parse_letor_file(path);
        FAIL("expected a parse error");
    } catch (const LetorParseError& e) {
        CHECK(e.line == 3);
        CHECK(e.column == 11);  // points at the value part of the pair
        // position is prefixed exactly once
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    write_file(path, "1 qid:a 1:0.5\r\n\r\n0 qid:a 2:1\n");
    const auto recs = parse_letor_file(path);
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].features.at(2) == doctest::Approx(1.0));
    std::remove(path.c_str());
}

TEST_CASE("replay construction from parsed records") {
    std::vector<LetorRecord> records;
    auto add = [&](int rel, const std::string& q, double f1, double f3) {
        LetorRecord r;
        r.relevance = rel;
        r.query_id = q;
        r.features[1] = f1;
        r.features[3] = f3;
        records.push_back(r);
    };
    // query A: 3 docs, query B: 2 docs (dropped for K=3), query C: 4 docs
    add(4, "A", 0.1, 0.2);
    add(0, "A", 0.3, 0.4);
    add(2, "A", 0.5, 0.6);
    add(1, "B", 0.7, 0.8);
    add(3, "B", 0.9, 1.0);
    add(1, "C", 0.0, 0.1);
    add(2, "C", 0.2, 0.3);
    add(3, "C", 0.4, 0.5);
    add(4, "C", 0.6, 0.7);

    const ReplayBuild build = build_replay_env(records, 3, 2);
    CHECK(build.dropped_queries == 1);
    REQUIRE(build.contexts.size() == 2);  // A and C, in first-appearance order
    CHECK(build.spec.K == 3);
    CHECK(build.spec.L == 2);
    CHECK(build.spec.d == 3);  // max feature index

    const Context& a = build.contexts[0];
    CHECK(a.K == 3);
    CHECK(a.action_features(0)[0] == doctest::Approx(0.1));
    CHECK(a.action_features(0)[1] == doctest::Approx(0.0));  // sparse gap
    CHECK(a.action_features(0)[2] == doctest::Approx(0.2));
    CHECK(a.action_features(2)[0] == doctest::Approx(0.5));

    // y = relevance / 4; query C keeps only its first K documents
    CHECK(build.rewards[0].values[0] == doctest::Approx(1.0));
    CHECK(build.rewards[0].values[1] == doctest::Approx(0.0));
    CHECK(build.rewards[0].values[2] == doctest::Approx(0.5));
    CHECK(build.rewards[1].values == std::vector<double>{0.25, 0.5, 0.75});

    // best fixed ranking per context matches exhaustive search under replay
    ReplayEnv env(build.spec, build.contexts, build.rewards, false, 0);
    CHECK(env.num_contexts() == 2);
    for (size_t c = 0; c < env.num_contexts(); ++c) {
        const RewardFeatures& y = env.rewards_at(c);
        double best = -1.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                best = std::max(best, y.values[static_cast<size_t>(i)] +
                                          y.values[static_cast<size_t>(j)]);
            }
        const Ranking greedy = greedy_ranking(y.values, env.context_at(c),
                                              WeightVector::ones(2));
        CHECK(realized_reward(greedy, y, WeightVector::ones(2), 0.0) ==
              doctest::Approx(best));
    }
}

TEST_CASE("experiment runs are deterministic and internally consistent") {
    json config = {
        {"T", 120},
        {"env",
         {{"kind", "synth"}, {"K", 4}, {"L", 2}, {"reward", "logistic"},
          {"noise", 0.05}, {"context_pool", 6}}},
        {"algo", {{"name", "egreedy"}, {"epsilon", 0.2}}},
        {"policy_class", {{"N", 20}, {"seed", 11}}},
    };
    const RunResult a = run_experiment(config, 42);
    const RunResult b = run_experiment(config, 42);
    REQUIRE(a.rows.size() == 120);
    REQUIRE(b.rows.size() == 120);

    double cum = 0.0;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const RoundsRow& row = a.rows[i];
        CHECK(row.t == static_cast<long>(i) + 1);
        cum += row.reward;
        CHECK(row.cum_reward == doctest::Approx(cum).epsilon(1e-12));
        CHECK(row.avg_reward == doctest::Approx(cum / row.t).epsilon(1e-12));
    }
    CHECK(a.final_avg == b.final_avg);

    const std::string d1 = temp_path("semibandit_run1");
    const std::string d2 = temp_path("semibandit_run2");
    write_run_outputs(d1, config, a);
    write_run_outputs(d2, config, b);
    CHECK(read_file(d1 + "/rounds.csv") == read_file(d2 + "/rounds.csv"));
    CHECK_FALSE(read_file(d1 + "/rounds.csv").empty());
    const json summary = json::parse(read_file(d1 + "/summary.json"));
    CHECK(summary.at("seed") == 42);
    CHECK(summary.at("rounds") == 120);
    CHECK(summary.at("final_avg_reward") == a.final_avg);
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);

    // a different seed changes the realized trajectory
    const RunResult c = run_experiment(config, 43);
    CHECK(c.final_avg != a.final_avg);
}

TEST_CASE("bad configurations raise ConfigError") {
    CHECK_THROWS_AS(run_experiment(json{{"env", {{"kind", "synth"}}}}, 1), ConfigError);
    CHECK_THROWS_AS(
        run_experiment(json{{"T", 10},
                            {"env", {{"kind", "nope"}}},
                            {"algo", {{"name", "uniform"}}}},
                       1),
        ConfigError);
    CHECK_THROWS_AS(
        run_experiment(json{{"T", 10},
                            {"env", {{"kind", "synth"}, {"K", 4}, {"L", 2}}},
                            {"algo", {{"name", "unknown-algo"}}}},
                       1),
        ConfigError);
}

TEST_CASE("sweep aggregates mean curves per grid value") {
    json config = {
        {"T", 40},
        {"env",
         {{"kind", "synth"}, {"K", 3}, {"L", 2}, {"reward", "logistic"},
          {"context_pool", 4}}},
        {"algo", {{"name", "egreedy"}}},
        {"policy_class", {{"N", 10}, {"seed", 5}}},
        {"grid", {{"parameter", "epsilon"}, {"values", {0.1, 0.5}}}},
        {"seeds", {1, 2, 3}},
    };
    const SweepResult sweep = run_sweep(config, "");
    CHECK(sweep.parameter == "epsilon");
    REQUIRE(sweep.values.size() == 2);
    REQUIRE(sweep.seeds.size() == 3);
    REQUIRE(sweep.mean_avg_curve.size() == 2);
    REQUIRE(sweep.mean_avg_curve[0].size() == 40);

    // cross-check one cell against a direct run average
    json run_cfg = config;
    run_cfg.erase("grid");
    run_cfg["algo"]["epsilon"] = 0.5;
    double mean = 0.0;
    for (std::uint64_t s : {1, 2, 3}) mean += run_experiment(run_cfg, s).rows[39].avg_reward;
    mean /= 3.0;
    CHECK(sweep.mean_avg_curve[1][39] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(sweep.best_index_at(40) < 2);
}

TEST_CASE("log-spaced grids") {
    const std::vector<double> g = log_spaced(0.01, 1.0, 3);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == doctest::Approx(0.01));
    CHECK(g[1] == doctest::Approx(0.1));
    CHECK(g[2] == doctest::Approx(1.0));
}
