#include "semibandit/harness.hpp"

#include "semibandit/baselines.hpp"
#include "semibandit/eels.hpp"
#include "semibandit/letor.hpp"
#include "semibandit/vcee.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace semibandit {

namespace {

int log_threshold() {
    static const int level = [] {
        const char* env = std::getenv("SEMIBANDIT_LOG");
        if (!env) return 2;
        const std::string s(env);
        if (s == "debug") return 0;
        if (s == "info") return 1;
        if (s == "warn") return 2;
        if (s == "error") return 3;
        return 2;
    }();
    return level;
}

const char* kLevelNames[] = {"debug", "info", "warn", "error"};

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

template <typename T>
T require(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing required config key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Ranking random_ranking(const Context& x, int L, Rng& rng) {
    std::vector<int> pool;
    for (int a = 0; a < x.K; ++a)
        if (x.action_valid(a)) pool.push_back(a);
    Ranking A;
    for (int l = 0; l < L; ++l) {
        const size_t j = static_cast<size_t>(l) + rng.uniform_index(pool.size() - static_cast<size_t>(l));
        std::swap(pool[static_cast<size_t>(l)], pool[j]);
        A.slots.push_back(pool[static_cast<size_t>(l)]);
    }
    return A;
}

std::vector<Context> recurring_contexts(const Environment& env) {
    if (const auto* synth = dynamic_cast<const SyntheticEnv*>(&env)) {
        const int pool = synth->spec().context_pool;
        if (pool < 1)
            throw ConfigError("tabular policy classes need env.context_pool >= 1");
        std::vector<Context> out;
        for (int i = 0; i < pool; ++i) out.push_back(synth->pooled_context(i));
        return out;
    }
    if (const auto* replay = dynamic_cast<const ReplayEnv*>(&env)) {
        std::vector<Context> out;
        for (std::size_t i = 0; i < replay->num_contexts(); ++i)
            out.push_back(replay->context_at(i));
        return out;
    }
    throw ConfigError("environment does not expose a recurring context set");
}

}  // namespace

void log_message(int level, const std::string& msg) {
    if (level < log_threshold()) return;
    std::cerr << "[semibandit:" << kLevelNames[level] << "] " << msg << "\n";
}

std::unique_ptr<Environment> make_environment(const nlohmann::json& env_cfg) {
    const std::string kind = require<std::string>(env_cfg, "kind");
    const int K = require<int>(env_cfg, "K");
    const int L = require<int>(env_cfg, "L");
    if (kind == "synth") {
        EnvironmentSpec spec;
        spec.K = K;
        spec.L = L;
        spec.d = get_or<int>(env_cfg, "d", 5);
        const std::string reward = get_or<std::string>(env_cfg, "reward", "logistic");
        if (reward == "logistic")
            spec.kind = EnvironmentKind::Logistic;
        else if (reward == "linear")
            spec.kind = EnvironmentKind::Linear;
        else
            throw ConfigError("env.reward must be 'logistic' or 'linear'");
        spec.noise_halfwidth = get_or<double>(env_cfg, "noise", 0.0);
        spec.latent_score_seed = get_or<std::uint64_t>(env_cfg, "latent_seed", 1);
        spec.context_pool = get_or<int>(env_cfg, "context_pool", 0);
        spec.mask_actions = get_or<bool>(env_cfg, "mask_actions", false);
        if (env_cfg.contains("weight")) {
            spec.weight.w = require<std::vector<double>>(env_cfg, "weight");
            if (spec.weight.length() != L) throw ConfigError("env.weight must have length L");
        } else {
            spec.weight = WeightVector::ones(L);
        }
        try {
            return std::make_unique<SyntheticEnv>(spec);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (kind == "letor") {
        const std::string path = require<std::string>(env_cfg, "path");
        ReplayBuild build = build_replay_env(parse_letor_file(path), K, L);
        if (build.contexts.empty())
            throw ConfigError("no query in " + path + " has at least K documents");
        if (build.dropped_queries > 0)
            log_message(1, "dropped " + std::to_string(build.dropped_queries) +
                               " queries with fewer than K documents");
        const bool shuffle = get_or<bool>(env_cfg, "shuffle", false);
        const std::uint64_t shuffle_seed = get_or<std::uint64_t>(env_cfg, "shuffle_seed", 0);
        return std::make_unique<ReplayEnv>(build.spec, std::move(build.contexts),
                                           std::move(build.rewards), shuffle, shuffle_seed);
    }
    throw ConfigError("env.kind must be 'synth' or 'letor'");
}

PolicyRegistry make_tabular_class(const Environment& env, int N, std::uint64_t seed) {
    if (N < 1) throw ConfigError("policy_class.N must be >= 1");
    const std::vector<Context> contexts = recurring_contexts(env);
    const int L = env.spec().L;
    Rng rng(seed);
    PolicyRegistry registry;
    for (int i = 0; i < N; ++i) {
        std::unordered_map<std::int64_t, Ranking> table;
        for (const Context& x : contexts) table[x.id] = random_ranking(x, L, rng);
        Ranking fallback;
        for (int l = 0; l < L; ++l) fallback.slots.push_back(l);
        registry.add(Policy::tabular(L, std::move(table), fallback));
    }
    return registry;
}

RunResult run_experiment(const nlohmann::json& config, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const long T = require<long>(config, "T");
    if (T < 1) throw ConfigError("T must be >= 1");
    if (!config.contains("env")) throw ConfigError("missing required config key 'env'");
    if (!config.contains("algo")) throw ConfigError("missing required config key 'algo'");
    const nlohmann::json& algo_cfg = config.at("algo");
    const std::string algo = require<std::string>(algo_cfg, "name");

    std::unique_ptr<Environment> env = make_environment(config.at("env"));
    const EnvironmentSpec& spec = env->spec();
    const WeightVector& w = spec.weight;
    Rng rng(seed);

    RunResult result;
    result.algo = algo;
    result.seed = seed;
    result.rows.reserve(static_cast<size_t>(T));

    double cum = 0.0;
    auto push_row = [&](long t, double reward, bool explored, const std::string& phase) {
        cum += reward;
        RoundsRow row;
        row.t = t;
        row.reward = reward;
        row.cum_reward = cum;
        row.avg_reward = cum / static_cast<double>(t);
        row.explore_flag = explored;
        row.phase = phase;
        result.rows.push_back(std::move(row));
    };

    const bool needs_class = algo == "vcee" || algo == "egreedy" || algo == "eels";
    PolicyRegistry registry;
    std::unique_ptr<ExactAmo> amo;
    if (needs_class) {
        const nlohmann::json& pc = config.contains("policy_class") ? config.at("policy_class")
                                                                   : nlohmann::json::object();
        registry = make_tabular_class(*env, get_or<int>(pc, "N", 100),
                                      get_or<std::uint64_t>(pc, "seed", 20177));
        amo = std::make_unique<ExactAmo>(registry);
    }

    const double delta = get_or<double>(algo_cfg, "delta", 0.05);
    if (algo == "uniform") {
        UniformBaseline uniform(spec.K, spec.L);
        for (long t = 1; t <= T; ++t) {
            auto r = uniform.step(env->draw(rng), w, rng);
            push_row(t, r.reward, true, "uniform");
        }
    } else if (algo == "linucb") {
        LinUcbConfig cfg;
        cfg.alpha = get_or<double>(algo_cfg, "alpha", 1.0);
        cfg.update_period = get_or<int>(algo_cfg, "update_period", 100);
        LinUcb linucb(spec.d, spec.L, cfg);
        if (!w.is_all_ones())
            throw ConfigError("linucb supports only all-ones slot weights");
        for (long t = 1; t <= T; ++t) {
            auto r = linucb.step(env->draw(rng), w);
            push_row(t, r.reward, false, "linucb");
        }
    } else if (algo == "egreedy") {
        EpsGreedyConfig cfg;
        const std::string mode = get_or<std::string>(algo_cfg, "mode", "mixed");
        if (mode == "mixed") {
            cfg.mode = EpsGreedyConfig::Mode::Mixed;
            cfg.epsilon = get_or<double>(algo_cfg, "epsilon", 0.1);
        } else if (mode == "explore-first") {
            cfg.mode = EpsGreedyConfig::Mode::ExploreFirst;
            cfg.n = get_or<long>(algo_cfg, "n", 0);
            if (cfg.n == 0)
                cfg.n = egreedy_n(T, spec.K, spec.L,
                                  static_cast<std::size_t>(registry.size()), delta);
        } else {
            throw ConfigError("egreedy mode must be 'mixed' or 'explore-first'");
        }
        try {
            EpsGreedy greedy(registry, *amo, cfg, w, spec.K, spec.L);
            for (long t = 1; t <= T; ++t) {
                auto r = greedy.step(env->draw(rng), rng);
                push_row(t, r.reward, r.explored, r.explored ? "explore" : "exploit");
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (algo == "vcee") {
        VceeConfig cfg;
        cfg.psi = get_or<double>(algo_cfg, "psi", 1.0);
        cfg.delta = delta;
        cfg.experimental_mu = get_or<bool>(algo_cfg, "experimental_mu", true);
        cfg.mu_c = get_or<double>(algo_cfg, "mu_c", 0.008);
        cfg.horizon = T;
        cfg.solve_every_round = get_or<bool>(algo_cfg, "solve_every_round", false);
        try {
            VceeRunner runner(registry, *amo, cfg, w, spec.K, spec.L);
            for (long t = 1; t <= T; ++t) {
                auto r = runner.step(env->draw(rng), rng);
                push_row(t, r.reward, r.explored, "vcee");
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (algo == "eels") {
        EelsConfig cfg;
        cfg.T = T;
        cfg.K = spec.K;
        cfg.L = spec.L;
        cfg.N = get_or<std::size_t>(algo_cfg, "N", static_cast<std::size_t>(registry.size()));
        cfg.delta = delta;
        cfg.B = get_or<double>(algo_cfg, "B", 1.0);
        if (algo_cfg.contains("lambda_star_override"))
            cfg.lambda_star_override = require<double>(algo_cfg, "lambda_star_override");
        try {
            EelsResult eels = eels_run(cfg, *env, *amo, rng);
            for (const EelsTraceRow& row : eels.trace)
                push_row(row.t, row.reward, row.explored, row.phase);
            if (eels.exploration_exhausted)
                log_message(2, "eels: eigenvalue gate never opened before the horizon");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else {
        throw ConfigError("unknown algorithm '" + algo + "'");
    }

    result.final_avg = result.rows.empty() ? 0.0 : result.rows.back().avg_reward;
    result.oracle_calls = amo ? amo->calls() : 0;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log_message(1, algo + " seed " + std::to_string(seed) + ": final avg reward " +
                       format_double(result.final_avg));
    return result;
}

void write_rounds_csv(const std::string& path, const std::vector<RoundsRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,reward,cum_reward,avg_reward,explore_flag,phase\n";
    for (const RoundsRow& row : rows) {
        out << row.t << ',' << format_double(row.reward) << ',' << format_double(row.cum_reward)
            << ',' << format_double(row.avg_reward) << ',' << (row.explore_flag ? 1 : 0) << ','
            << row.phase << '\n';
    }
}

void write_run_outputs(const std::string& out_dir, const nlohmann::json& config,
                       const RunResult& result) {
    std::filesystem::create_directories(out_dir);
    write_rounds_csv(out_dir + "/rounds.csv", result.rows);
    nlohmann::json summary;
    summary["algo"] = result.algo;
    summary["seed"] = result.seed;
    summary["rounds"] = result.rows.size();
    summary["final_avg_reward"] = result.final_avg;
    summary["oracle_calls"] = result.oracle_calls;
    summary["wall_time_sec"] = result.wall_seconds;
    summary["config"] = config;
    std::ofstream out(out_dir + "/summary.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_dir + "/summary.json");
    out << summary.dump(2) << "\n";
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw ConfigError("log grid needs 0 < min < max and count >= 2");
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return out;
}

std::size_t SweepResult::best_index_at(long t) const {
    std::size_t best = 0;
    for (std::size_t v = 1; v < mean_avg_curve.size(); ++v)
        if (mean_avg_curve[v][static_cast<size_t>(t - 1)] >
            mean_avg_curve[best][static_cast<size_t>(t - 1)])
            best = v;
    return best;
}

SweepResult run_sweep(const nlohmann::json& config, const std::string& out_dir) {
    if (!config.contains("grid")) throw ConfigError("missing required config key 'grid'");
    const nlohmann::json& grid = config.at("grid");
    SweepResult sweep;
    sweep.parameter = require<std::string>(grid, "parameter");
    if (grid.contains("values")) {
        sweep.values = require<std::vector<double>>(grid, "values");
        if (sweep.values.empty()) throw ConfigError("grid.values is empty");
    } else {
        sweep.values = log_spaced(require<double>(grid, "min"), require<double>(grid, "max"),
                                  get_or<int>(grid, "count", 10));
    }
    sweep.seeds = get_or<std::vector<std::uint64_t>>(
        config, "seeds", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    const long T = require<long>(config, "T");

    for (std::size_t v = 0; v < sweep.values.size(); ++v) {
        std::vector<double> mean(static_cast<size_t>(T), 0.0);
        for (std::uint64_t seed : sweep.seeds) {
            nlohmann::json run_cfg = config;
            run_cfg.erase("grid");
            run_cfg.erase("seeds");
            run_cfg["algo"][sweep.parameter] = sweep.values[v];
            RunResult result = run_experiment(run_cfg, seed);
            if (static_cast<long>(result.rows.size()) != T)
                throw std::logic_error("run produced the wrong number of rounds");
            for (long t = 0; t < T; ++t)
                mean[static_cast<size_t>(t)] += result.rows[static_cast<size_t>(t)].avg_reward;
            if (!out_dir.empty()) {
                const std::string dir = out_dir + "/" + sweep.parameter + "_" +
                                        std::to_string(v) + "/seed_" + std::to_string(seed);
                write_run_outputs(dir, run_cfg, result);
            }
        }
        for (double& m : mean) m /= static_cast<double>(sweep.seeds.size());
        sweep.mean_avg_curve.push_back(std::move(mean));
        log_message(1, sweep.parameter + "=" + format_double(sweep.values[v]) +
                           ": mean final avg reward " +
                           format_double(sweep.mean_avg_curve.back().back()));
    }

    if (!out_dir.empty()) {
        nlohmann::json summary;
        summary["parameter"] = sweep.parameter;
        summary["values"] = sweep.values;
        summary["seeds"] = sweep.seeds;
        const std::size_t best = sweep.best_index_at(T);
        summary["best_value_at_T"] = sweep.values[best];
        nlohmann::json finals = nlohmann::json::array();
        for (const auto& curve : sweep.mean_avg_curve) finals.push_back(curve.back());
        summary["mean_final_avg_reward"] = finals;
        std::ofstream out(out_dir + "/sweep_summary.json", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/sweep_summary.json");
        out << summary.dump(2) << "\n";
    }
    return sweep;
}

}  // namespace semibandit
