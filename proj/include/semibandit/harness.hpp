#pragma once

#include "semibandit/environment.hpp"
#include "semibandit/oracle.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace semibandit {

// Bad experiment configuration (CLI exit code 2, vs 3 for dataset parse errors).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SEMIBANDIT_LOG={debug,info,warn,error}; default warn.
void log_message(int level, const std::string& msg);  // 0=debug 1=info 2=warn 3=error

struct RoundsRow {
    long t = 0;
    double reward = 0.0;
    double cum_reward = 0.0;
    double avg_reward = 0.0;
    bool explore_flag = false;
    std::string phase;
};

struct RunResult {
    std::string algo;
    std::uint64_t seed = 0;
    std::vector<RoundsRow> rows;
    double final_avg = 0.0;
    long oracle_calls = 0;
    double wall_seconds = 0.0;
};

std::unique_ptr<Environment> make_environment(const nlohmann::json& env_cfg);

// Random tabular policies over the environment's recurring contexts
// (synthetic pool or replay corpus), one independent ranking per context.
PolicyRegistry make_tabular_class(const Environment& env, int N, std::uint64_t seed);

RunResult run_experiment(const nlohmann::json& config, std::uint64_t seed);

void write_rounds_csv(const std::string& path, const std::vector<RoundsRow>& rows);
// Writes rounds.csv and summary.json under out_dir (created if needed).
void write_run_outputs(const std::string& out_dir, const nlohmann::json& config,
                       const RunResult& result);

struct SweepResult {
    std::string parameter;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    // Per value: mean over seeds of avg_reward at each round t (index t-1).
    std::vector<std::vector<double>> mean_avg_curve;

    // Parameter value with the best mean average reward at round t.
    std::size_t best_index_at(long t) const;
};

// Runs every (value, seed) pair of the grid; out_dir empty skips file output.
SweepResult run_sweep(const nlohmann::json& config, const std::string& out_dir);

// Ten (or `count`) logarithmically spaced values in [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int count);

int cli_main(int argc, char** argv);

}  // namespace semibandit
