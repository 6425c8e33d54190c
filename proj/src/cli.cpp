#include "semibandit/harness.hpp"
#include "semibandit/letor.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace semibandit {

namespace {

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"contextual semibandit benchmark"};
    app.require_subcommand(1);

    std::string algo, env_kind, config_path, out_dir, grid_path;
    std::uint64_t seed = 1;

    CLI::App* run = app.add_subcommand("run", "run one algorithm once");
    run->add_option("--algo", algo, "vcee|eels|egreedy|linucb|uniform");
    run->add_option("--env", env_kind, "synth|letor");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--seed", seed, "RNG seed");
    run->add_option("--out", out_dir, "output directory")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
    sweep->add_option("--grid", grid_path, "sweep config with a 'grid' object (JSON)")->required();
    sweep->add_option("--algo", algo, "vcee|eels|egreedy|linucb|uniform");
    sweep->add_option("--env", env_kind, "synth|letor");
    sweep->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            nlohmann::json config = load_config(config_path);
            if (!algo.empty()) config["algo"]["name"] = algo;
            if (!env_kind.empty()) config["env"]["kind"] = env_kind;
            write_run_outputs(out_dir, config, run_experiment(config, seed));
        } else {
            nlohmann::json config = load_config(grid_path);
            if (!algo.empty()) config["algo"]["name"] = algo;
            if (!env_kind.empty()) config["env"]["kind"] = env_kind;
            run_sweep(config, out_dir);
        }
    } catch (const LetorParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace semibandit
