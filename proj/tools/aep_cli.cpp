// aep: runs convergence tables and property sweeps from a JSON config.
//
//   aep [classical-aep|quantum-aep|axioms|locc-check|appendix] --config cfg.json
//       [--out path] [--seed u64] [--jobs n]
//
// Exit codes: 0 pass, 1 property violation, 2 config error.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "aep/experiments.hpp"
#include "aep/parallel.hpp"

namespace {

constexpr int kConfigError = 2;

int run(const std::string &command, const std::string &config_path, const std::string &out_flag,
        std::optional<std::uint64_t> seed, int jobs) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << config_path << ": cannot open\n";
        return kConfigError;
    }
    nlohmann::json config;
    try {
        config = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return kConfigError;
    }
    aep::set_thread_count(jobs);

    std::string out_path = out_flag;
    if (out_path.empty() && config.is_object() && config.contains("out")) {
        if (!config["out"].is_string()) {
            std::cerr << config_path << ": /out: expected a file path\n";
            return kConfigError;
        }
        out_path = config["out"].get<std::string>();
    }

    aep::ExperimentOutput result;
    try {
        const auto base = std::filesystem::path(config_path).parent_path();
        result = aep::run_experiment(config, command, seed, base);
    } catch (const aep::ConfigError &e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return kConfigError;
    }

    if (out_path.empty()) {
        std::cout << result.text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << out_path << ": cannot write\n";
            return kConfigError;
        }
        out << result.text;
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"AEP experiments for multipartite entanglement measures"};
    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    app.add_option("--config", config_path, "JSON experiment config")->required();
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--jobs", jobs, "OpenMP thread count (default: runtime choice)")->check(CLI::NonNegativeNumber);

    app.fallthrough();
    std::string command;
    for (const char *name : {"classical-aep", "quantum-aep", "axioms", "locc-check", "appendix"}) {
        app.add_subcommand(name)->callback([&command, name] { command = name; });
    }
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    try {
        return run(command, config_path, out_path, seed, jobs);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}
