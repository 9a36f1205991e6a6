#pragma once

// Experiment drivers shared by the command-line tool and the acceptance suite.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aep/measures.hpp"
#include "aep/parallel.hpp"
#include "aep/tensor_core.hpp"

namespace aep {

/// Invalid experiment configuration; the message names the offending JSON path.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Randomized property sweeps

struct SweepSettings {
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    std::size_t parties = 3;
    std::size_t min_dim = 2;
    std::size_t max_dim = 3;
    /// Fixed measure; when empty every sample draws a random theta (alpha = 1).
    std::optional<MeasureSpec> measure;
    Exec exec = Exec::parallel;
};

struct PropertyResult {
    std::string property;   ///< stable identifier
    std::string statement;  ///< the inequality or identity being checked
    SweepStats stats;       ///< worst = minimum slack over samples
    double tolerance = 0.0; ///< a sample fails when slack < -tolerance
    [[nodiscard]] bool passed() const { return stats.samples > 0 && stats.passed(); }
};

nlohmann::json to_json(const PropertyResult &r);

PropertyResult sweep_ghz_normalization(const SweepSettings &s);
PropertyResult sweep_full_additivity(const SweepSettings &s);
PropertyResult sweep_direct_sum_identity(const SweepSettings &s);
PropertyResult sweep_log_boundedness(const SweepSettings &s);
PropertyResult sweep_continuity_bound(const SweepSettings &s);

struct LoccSettings {
    SweepSettings base;
    std::size_t max_steps = 3;
    std::size_t max_branches = 3;
};

PropertyResult sweep_monotone_on_average(const LoccSettings &s);
PropertyResult sweep_weak_monotonicity(const LoccSettings &s);
PropertyResult sweep_weight_conservation(const LoccSettings &s);

PropertyResult sweep_cond_pure_tv(const SweepSettings &s);
PropertyResult sweep_cond_pure_branch(const SweepSettings &s);
PropertyResult sweep_outcome_mass(const LoccSettings &s, double eps_prime);
PropertyResult sweep_max_eigenvalue(const SweepSettings &s);

// ---------------------------------------------------------------------------
// Convergence tables

struct ClassicalAepRow {
    std::size_t n = 0;
    double epsilon = 0.0;
    double rate = 0.0;     ///< (1/n) H_0^eps(P^{(x)n})
    double shannon = 0.0;  ///< H(P)
    double gap = 0.0;      ///< rate - shannon
};

/// Rows sorted by (n, eps).
std::vector<ClassicalAepRow> run_classical_aep(const Distribution &p, const std::vector<double> &eps_list,
                                               const std::vector<std::size_t> &n_list);
std::string classical_aep_csv(const std::vector<ClassicalAepRow> &rows);

struct QuantumAepRow {
    std::size_t n = 0;
    double epsilon = 0.0;
    std::vector<double> ranks;  ///< r'_j per party
    double estimate = 0.0;      ///< (1/n) sum_j theta_j log2 r'_j
    double limit = 0.0;         ///< sum_j theta_j H(Tr_j)
    double gap = 0.0;
    double certificate = 0.0;
};

std::vector<QuantumAepRow> run_quantum_aep(const MultipartiteState &psi, const std::vector<double> &theta,
                                           const std::vector<double> &eps_list, const std::vector<std::size_t> &n_list);
std::string quantum_aep_csv(const std::vector<QuantumAepRow> &rows);

// ---------------------------------------------------------------------------
// Config-driven entry point

struct ExperimentOutput {
    std::string text;  ///< CSV or pretty-printed JSON, newline terminated
    int exit_code = 0; ///< 0 pass, 1 property violation
};

/// Validates `config` and runs the named command. `command` overrides the
/// config's "command" field when nonempty; relative file paths resolve
/// against base_dir. Throws ConfigError on invalid input.
ExperimentOutput run_experiment(const nlohmann::json &config, const std::string &command,
                                std::optional<std::uint64_t> seed_override, const std::filesystem::path &base_dir = {});

}  // namespace aep
