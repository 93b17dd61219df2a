#pragma once

#include "aggnash/analysis.hpp"
#include "aggnash/certify.hpp"
#include "aggnash/dynamics.hpp"
#include "aggnash/game.hpp"
#include "aggnash/graph.hpp"
#include "aggnash/oracle.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aggnash {

enum class ConstantsSource { Analytic, Sampled, Declared };
enum class X0Policy { Midpoint, Random, Explicit };

struct GameSpec {
    std::string kind;  // "builtin_paper_sec5" | "quadratic_cournot"
    std::size_t players = 20;
    std::vector<double> a, b, c, lower, upper;
};

struct GraphSpec {
    std::string kind;  // directed_cycle | complete | er_undirected | file | lambda2_override
    std::optional<std::size_t> nodes;
    double weight = 1.0;
    double p = 0.2;
    std::optional<std::uint64_t> seed;
    std::string path;
    double lambda2 = 0.0;
    std::optional<double> scale_to_lambda2;
};

struct ConstantsSpec {
    ConstantsSource source = ConstantsSource::Analytic;
    std::size_t samples = 2000;
    GameConstants declared;
};

struct SweepSpec {
    std::optional<double> alpha_min;
    std::optional<double> alpha_max;
    std::size_t points = 50;
};

struct ExperimentConfig {
    GameSpec game;
    ConstantsSpec constants;
    GraphSpec graph;
    double alpha = 3.0;
    double beta = 1.0;
    Scheme scheme = Scheme::Euler;
    double step = 0.01;
    double horizon = 400.0;
    std::size_t sample_every = 10;
    X0Policy x0 = X0Policy::Midpoint;
    std::vector<double> x0_values;
    FitWindow fit;
    double oracle_tol = 1e-12;
    std::size_t oracle_max_iter = 100000;
    std::size_t oracle_starts = 3;
    bool force = false;
    std::uint64_t seed = 1;
    SweepSpec sweep;
};

/// Parses and validates a config document; unknown keys are rejected.
/// Relative file paths resolve against `base_dir`.
[[nodiscard]] ExperimentConfig parse_config(const std::string& json_text,
                                            const std::filesystem::path& base_dir = {});
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

[[nodiscard]] std::vector<std::string> preset_names();
[[nodiscard]] std::string preset_description(const std::string& name);
/// Config document (JSON text) for a named preset.
[[nodiscard]] std::string preset_json(const std::string& name);
[[nodiscard]] ExperimentConfig preset_config(const std::string& name);

/// Game from a standalone game file (same schema as the config's "game" block).
[[nodiscard]] GamePtr load_game(const std::filesystem::path& path);
[[nodiscard]] GamePtr build_game(const GameSpec& spec);

struct ExperimentReport {
    GameConstants game_constants;
    std::optional<double> graph_lambda2;  // computed from the graph
    Certificate certificate;
    std::optional<MultiStartResult> ne;
    std::optional<SimResult> sim;
    std::optional<RateFit> fit;
    std::optional<RateComparison> comparison;
    std::string fit_error;
    bool simulated = false;
    bool skipped_inadmissible = false;
    /// Feasibility (Euler), averaging identity and completion checks.
    bool monitors_ok = true;
    std::vector<std::string> notes;
};

/// Certificate only. Writes certificate.txt and certificate.json when `out` is set.
[[nodiscard]] ExperimentReport certify_only(const ExperimentConfig& cfg,
                                            const std::optional<std::filesystem::path>& out);

/// Full pipeline: certify, solve the equilibrium, simulate, fit, and write
/// certificate.*, ne.json, trajectory.csv, rates.* and report.json to `out`.
/// Inadmissible parameters skip simulation unless `force` is set.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                              const std::optional<std::filesystem::path>& out);

struct SweepRow {
    double alpha;
    double beta_min;
    Certificate certificate;
};

/// beta_min(alpha) over a grid inside (0, alpha_max); writes beta_min_curve.csv.
[[nodiscard]] std::vector<SweepRow> sweep_beta_min(const ExperimentConfig& cfg,
                                                   const std::optional<std::filesystem::path>& out);

}  // namespace aggnash
