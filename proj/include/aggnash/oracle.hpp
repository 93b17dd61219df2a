#pragma once

#include "aggnash/game.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aggnash {

/// Centralized equilibrium from the projected fixed point x = P(x - tau F(x)).
struct NEResult {
    Vector x;
    /// ||x - P(x - F(x))||.
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double step = 0.0;
};

struct OracleOptions {
    double tol = 1e-12;
    std::size_t max_iter = 100000;
    /// Fixed-point step; defaults to mu / kappa^2 from the game's constants.
    std::optional<double> step;
    /// Starting point; defaults to the strategy sets' reference points.
    std::optional<Vector> start;
};

/// Fixed-point residual ||x - P(x - tau F(x))||.
[[nodiscard]] double ne_residual(const AggregativeGame& game, const Vector& x, double tau = 1.0);

/// Oracle step mu / kappa^2, half the largest contraction step.
[[nodiscard]] double default_oracle_step(const GameConstants& k);

[[nodiscard]] NEResult solve_ne(const AggregativeGame& game, const OracleOptions& opt = {});

struct MultiStartResult {
    NEResult best;
    std::vector<NEResult> runs;
    double max_pairwise_distance = 0.0;
    /// All starts agree within 10 tol.
    bool unique = false;
};

/// Solves from `starts` seeded random feasible points and compares them.
[[nodiscard]] MultiStartResult solve_ne_multistart(const AggregativeGame& game,
                                                   const OracleOptions& opt, std::size_t starts,
                                                   std::uint64_t seed);

enum class BestResponseMode { Grid, Descent };

struct NEVerification {
    bool passed = false;
    /// J_i(x) - min over player i's own deviations (>= 0).
    std::vector<double> gaps;
    std::vector<BestResponseMode> modes;
    [[nodiscard]] double max_gap() const;
};

struct VerifyOptions {
    double tol = 1e-6;
    std::size_t grid_points = 10000;
    std::size_t descent_iterations = 5000;
};

/// Best-response check. Scalar players on bounded intervals are searched on a
/// uniform grid; all others run projected gradient descent on their own cost.
/// Requires cost evaluators and a feasible x.
[[nodiscard]] NEVerification verify_ne(const AggregativeGame& game, const Vector& x,
                                       const VerifyOptions& opt = {});

[[nodiscard]] std::string ne_to_json(const NEResult& r, const MultiStartResult* multi = nullptr);

}  // namespace aggnash
