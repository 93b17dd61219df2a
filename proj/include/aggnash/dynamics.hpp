#pragma once

#include "aggnash/game.hpp"
#include "aggnash/graph.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aggnash {

/// Algorithm state: strategies x and auxiliary tracking states theta.
/// The aggregate estimates are derived as eta = theta + phi(x).
struct SimState {
    double t = 0.0;
    Vector x;
    Vector theta;
};

struct StateDerivative {
    Vector x;
    Vector theta;
};

enum class Scheme { Euler, Rk4 };

[[nodiscard]] const char* to_string(Scheme s);
[[nodiscard]] Scheme scheme_from_string(const std::string& name);

/// Projected gradient play coupled with average tracking over a digraph:
///   x_i'     = P_i(x_i - alpha G_i(x_i, eta_i)) - x_i
///   theta_i' = beta sum_j a_ij (eta_j - eta_i)
///   eta_i    = theta_i + phi_i(x_i)
/// Holds references; the game and graph must outlive it.
class Dynamics {
public:
    Dynamics(const AggregativeGame& game, const Digraph& graph, double alpha, double beta);

    [[nodiscard]] const AggregativeGame& game() const { return game_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double beta() const { return beta_; }

    [[nodiscard]] Vector eta(const SimState& s) const;
    [[nodiscard]] StateDerivative rhs(const SimState& s) const;

    /// x+ = x + h (P(x - alpha G) - x). Requires 0 < h <= 1; for feasible x the
    /// result is a convex combination of feasible points.
    [[nodiscard]] SimState step_euler(const SimState& s, double h) const;
    [[nodiscard]] SimState step_rk4(const SimState& s, double h) const;

    /// x(0) = x0, theta(0) = 0.
    [[nodiscard]] SimState initial_state(const Vector& x0) const;
    /// theta = 1_N (x) sigma(x) - phi(x), so every eta_i equals sigma(x).
    [[nodiscard]] SimState consensus_state(const Vector& x) const;

private:
    void check(const SimState& s) const;

    const AggregativeGame& game_;
    Matrix laplacian_;
    double alpha_;
    double beta_;
};

struct SimOptions {
    double horizon = 400.0;
    double step = 0.01;
    Scheme scheme = Scheme::Euler;
    std::size_t sample_every = 10;
    /// Halt when ||x|| exceeds this; default 1e6 (1 + ||x0||).
    std::optional<double> divergence_bound;
    /// Optional reference point (usually the equilibrium) for err_x.
    std::optional<Vector> reference;
    /// Start from this theta instead of 0 (used to start at equilibrium).
    std::optional<Vector> theta0;
};

/// Sampled run. All per-sample vectors share the index of `times`.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> x;
    std::vector<Vector> eta;
    std::vector<Vector> sigma;
    std::vector<double> err_x;       // empty without a reference point
    std::vector<double> theta_mean;  // ||mean_i theta_i||_inf
    std::vector<double> averaging_drift;  // ||mean_i eta_i - sigma(x)||_inf

    [[nodiscard]] std::size_t size() const { return times.size(); }
    /// Tracking error y = eta - 1_N (x) sigma(x) at sample k.
    [[nodiscard]] Vector tracking_error(std::size_t k) const;
};

struct SimMonitors {
    double max_feasibility_violation = 0.0;
    /// Largest rounding excess removed by the Euler feasibility guard.
    double max_rounding_correction = 0.0;
    double max_averaging_drift = 0.0;
    double max_theta_mean = 0.0;
    double max_tracking_mean = 0.0;
    bool rk4_feasibility_flag = false;
};

enum class SimStatus { Completed, Diverged, NonFinite };

struct SimResult {
    Trajectory trajectory;
    SimState final_state;
    SimMonitors monitors;
    SimStatus status = SimStatus::Completed;
    std::string message;
    bool x0_projected = false;
    std::size_t steps = 0;
};

[[nodiscard]] const char* to_string(SimStatus s);

/// Integrates from x0 (projected onto the strategy sets if infeasible) with
/// theta(0) = 0 unless `theta0` is given.
[[nodiscard]] SimResult simulate(const Dynamics& dyn, const Vector& x0, const SimOptions& opt);

/// Header: t, x_1..x_n, eta_1..eta_{mN}, err_x, theta_mean, averaging_drift.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace aggnash
