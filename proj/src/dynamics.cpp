#include "aggnash/dynamics.hpp"

#include "aggnash/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace aggnash {

namespace {

Vector block_mean(const Vector& stacked, Eigen::Index m) {
    const Eigen::Index n = stacked.size() / m;
    return Eigen::Map<const Matrix>(stacked.data(), m, n).rowwise().mean();
}

}  // namespace

const char* to_string(Scheme s) { return s == Scheme::Euler ? "euler" : "rk4"; }

Scheme scheme_from_string(const std::string& name) {
    if (name == "euler") {
        return Scheme::Euler;
    }
    if (name == "rk4") {
        return Scheme::Rk4;
    }
    throw Error("dynamics", "unknown integrator scheme \"" + name + "\"");
}

const char* to_string(SimStatus s) {
    switch (s) {
        case SimStatus::Completed: return "completed";
        case SimStatus::Diverged: return "diverged";
        case SimStatus::NonFinite: return "non-finite";
    }
    return "unknown";
}

Dynamics::Dynamics(const AggregativeGame& game, const Digraph& graph, double alpha, double beta)
    : game_(game), laplacian_(laplacian(graph)), alpha_(alpha), beta_(beta) {
    if (graph.nodes() != game.players()) {
        throw Error("dynamics", "graph has " + std::to_string(graph.nodes()) + " nodes but game has " +
                                    std::to_string(game.players()) + " players");
    }
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw Error("dynamics", "alpha and beta must be finite and nonnegative");
    }
}

void Dynamics::check(const SimState& s) const {
    const Eigen::Index mn = game_.aggregate_dim() * static_cast<Eigen::Index>(game_.players());
    if (s.x.size() != game_.profile_dim() || s.theta.size() != mn) {
        throw Error("dynamics", "state dimension mismatch: x has " + std::to_string(s.x.size()) +
                                    " (expected " + std::to_string(game_.profile_dim()) +
                                    "), theta has " + std::to_string(s.theta.size()) +
                                    " (expected " + std::to_string(mn) + ")");
    }
}

Vector Dynamics::eta(const SimState& s) const {
    check(s);
    return s.theta + contributions(game_, s.x);
}

StateDerivative Dynamics::rhs(const SimState& s) const {
    const Vector e = eta(s);
    const Vector target = project(game_, s.x - alpha_ * gradient_map(game_, s.x, e));
    const Eigen::Index m = game_.aggregate_dim();
    const Eigen::Index n = static_cast<Eigen::Index>(game_.players());
    Vector theta_dot(e.size());
    Eigen::Map<Matrix>(theta_dot.data(), m, n) =
        -beta_ * Eigen::Map<const Matrix>(e.data(), m, n) * laplacian_.transpose();
    return {target - s.x, std::move(theta_dot)};
}

SimState Dynamics::step_euler(const SimState& s, double h) const {
    if (!(h > 0.0 && h <= 1.0)) {
        throw Error("dynamics", "Euler step must lie in (0, 1]");
    }
    const StateDerivative d = rhs(s);
    return {s.t + h, s.x + h * d.x, s.theta + h * d.theta};
}

SimState Dynamics::step_rk4(const SimState& s, double h) const {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw Error("dynamics", "RK4 step must be positive");
    }
    auto shifted = [&](const StateDerivative& d, double c) {
        return SimState{s.t + c * h, s.x + (c * h) * d.x, s.theta + (c * h) * d.theta};
    };
    const StateDerivative k1 = rhs(s);
    const StateDerivative k2 = rhs(shifted(k1, 0.5));
    const StateDerivative k3 = rhs(shifted(k2, 0.5));
    const StateDerivative k4 = rhs(shifted(k3, 1.0));
    return {s.t + h, s.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            s.theta + (h / 6.0) * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta)};
}

SimState Dynamics::initial_state(const Vector& x0) const {
    SimState s{0.0, x0, Vector::Zero(game_.aggregate_dim() * static_cast<Eigen::Index>(game_.players()))};
    check(s);
    return s;
}

SimState Dynamics::consensus_state(const Vector& x) const {
    const Vector sigma = aggregate(game_, x);
    const Vector consensus = sigma.replicate(static_cast<Eigen::Index>(game_.players()), 1);
    return {0.0, x, consensus - contributions(game_, x)};
}

Vector Trajectory::tracking_error(std::size_t k) const {
    const Eigen::Index m = sigma.at(k).size();
    return eta.at(k) - sigma[k].replicate(eta[k].size() / m, 1);
}

SimResult simulate(const Dynamics& dyn, const Vector& x0, const SimOptions& opt) {
    const AggregativeGame& game = dyn.game();
    if (!(opt.horizon > 0.0) || !std::isfinite(opt.horizon)) {
        throw Error("dynamics", "horizon must be positive");
    }
    if (opt.sample_every == 0) {
        throw Error("dynamics", "sample_every must be at least 1");
    }
    if (opt.scheme == Scheme::Euler && !(opt.step > 0.0 && opt.step <= 1.0)) {
        throw Error("dynamics", "Euler step must lie in (0, 1]");
    }
    if (opt.scheme == Scheme::Rk4 && !(opt.step > 0.0)) {
        throw Error("dynamics", "RK4 step must be positive");
    }
    if (opt.reference && opt.reference->size() != game.profile_dim()) {
        throw Error("dynamics", "reference point dimension mismatch");
    }

    SimResult result;
    Vector start = x0;
    if (x0.size() != game.profile_dim()) {
        throw Error("dynamics", "x0 dimension mismatch");
    }
    if (feasibility_violation(game, x0) > 0.0) {
        start = project(game, x0);
        result.x0_projected = true;
    }
    SimState state = dyn.initial_state(start);
    if (opt.theta0) {
        if (opt.theta0->size() != state.theta.size()) {
            throw Error("dynamics", "theta0 dimension mismatch");
        }
        state.theta = *opt.theta0;
    }

    const double bound = opt.divergence_bound.value_or(1e6 * (1.0 + start.norm()));
    const auto steps = static_cast<std::size_t>(std::ceil(opt.horizon / opt.step - 1e-9));
    const Eigen::Index m = game.aggregate_dim();
    const double rk4_flag_tol = 1e-9;

    Trajectory& traj = result.trajectory;
    SimMonitors& mon = result.monitors;

    auto record = [&](std::size_t k, const SimState& s) {
        const Vector eta = dyn.eta(s);
        const Vector sigma = aggregate(game, s.x);
        traj.times.push_back(static_cast<double>(k) * opt.step);
        traj.x.push_back(s.x);
        traj.eta.push_back(eta);
        traj.sigma.push_back(sigma);
        if (opt.reference) {
            traj.err_x.push_back((s.x - *opt.reference).norm());
        }
        traj.theta_mean.push_back(block_mean(s.theta, m).cwiseAbs().maxCoeff());
        traj.averaging_drift.push_back((block_mean(eta, m) - sigma).cwiseAbs().maxCoeff());
    };

    auto monitor = [&](const SimState& s) {
        const Vector eta = dyn.eta(s);
        const Vector sigma = aggregate(game, s.x);
        const Eigen::Index n = eta.size() / m;
        mon.max_feasibility_violation =
            std::max(mon.max_feasibility_violation, feasibility_violation(game, s.x));
        mon.max_averaging_drift =
            std::max(mon.max_averaging_drift, (block_mean(eta, m) - sigma).cwiseAbs().maxCoeff());
        mon.max_theta_mean =
            std::max(mon.max_theta_mean, block_mean(s.theta, m).cwiseAbs().maxCoeff());
        const Vector y = eta - sigma.replicate(n, 1);
        mon.max_tracking_mean =
            std::max(mon.max_tracking_mean, block_mean(y, m).cwiseAbs().maxCoeff());
    };

    monitor(state);
    record(0, state);
    for (std::size_t k = 1; k <= steps; ++k) {
        SimState next;
        if (opt.scheme == Scheme::Euler) {
            next = dyn.step_euler(state, opt.step);
            // The update is a convex combination of feasible points; the guard only
            // strips floating-point rounding past a bound.
            const Vector guarded = project(game, next.x);
            mon.max_rounding_correction =
                std::max(mon.max_rounding_correction, (guarded - next.x).cwiseAbs().maxCoeff());
            next.x = guarded;
        } else {
            next = dyn.step_rk4(state, opt.step);
        }
        next.t = static_cast<double>(k) * opt.step;
        result.steps = k;

        if (!next.x.allFinite() || !next.theta.allFinite()) {
            result.status = SimStatus::NonFinite;
            result.message = "non-finite state at step " + std::to_string(k) + " (t = " +
                             std::to_string(next.t) + ")";
            break;
        }
        state = std::move(next);
        monitor(state);
        if (k % opt.sample_every == 0 || k == steps) {
            record(k, state);
        }
        if (state.x.norm() > bound) {
            result.status = SimStatus::Diverged;
            result.message = "||x|| exceeded divergence bound " + std::to_string(bound) +
                             " at step " + std::to_string(k);
            if (k % opt.sample_every != 0 && k != steps) {
                record(k, state);
            }
            break;
        }
    }
    if (opt.scheme == Scheme::Rk4) {
        mon.rk4_feasibility_flag = mon.max_feasibility_violation > rk4_flag_tol;
    }
    result.final_state = state;
    return result;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    if (traj.size() == 0) {
        out << "t\n";
        return;
    }
    const Eigen::Index n = traj.x.front().size();
    const Eigen::Index mn = traj.eta.front().size();
    out << "t";
    for (Eigen::Index k = 1; k <= n; ++k) {
        out << ",x_" << k;
    }
    for (Eigen::Index k = 1; k <= mn; ++k) {
        out << ",eta_" << k;
    }
    out << ",err_x,theta_mean,averaging_drift\n";

    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (std::size_t s = 0; s < traj.size(); ++s) {
        put(traj.times[s]);
        for (Eigen::Index k = 0; k < n; ++k) {
            out << ',';
            put(traj.x[s][k]);
        }
        for (Eigen::Index k = 0; k < mn; ++k) {
            out << ',';
            put(traj.eta[s][k]);
        }
        out << ',';
        if (traj.err_x.empty()) {
            out << "nan";
        } else {
            put(traj.err_x[s]);
        }
        out << ',';
        put(traj.theta_mean[s]);
        out << ',';
        put(traj.averaging_drift[s]);
        out << '\n';
    }
}

}  // namespace aggnash
