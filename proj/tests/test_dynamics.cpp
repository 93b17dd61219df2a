#include "aggnash/dynamics.hpp"
#include "aggnash/error.hpp"
#include "aggnash/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace aggnash;

namespace {

const QuadraticCournotGame& sec5() {
    static const QuadraticCournotGame g = QuadraticCournotGame::builtin_sec5();
    return g;
}

const Vector& sec5_ne() {
    static const Vector x = solve_ne(sec5()).x;
    return x;
}

// Three players without constraints, so the flow is linear and smooth.
QuadraticCournotGame unbounded3() {
    const double inf = std::numeric_limits<double>::infinity();
    Vector a(3), b(3), c(3);
    a << 0.5, 0.7, 0.6;
    b << 1.0, -0.5, 0.2;
    c << 0.3, -0.2, 0.1;
    return {a, b, c, Vector::Constant(3, -inf), Vector::Constant(3, inf)};
}

}  // namespace

TEST_CASE("equilibrium with consensus is a rest point") {
    const Digraph g = build_directed_cycle(20);
    const Dynamics dyn(sec5(), g, 3.0, 1.0);
    const SimState s = dyn.consensus_state(sec5_ne());
    const StateDerivative d = dyn.rhs(s);
    CHECK(d.x.cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(d.theta.cwiseAbs().maxCoeff() <= 1e-10);
    const Vector eta = dyn.eta(s);
    CHECK((eta.array() - aggregate(sec5(), sec5_ne())[0]).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("alpha = 0 freezes strategies") {
    const Digraph g = build_directed_cycle(20);
    const Dynamics dyn(sec5(), g, 0.0, 1.0);
    Vector x0(20);
    for (std::size_t i = 0; i < 20; ++i) {
        x0[static_cast<Eigen::Index>(i)] = sec5().strategy_set(i).reference_point()[0];
    }
    const SimResult r = simulate(dyn, x0, {.horizon = 5.0, .sample_every = 50});
    CHECK(r.final_state.x == x0);
    // Estimates still reach consensus on sigma(x0) under a balanced graph.
    CHECK(r.trajectory.averaging_drift.back() <= 1e-12);
}

TEST_CASE("a single player needs no communication") {
    Vector a(1), b(1), c(1), lo(1), hi(1);
    a << 1.0;
    b << -1.0;
    c << 0.5;
    lo << -2.0;
    hi << 2.0;
    const QuadraticCournotGame game(a, b, c, lo, hi);
    const Digraph g = Digraph::empty(1);
    const Dynamics dyn(game, g, 0.5, 1.0);
    const SimResult r = simulate(dyn, Vector::Constant(1, -2.0), {.horizon = 60.0, .sample_every = 100});
    // F(x) = 2x - 1 + 0.5x + 0.5x = 3x - 1.
    CHECK(r.final_state.x[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(r.final_state.theta.norm() == 0.0);
}

TEST_CASE("Euler with h = 1 jumps to the projected point") {
    const Digraph g = build_directed_cycle(20);
    const Dynamics dyn(sec5(), g, 3.0, 0.0);
    const SimState s0 = dyn.initial_state(Vector::Zero(20));
    const SimState s1 = dyn.step_euler(s0, 1.0);
    const Vector expected = project(sec5(), s0.x - 3.0 * gradient_map(sec5(), s0.x, dyn.eta(s0)));
    CHECK((s1.x - expected).norm() <= 1e-15);
    CHECK(feasibility_violation(sec5(), s1.x) == 0.0);
    CHECK_THROWS_AS((void)dyn.step_euler(s0, 1.5), Error);
    CHECK_THROWS_AS((void)dyn.step_euler(s0, 0.0), Error);
    CHECK_THROWS_AS((void)dyn.step_rk4(s0, -0.1), Error);
}

TEST_CASE("integrator orders on a smooth flow") {
    const QuadraticCournotGame game = unbounded3();
    const Digraph g = build_complete(3);
    const Dynamics dyn(game, g, 0.8, 2.0);
    Vector x0(3);
    x0 << 1.0, -1.0, 0.5;
    auto final_x = [&](Scheme scheme, double h) {
        SimOptions opt{.horizon = 1.0, .step = h, .scheme = scheme, .sample_every = 1000000};
        return simulate(dyn, x0, opt).final_state.x;
    };
    const Vector exact = final_x(Scheme::Rk4, 1e-4);
    const double e1 = (final_x(Scheme::Euler, 0.02) - exact).norm();
    const double e2 = (final_x(Scheme::Euler, 0.01) - exact).norm();
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
    const double r1 = (final_x(Scheme::Rk4, 0.02) - exact).norm();
    const double r2 = (final_x(Scheme::Rk4, 0.01) - exact).norm();
    CHECK(r1 / r2 == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("tracking states keep zero mean") {
    const Digraph g = build_directed_cycle(20);
    const Dynamics dyn(sec5(), g, 3.0, 1.0);
    const SimResult r = simulate(dyn, Vector::Zero(20), {.horizon = 1000.0, .sample_every = 1000});
    CHECK(r.steps == 100000);
    CHECK(r.monitors.max_theta_mean <= 1e-12);
    CHECK(r.monitors.max_averaging_drift <= 1e-12);
    CHECK(r.monitors.max_feasibility_violation == 0.0);
}

TEST_CASE("sampling grid") {
    const Digraph g = build_directed_cycle(20);
    const Dynamics dyn(sec5(), g, 3.0, 1.0);
    const SimResult r = simulate(dyn, Vector::Zero(20), {.horizon = 1.0, .sample_every = 10});
    REQUIRE(r.trajectory.size() == 11);
    CHECK(r.trajectory.times.front() == 0.0);
    CHECK(r.trajectory.times.back() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.trajectory.err_x.empty());
    const SimResult odd = simulate(dyn, Vector::Zero(20), {.horizon = 1.05, .sample_every = 10});
    CHECK(odd.trajectory.size() == 12);
}

TEST_CASE("starting at equilibrium stays there") {
    const Digraph g = build_directed_cycle(20);
    const Dynamics dyn(sec5(), g, 3.0, 1.0);
    const SimState s = dyn.consensus_state(sec5_ne());
    SimOptions opt{.horizon = 50.0, .sample_every = 100};
    opt.reference = sec5_ne();
    opt.theta0 = s.theta;
    const SimResult r = simulate(dyn, sec5_ne(), opt);
    for (double e : r.trajectory.err_x) {
        CHECK(e <= 1e-10);
    }
}

TEST_CASE("infeasible x0 is projected") {
    const Digraph g = build_directed_cycle(20);
    const Dynamics dyn(sec5(), g, 3.0, 1.0);
    const SimResult r = simulate(dyn, Vector::Constant(20, 100.0), {.horizon = 0.1});
    CHECK(r.x0_projected);
    CHECK(feasibility_violation(sec5(), r.trajectory.x.front()) == 0.0);
}

TEST_CASE("divergence is reported, not thrown") {
    const double inf = std::numeric_limits<double>::infinity();
    const QuadraticCournotGame bad(Vector::Constant(2, -1.0), Vector::Zero(2), Vector::Zero(2),
                                   Vector::Constant(2, -inf), Vector::Constant(2, inf));
    const Digraph g = build_complete(2);
    const Dynamics dyn(bad, g, 1.0, 1.0);
    const SimResult r = simulate(dyn, Vector::Constant(2, 1.0), {.horizon = 100.0});
    CHECK(r.status == SimStatus::Diverged);
    CHECK(r.steps < 10000);
    CHECK_FALSE(r.message.empty());
}

TEST_CASE("argument validation") {
    const Digraph g = build_directed_cycle(20);
    CHECK_THROWS_AS(Dynamics(sec5(), build_directed_cycle(5), 1.0, 1.0), Error);
    CHECK_THROWS_AS(Dynamics(sec5(), g, -1.0, 1.0), Error);
    const Dynamics dyn(sec5(), g, 3.0, 1.0);
    CHECK_THROWS_AS((void)simulate(dyn, Vector::Zero(20), {.step = 2.0}), Error);
    CHECK_THROWS_AS((void)simulate(dyn, Vector::Zero(20), {.horizon = -1.0}), Error);
    CHECK_THROWS_AS((void)simulate(dyn, Vector::Zero(20), {.sample_every = 0}), Error);
    CHECK_THROWS_AS((void)simulate(dyn, Vector::Zero(3), {}), Error);
    CHECK(scheme_from_string("rk4") == Scheme::Rk4);
    CHECK_THROWS_AS((void)scheme_from_string("midpoint"), Error);
}

TEST_CASE("trajectory CSV") {
    const Digraph g = build_directed_cycle(20);
    const Dynamics dyn(sec5(), g, 3.0, 1.0);
    SimOptions opt{.horizon = 0.1};
    opt.reference = sec5_ne();
    const SimResult r = simulate(dyn, Vector::Zero(20), opt);
    std::ostringstream os;
    write_trajectory_csv(r.trajectory, os);
    const std::string text = os.str();
    const std::string header = text.substr(0, text.find('\n'));
    CHECK(header.rfind("t,x_1,", 0) == 0);
    CHECK(header.find("x_20,eta_1,") != std::string::npos);
    CHECK(header.find("eta_20,err_x,theta_mean,averaging_drift") != std::string::npos);
    std::size_t lines = 0;
    for (char ch : text) {
        lines += ch == '\n';
    }
    CHECK(lines == r.trajectory.size() + 1);
}
