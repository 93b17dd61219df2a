#include "aggnash/error.hpp"
#include "aggnash/oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace aggnash;

namespace {

const QuadraticCournotGame& sec5() {
    static const QuadraticCournotGame g = QuadraticCournotGame::builtin_sec5();
    return g;
}

QuadraticCournotGame decoupled(const Vector& b, double lo, double hi) {
    const auto n = b.size();
    return {Vector::Constant(n, 0.5), b, Vector::Zero(n), Vector::Constant(n, lo), Vector::Constant(n, hi)};
}

}  // namespace

TEST_CASE("decoupled players solve in closed form") {
    // J_i = x_i^2/2 + b_i x_i on [-1, 1]: x_i = clamp(-b_i).
    Vector b(4);
    b << 0.3, -0.7, 2.0, -5.0;
    const QuadraticCournotGame game = decoupled(b, -1.0, 1.0);
    const NEResult r = solve_ne(game);
    REQUIRE(r.converged);
    Vector expected(4);
    expected << -0.3, 0.7, -1.0, 1.0;
    CHECK((r.x - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("builtin equilibrium") {
    const NEResult r = solve_ne(sec5());
    REQUIRE(r.converged);
    CHECK(r.residual <= 1e-10);
    CHECK(ne_residual(sec5(), r.x) <= 1e-10);
    // Independent active-set KKT solve.
    CHECK(r.x[0] == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(r.x[1] == doctest::Approx(-0.5455794677216721).epsilon(1e-9));
    CHECK(r.x[2] == doctest::Approx(-0.30496426832617335).epsilon(1e-9));
    CHECK(r.x[19] == doctest::Approx(-0.0088169050216459).epsilon(1e-8));
    CHECK(aggregate(sec5(), r.x)[0] == doctest::Approx(-0.15933135992366299).epsilon(1e-10));
    // Lower bound active with a nonnegative multiplier.
    CHECK(pseudo_gradient(sec5(), r.x)[0] > 0.0);
}

TEST_CASE("fixed point does not depend on the step") {
    const Vector base = solve_ne(sec5()).x;
    for (double tau : {0.05, 0.5, 2.0}) {
        OracleOptions opt;
        opt.step = tau;
        const NEResult r = solve_ne(sec5(), opt);
        REQUIRE(r.converged);
        CHECK((r.x - base).norm() <= 1e-9);
        CHECK(ne_residual(sec5(), r.x, tau) <= 1e-10);
    }
}

TEST_CASE("multistart agrees") {
    const MultiStartResult m = solve_ne_multistart(sec5(), {}, 5, 7);
    CHECK(m.runs.size() == 5);
    CHECK(m.unique);
    CHECK(m.max_pairwise_distance <= 1e-10);
    CHECK_THROWS_AS((void)solve_ne_multistart(sec5(), {}, 0, 7), Error);
}

TEST_CASE("best-response verification on the grid") {
    const NEResult r = solve_ne(sec5());
    const NEVerification v = verify_ne(sec5(), r.x);
    CHECK(v.passed);
    CHECK(v.gaps.size() == 20);
    CHECK(v.max_gap() <= 1e-6);
    CHECK(std::all_of(v.modes.begin(), v.modes.end(),
                      [](BestResponseMode m) { return m == BestResponseMode::Grid; }));
}

TEST_CASE("perturbed profiles show a positive gap") {
    const NEResult r = solve_ne(sec5());
    const double mu = sec5().analytic_constants()->mu;
    for (std::size_t i : {1u, 5u, 12u}) {
        Vector x = r.x;
        const double d = 0.2;
        x[static_cast<Eigen::Index>(i)] += d;
        REQUIRE(sec5().strategy_set(i).contains(x.segment(static_cast<Eigen::Index>(i), 1)));
        const NEVerification v = verify_ne(sec5(), x);
        CHECK_FALSE(v.passed);
        CHECK(v.gaps[i] > 0.0);
        CHECK(v.gaps[i] >= mu * d * d / 4.0);
    }
}

TEST_CASE("unbounded players verify by descent") {
    const double inf = std::numeric_limits<double>::infinity();
    Vector a(2), b(2), c(2);
    a << 1.0, 0.8;
    b << -1.0, 0.5;
    c << 0.4, -0.3;
    const QuadraticCournotGame game(a, b, c, Vector::Constant(2, -inf), Vector::Constant(2, inf));
    const NEResult r = solve_ne(game);
    REQUIRE(r.converged);
    // Unconstrained: M x + b = 0.
    const Vector direct = game.jacobian().lu().solve(-game.b());
    CHECK((r.x - direct).norm() <= 1e-10);
    const NEVerification v = verify_ne(game, r.x);
    CHECK(v.passed);
    CHECK(v.modes[0] == BestResponseMode::Descent);
}

TEST_CASE("single player") {
    Vector b(1);
    b << -0.25;
    const NEResult r = solve_ne(decoupled(b, -1.0, 1.0));
    CHECK(r.x[0] == doctest::Approx(0.25));
}

TEST_CASE("iteration budget exhaustion is reported") {
    OracleOptions opt;
    opt.max_iter = 3;
    const NEResult r = solve_ne(sec5(), opt);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
    CHECK(r.residual > 1e-12);
    opt.step = -1.0;
    CHECK_THROWS_AS((void)solve_ne(sec5(), opt), Error);
}

TEST_CASE("verification preconditions") {
    const NEResult r = solve_ne(sec5());
    Vector x = r.x;
    x[0] = -10.0;
    CHECK_THROWS_AS((void)verify_ne(sec5(), x), Error);
}
