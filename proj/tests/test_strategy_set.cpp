#include "aggnash/error.hpp"
#include "aggnash/strategy_set.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace aggnash;

namespace {

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Vector v(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        v[k] = g(rng);
    }
    return v;
}

}  // namespace

TEST_CASE("box projection clamps componentwise") {
    const auto set = StrategySet::box(Vector::Constant(3, -1.0), Vector::Constant(3, 2.0));
    const Vector v = (Vector(3) << -5.0, 0.5, 7.0).finished();
    const Vector p = set.project(v);
    CHECK(p[0] == -1.0);
    CHECK(p[1] == 0.5);
    CHECK(p[2] == 2.0);
    CHECK(set.contains(p));
    CHECK_FALSE(set.contains(v));
    CHECK(set.distance(v) == doctest::Approx(std::sqrt(16.0 + 25.0)));
}

TEST_CASE("infinite box sides are left alone") {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto set = StrategySet::box((Vector(2) << -inf, 0.0).finished(),
                                      (Vector(2) << 1.0, inf).finished());
    const Vector p = set.project((Vector(2) << -1e9, 1e9).finished());
    CHECK(p[0] == -1e9);
    CHECK(p[1] == 1e9);
    CHECK_FALSE(set.is_bounded());
    const Vector ref = set.reference_point();
    CHECK(ref[0] == 0.0);
    CHECK(ref[1] == 0.0);
}

TEST_CASE("ball projection scales onto the sphere") {
    const auto set = StrategySet::ball(Vector::Zero(2), 2.0);
    const Vector p = set.project((Vector(2) << 3.0, 4.0).finished());
    CHECK(p.norm() == doctest::Approx(2.0));
    CHECK(p[0] / p[1] == doctest::Approx(0.75));
    const Vector inside = (Vector(2) << 0.3, -0.2).finished();
    CHECK(set.project(inside) == inside);
}

TEST_CASE("projection is idempotent and 1-Lipschitz") {
    std::mt19937_64 rng(7);
    const std::vector<StrategySet> sets = {
        StrategySet::box((Vector(3) << -1.0, 0.0, -2.0).finished(),
                         (Vector(3) << 1.0, 0.5, 3.0).finished()),
        StrategySet::ball((Vector(3) << 1.0, -1.0, 0.5).finished(), 0.7),
        StrategySet::unbounded(3),
    };
    for (const auto& set : sets) {
        for (int trial = 0; trial < 500; ++trial) {
            const Vector u = random_vector(rng, 3, 3.0);
            const Vector v = random_vector(rng, 3, 3.0);
            const Vector pu = set.project(u);
            CHECK((set.project(pu) - pu).norm() <= 1e-15);
            CHECK((pu - set.project(v)).norm() <= (u - v).norm() + 1e-12);
        }
    }
}

TEST_CASE("invalid sets are rejected") {
    CHECK_THROWS_AS(StrategySet::interval(1.0, 0.0), Error);
    CHECK_THROWS_AS(StrategySet::ball(Vector::Zero(2), -1.0), Error);
    CHECK_THROWS_AS(StrategySet::box(Vector::Zero(2), Vector::Zero(3)), Error);
    const auto set = StrategySet::interval(0.0, 1.0);
    CHECK_THROWS_AS((void)set.project(Vector::Zero(2)), Error);
}
