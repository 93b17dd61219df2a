#include "aggnash/certify.hpp"
#include "aggnash/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace aggnash;

namespace {

// Cournot constants rounded to four digits.
Constants rounded(double lambda2) { return {0.1770, 0.2199, 0.0030, 1.0, lambda2}; }

bool within(double value, double target, double rel) {
    return std::abs(value - target) <= rel * std::abs(target);
}

}  // namespace

TEST_CASE("parameter bounds with the rounded constants") {
    const ParameterBounds b = parameter_bounds(rounded(0.2872));
    CHECK(std::abs(b.alpha_max - 7.125) <= 0.01);
    // Independent evaluation: 2*0.003*(2 + 6*0.2229 + 3*0.177)/(0.2872*(0.354 - 3*0.2229^2)).
    CHECK(b.beta_min(3.0) == doctest::Approx(0.39432754167756806).epsilon(1e-12));
    CHECK(b.beta_min(3.0) < 1.0);
    CHECK_THROWS_AS((void)b.beta_min(0.0), Error);
    CHECK_THROWS_AS((void)b.beta_min(b.alpha_max), Error);
    CHECK(b.beta_min(b.alpha_max * (1 - 1e-9)) > 1e6);
}

TEST_CASE("zero aggregation coupling gives beta_min = 0") {
    const ParameterBounds b = parameter_bounds(Constants(1.0, 1.0, 0.0, 1.0, 0.5));
    for (double alpha : {0.1, 1.0, 1.9}) {
        CHECK(b.beta_min(alpha) == 0.0);
    }
    const Certificate c = gains(Constants(1.0, 1.0, 0.0, 1.0, 0.5), 1.0, 0.01);
    CHECK(c.gamma1 == 0.0);
    CHECK(c.gain_product == 0.0);
    CHECK(c.small_gain);
}

TEST_CASE("gain table rows") {
    const Certificate orig = gains(rounded(0.2872), 3.0, 1.0);
    CHECK(within(orig.omega1, 0.2306, 0.03));
    CHECK(within(orig.omega2, 0.2783, 0.03));
    CHECK(within(orig.gain_product, 0.3700, 0.03));
    CHECK(orig.small_gain);
    CHECK(orig.alpha_admissible);
    CHECK(orig.beta_admissible);

    const Certificate cycle = gains(rounded(0.0489), 3.0, 1.0);
    CHECK(std::abs(cycle.omega2 - 0.0400) <= 0.001);
    CHECK(within(cycle.gain_product, 2.5712, 0.03));
    CHECK_FALSE(cycle.small_gain);
    CHECK_FALSE(cycle.beta_admissible);

    const Certificate er = gains(rounded(0.0955), 3.0, 1.0);
    CHECK(std::abs(er.omega2 - 0.0866) <= 0.002);
    CHECK(within(er.gain_product, 1.1884, 0.03));
    CHECK_FALSE(er.small_gain);

    // Values computed independently from the closed forms.
    CHECK(orig.omega1 == doctest::Approx(0.2303894442987221).epsilon(1e-12));
    CHECK(orig.gain_product == doctest::Approx(0.37473353691516015).epsilon(1e-12));
    CHECK(cycle.gain_product == doctest::Approx(2.612803758641543).epsilon(1e-12));
}

TEST_CASE("admissible parameters always give the small-gain property") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t failures = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const double mu = 0.01 + u(rng);
        const double kappa1 = mu * (1.0 + 3.0 * u(rng));
        const double kappa2 = 2.0 * u(rng);
        const double kappa3 = 0.1 + 2.0 * u(rng);
        const Constants c(mu, kappa1, kappa2, kappa3, 0.01 + 3.0 * u(rng));
        const ParameterBounds b = parameter_bounds(c);
        const double alpha = b.alpha_max * (0.001 + 0.998 * u(rng));
        const double beta = b.beta_min(alpha) * (1.0 + 1e-6 + 2.0 * u(rng)) + 1e-9;
        const Certificate cert = gains(c, alpha, beta);
        if (!(cert.omega1 > 0.0 && cert.omega2 > 0.0 && cert.gain_product < 1.0 && cert.small_gain)) {
            ++failures;
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("splitting kappa2*kappa3 differently scales gamma1 and gamma2 inversely") {
    const double s = 2.5;
    const Certificate a = gains(Constants(0.3, 0.5, 0.04, 1.2, 0.4), 1.0, 2.0);
    const Certificate b = gains(Constants(0.3, 0.5, 0.04 * s, 1.2 / s, 0.4), 1.0, 2.0);
    CHECK(a.constants.kappa() == doctest::Approx(b.constants.kappa()));
    CHECK(a.omega1 == doctest::Approx(b.omega1));
    CHECK(a.omega2 == doctest::Approx(b.omega2));
    CHECK(b.gamma1 == doctest::Approx(s * a.gamma1));
    CHECK(b.gamma2 == doctest::Approx(a.gamma2 / s));
    CHECK(a.gain_product == doctest::Approx(b.gain_product));
    CHECK(*a.beta_min == doctest::Approx(*b.beta_min));
}

TEST_CASE("inadmissible alpha is a verdict") {
    const Certificate c = gains(rounded(0.2872), 8.0, 1.0);
    CHECK_FALSE(c.alpha_admissible);
    CHECK_FALSE(c.beta_min.has_value());
    CHECK_FALSE(c.small_gain);
    CHECK(c.omega1 < 0.0);
}

TEST_CASE("invalid constants are rejected") {
    CHECK_THROWS_AS(Constants(0.0, 1.0, 1.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(Constants(1.0, -1.0, 1.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(Constants(1.0, 1.0, -0.1, 1.0, 1.0), Error);
    CHECK_THROWS_AS(Constants(1.0, 1.0, 1.0, 1.0, 0.0), Error);
    CHECK_THROWS_AS((void)gains(rounded(0.2872), -1.0, 1.0), Error);
    CHECK_THROWS_AS((void)gains(rounded(0.2872), 1.0, 0.0), Error);
}

TEST_CASE("envelope") {
    const Certificate cert = gains(rounded(0.2872), 3.0, 1.0);
    const Envelope env(cert, 2.0, 0.5);
    CHECK(env(0.0) == doctest::Approx((2.0 + cert.gamma1 * 0.5) / (1.0 - cert.gain_product)));
    CHECK(env(0.0) > 2.0);
    CHECK(env(1e4) < 1e-100);
    double prev = env(0.0);
    for (double t = 0.5; t < 100.0; t += 0.5) {
        CHECK(env(t) <= prev);
        prev = env(t);
    }
    const Envelope unit(cert, 1.0, 0.0);
    CHECK(within(unit.x_coefficient(), 1.0 / 0.63, 0.03));
    CHECK(within(unit.omega1(), 0.2306, 0.03));
    CHECK(unit.y_coefficient() == 0.0);

    CHECK_THROWS_AS(Envelope(gains(rounded(0.0489), 3.0, 1.0), 1.0, 0.0), Error);
}

TEST_CASE("eISS check") {
    std::vector<double> t = {0.0, 1.0, 2.0};
    const std::vector<double> zeros = {0.0, 0.0, 0.0};
    const EissCheck at_rest = eiss_bound_check(t, zeros, zeros, 0.5, 2.0);
    CHECK(at_rest.holds);
    CHECK(at_rest.max_relative_violation == 0.0);

    // z(t) = e^{-t}: holds for omega <= 1 with no input, fails for omega = 2.
    std::vector<double> z = {1.0, std::exp(-1.0), std::exp(-2.0)};
    CHECK(eiss_bound_check(t, z, zeros, 1.0, 1.0).holds);
    const EissCheck fast = eiss_bound_check(t, z, zeros, 2.0, 1.0);
    CHECK_FALSE(fast.holds);
    CHECK(fast.worst_sample == 2);
    CHECK(fast.max_relative_violation == doctest::Approx(std::exp(-2.0) / std::exp(-4.0) - 1.0));
    CHECK(eiss_bound_check(t, z, zeros, 2.0, 1.0, 100.0).holds);

    // Input sup carries forward.
    const std::vector<double> u = {0.0, 1.0, 0.0};
    const std::vector<double> z2 = {0.0, 0.4, 0.4};
    CHECK(eiss_bound_check(t, z2, u, 1.0, 0.5).holds);
    CHECK_FALSE(eiss_bound_check(t, z2, u, 1.0, 0.3).holds);

    CHECK_THROWS_AS((void)eiss_bound_check({}, zeros, zeros, 1.0, 1.0), Error);
    CHECK_THROWS_AS((void)eiss_bound_check(t, std::vector<double>{1.0}, zeros, 1.0, 1.0), Error);
}

TEST_CASE("certificate reports") {
    const Certificate cert = gains(rounded(0.2872), 3.0, 1.0);
    const std::string txt = certificate_to_text(cert);
    CHECK(txt.find("small-gain: holds") != std::string::npos);
    const std::string js = certificate_to_json(cert);
    for (const char* key : {"\"omega1\"", "\"gamma2\"", "\"gain_product\"", "\"beta_min\"", "\"lambda2\""}) {
        CHECK(js.find(key) != std::string::npos);
    }
}
