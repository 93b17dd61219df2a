#include "aggnash/analysis.hpp"
#include "aggnash/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace aggnash;

namespace {

ErrorSeries exponential(double c, double omega, double dt, std::size_t n) {
    ErrorSeries s;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        s.times.push_back(t);
        s.values.push_back(c * std::exp(-omega * t));
    }
    return s;
}

Certificate certified() { return gains(Constants(0.1770, 0.2199, 0.0030, 1.0, 0.2872), 3.0, 1.0); }
Certificate uncertified() { return gains(Constants(0.1770, 0.2199, 0.0030, 1.0, 0.0489), 3.0, 1.0); }

}  // namespace

TEST_CASE("exact exponential") {
    const RateFit fit = fit_rate(exponential(5.0, 0.3, 0.1, 1001));
    CHECK(fit.omega_hat == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.reliable);
    // Window [1e-8, 1e-2] of 5 e^{-0.3 t}.
    CHECK(fit.t_lo == doctest::Approx(std::log(500.0) / 0.3).epsilon(0.01));
    CHECK(fit.t_hi == doctest::Approx(std::log(5e8) / 0.3).epsilon(0.01));
}

TEST_CASE("rate recovered across scales") {
    for (double omega : {0.01, 0.1, 1.0, 10.0}) {
        const ErrorSeries s = exponential(1.0, omega, 0.05 / omega, 1000);
        const RateFit fit = fit_rate(s);
        CHECK(std::abs(fit.omega_hat - omega) <= 1e-9 * omega);
    }
}

TEST_CASE("fit is invariant to the error scale") {
    const ErrorSeries s = exponential(1.0, 0.4, 0.1, 1000);
    ErrorSeries scaled = s;
    for (double& v : scaled.values) {
        v *= 0.5;
    }
    CHECK(fit_rate(s).omega_hat == doctest::Approx(fit_rate(scaled).omega_hat).epsilon(1e-10));
}

TEST_CASE("oscillating error is flagged unreliable") {
    ErrorSeries s;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 400; ++k) {
        const double t = 0.1 * k;
        s.times.push_back(t);
        s.values.push_back(1e-4 * (1.5 + std::sin(3.0 * t)) * (0.2 + u(rng)));
    }
    const RateFit fit = fit_rate(s);
    CHECK_FALSE(fit.reliable);
    CHECK(compare_to_certificate(fit, certified()).verdict == RateVerdict::Inconclusive);
}

TEST_CASE("too few samples in the window") {
    const ErrorSeries s = exponential(1e-3, 1.0, 1.0, 15);
    CHECK_THROWS_WITH_AS((void)fit_rate(s), doctest::Contains("found"), Error);
    ErrorSeries bad = s;
    bad.values.pop_back();
    CHECK_THROWS_AS((void)fit_rate(bad), Error);
}

TEST_CASE("verdicts") {
    const Certificate cert = certified();
    const double rate = std::min(cert.omega1, cert.omega2);
    RateFit fit;
    fit.reliable = true;
    fit.r_squared = 1.0;

    fit.omega_hat = rate + 0.1;
    CHECK(compare_to_certificate(fit, cert).verdict == RateVerdict::CertificateConservative);
    fit.omega_hat = rate - 0.0005;
    CHECK(compare_to_certificate(fit, cert).verdict == RateVerdict::CertificateConservative);
    fit.omega_hat = rate - 0.05;
    CHECK(compare_to_certificate(fit, cert).verdict == RateVerdict::CertificateViolated);

    fit.omega_hat = 0.05;
    const RateComparison c = compare_to_certificate(fit, uncertified());
    CHECK(c.verdict == RateVerdict::UncertifiedConvergence);
    CHECK(c.message.find("uncertified") != std::string::npos);
    CHECK(std::string(to_string(c.verdict)) == "uncertified-convergence");
}

TEST_CASE("error series and rate CSV") {
    Trajectory traj;
    traj.times = {0.0, 1.0};
    traj.x = {Vector::Constant(2, 1.0), Vector::Constant(2, 0.0)};
    const ErrorSeries s = error_series(traj, Vector::Zero(2));
    CHECK(s.values[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.values[1] == 0.0);
    CHECK_THROWS_AS((void)error_series(traj, Vector::Zero(3)), Error);

    std::ostringstream plain;
    write_rate_csv(s, nullptr, plain);
    CHECK(plain.str().rfind("t,e,envelope\n0,", 0) == 0);
    const Envelope env(certified(), 1.0, 0.0);
    std::ostringstream with;
    write_rate_csv(s, &env, with);
    CHECK(with.str().find(",1.5") != std::string::npos);
}
