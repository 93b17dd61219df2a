#pragma once

#include "aggnash/certify.hpp"
#include "aggnash/dynamics.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aggnash {

struct ErrorSeries {
    std::vector<double> times;
    std::vector<double> values;
};

/// e(t_k) = ||x(t_k) - x*||.
[[nodiscard]] ErrorSeries error_series(const Trajectory& traj, const Vector& reference);

/// Log-linear fit of an error tail.
struct RateFit {
    double omega_hat = 0.0;  // 1/time
    double t_lo = 0.0;
    double t_hi = 0.0;
    double r_squared = 0.0;
    std::size_t samples = 0;
    /// R^2 >= 0.95; omega_hat is only meaningful when set.
    bool reliable = false;
};

struct FitWindow {
    double floor = 1e-8;
    double ceiling = 1e-2;
    std::size_t min_samples = 20;
};

/// Least-squares slope of ln e(t) over the samples with floor <= e <= ceiling;
/// omega_hat is minus the slope. Rejects windows with fewer than
/// `min_samples` samples.
[[nodiscard]] RateFit fit_rate(const ErrorSeries& series, const FitWindow& window = {});

enum class RateVerdict {
    CertificateConservative,  // small gain holds, observed decay at least certified
    CertificateViolated,      // small gain holds, observed decay slower: a bug indicator
    UncertifiedConvergence,   // small gain fails, trajectory still converges
    Inconclusive,             // fit unreliable
};

[[nodiscard]] const char* to_string(RateVerdict v);

struct RateComparison {
    RateVerdict verdict = RateVerdict::Inconclusive;
    double omega_hat = 0.0;
    double certified_rate = 0.0;  // min(omega1, omega2)
    std::string message;
};

[[nodiscard]] RateComparison compare_to_certificate(const RateFit& fit, const Certificate& cert,
                                                    double tolerance = 1e-3);

/// Plot-ready CSV: t, e, envelope (blank when no envelope).
void write_rate_csv(const ErrorSeries& series, const Envelope* envelope, std::ostream& out);

[[nodiscard]] std::string rate_report_to_json(const RateFit& fit, const RateComparison& cmp);

}  // namespace aggnash
