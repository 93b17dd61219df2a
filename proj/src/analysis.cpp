#include "aggnash/analysis.hpp"

#include "aggnash/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace aggnash {

ErrorSeries error_series(const Trajectory& traj, const Vector& reference) {
    ErrorSeries s;
    s.times = traj.times;
    s.values.reserve(traj.size());
    for (const Vector& x : traj.x) {
        if (x.size() != reference.size()) {
            throw Error("analysis", "reference dimension mismatch");
        }
        s.values.push_back((x - reference).norm());
    }
    return s;
}

RateFit fit_rate(const ErrorSeries& series, const FitWindow& window) {
    if (series.times.size() != series.values.size()) {
        throw Error("analysis", "error series times and values differ in length");
    }
    std::vector<double> t;
    std::vector<double> y;
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        const double e = series.values[k];
        if (e >= window.floor && e <= window.ceiling && e > 0.0) {
            t.push_back(series.times[k]);
            y.push_back(std::log(e));
        }
    }
    if (t.size() < std::max<std::size_t>(window.min_samples, 2)) {
        throw Error("analysis", "rate fit needs " + std::to_string(window.min_samples) +
                                    " samples in [" + std::to_string(window.floor) + ", " +
                                    std::to_string(window.ceiling) + "], found " +
                                    std::to_string(t.size()) + " of " +
                                    std::to_string(series.values.size()));
    }
    const auto n = static_cast<double>(t.size());
    double tm = 0.0;
    double ym = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        tm += t[k];
        ym += y[k];
    }
    tm /= n;
    ym /= n;
    double stt = 0.0;
    double sty = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        stt += (t[k] - tm) * (t[k] - tm);
        sty += (t[k] - tm) * (y[k] - ym);
        syy += (y[k] - ym) * (y[k] - ym);
    }
    if (stt == 0.0) {
        throw Error("analysis", "rate fit window spans a single time");
    }
    RateFit fit;
    const double slope = sty / stt;
    fit.omega_hat = -slope;
    fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
    fit.t_lo = *std::min_element(t.begin(), t.end());
    fit.t_hi = *std::max_element(t.begin(), t.end());
    fit.samples = t.size();
    fit.reliable = fit.r_squared >= 0.95;
    return fit;
}

const char* to_string(RateVerdict v) {
    switch (v) {
        case RateVerdict::CertificateConservative: return "conservative-certificate";
        case RateVerdict::CertificateViolated: return "certificate-violated";
        case RateVerdict::UncertifiedConvergence: return "uncertified-convergence";
        case RateVerdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

RateComparison compare_to_certificate(const RateFit& fit, const Certificate& cert,
                                      double tolerance) {
    RateComparison out;
    out.omega_hat = fit.omega_hat;
    out.certified_rate = std::min(cert.omega1, cert.omega2);
    char buf[200];
    if (!fit.reliable) {
        out.verdict = RateVerdict::Inconclusive;
        std::snprintf(buf, sizeof buf, "fit unreliable (R^2 = %.4f)", fit.r_squared);
    } else if (!cert.small_gain) {
        out.verdict = fit.omega_hat > 0.0 ? RateVerdict::UncertifiedConvergence
                                          : RateVerdict::Inconclusive;
        std::snprintf(buf, sizeof buf,
                      "uncertified convergence observed: omega_hat = %.4f, gamma1*gamma2 = %.4f",
                      fit.omega_hat, cert.gain_product);
    } else if (fit.omega_hat + tolerance >= out.certified_rate) {
        out.verdict = RateVerdict::CertificateConservative;
        std::snprintf(buf, sizeof buf, "omega_hat = %.4f >= certified min(omega1, omega2) = %.4f",
                      fit.omega_hat, out.certified_rate);
    } else {
        out.verdict = RateVerdict::CertificateViolated;
        std::snprintf(buf, sizeof buf,
                      "omega_hat = %.4f decays slower than certified %.4f while small gain holds",
                      fit.omega_hat, out.certified_rate);
    }
    out.message = buf;
    return out;
}

void write_rate_csv(const ErrorSeries& series, const Envelope* envelope, std::ostream& out) {
    out << "t,e,envelope\n";
    char buf[96];
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        const double t = series.times[k];
        if (envelope) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, series.values[k], (*envelope)(t));
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,\n", t, series.values[k]);
        }
        out << buf;
    }
}

std::string rate_report_to_json(const RateFit& fit, const RateComparison& cmp) {
    nlohmann::json j = {
        {"fit",
         {{"omega_hat", fit.omega_hat},
          {"t_lo", fit.t_lo},
          {"t_hi", fit.t_hi},
          {"r_squared", fit.r_squared},
          {"samples", fit.samples},
          {"reliable", fit.reliable}}},
        {"comparison",
         {{"verdict", to_string(cmp.verdict)},
          {"certified_rate", cmp.certified_rate},
          {"message", cmp.message}}},
    };
    return j.dump(2) + "\n";
}

}  // namespace aggnash
