#include "aggnash/certify.hpp"

#include "aggnash/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace aggnash {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error("certify", std::string(name) + " must be positive and finite");
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

Constants::Constants(double mu, double kappa1, double kappa2, double kappa3, double lambda2)
    : mu_(mu), kappa1_(kappa1), kappa2_(kappa2), kappa3_(kappa3), lambda2_(lambda2) {
    require_positive(mu, "mu");
    require_positive(kappa1, "kappa1");
    require_positive(kappa3, "kappa3");
    require_positive(lambda2, "lambda2");
    if (!(kappa2 >= 0.0) || !std::isfinite(kappa2)) {
        throw Error("certify", "kappa2 must be nonnegative and finite");
    }
}

Constants Constants::from_game(const GameConstants& k, double lambda2) {
    return {k.mu, k.kappa1, k.kappa2, k.kappa3, lambda2};
}

ParameterBounds parameter_bounds(const Constants& c) {
    return {c, 2.0 * c.mu() / (c.kappa() * c.kappa())};
}

double ParameterBounds::beta_min(double alpha) const {
    if (!(alpha > 0.0 && alpha < alpha_max)) {
        throw Error("certify", "beta_min requested for alpha = " + fmt(alpha) +
                                   " outside (0, " + fmt(alpha_max) + ")");
    }
    const Constants& c = constants;
    const double k = c.kappa();
    return 2.0 * c.kappa2() * c.kappa3() * (2.0 + 2.0 * alpha * k + alpha * c.mu()) /
           (c.lambda2() * (2.0 * c.mu() - alpha * k * k));
}

Certificate gains(const Constants& c, double alpha, double beta) {
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
    const ParameterBounds bounds = parameter_bounds(c);
    const double mu = c.mu();
    const double k = c.kappa();
    const double k23 = c.kappa2() * c.kappa3();

    Certificate cert{c,   alpha, beta, bounds.alpha_max, std::nullopt, 0.0, 0.0, 0.0,
                     0.0, 0.0,   false, false, false};
    cert.alpha_admissible = alpha < bounds.alpha_max;
    if (cert.alpha_admissible) {
        cert.beta_min = bounds.beta_min(alpha);
        cert.beta_admissible = beta > *cert.beta_min;
    }

    const double margin = 2.0 * mu - alpha * k * k;
    cert.omega1 = (2.0 * alpha * mu - alpha * alpha * k * k) / (2.0 + alpha * k);
    cert.gamma1 = c.kappa2() * (2.0 + alpha * k) / margin;
    cert.omega2 = beta * c.lambda2() - alpha * k23;
    cert.gamma2 = c.kappa3() * (2.0 + alpha * k) / cert.omega2;
    cert.gain_product = cert.gamma1 * cert.gamma2;
    cert.small_gain = cert.omega1 > 0.0 && cert.omega2 > 0.0 && cert.gain_product >= 0.0 &&
                      cert.gain_product < 1.0;
    return cert;
}

Envelope::Envelope(const Certificate& cert, double x_err0, double y_err0)
    : omega1_(cert.omega1), omega2_(cert.omega2) {
    if (!cert.small_gain) {
        throw Error("certify", "no envelope: small-gain condition fails (gamma1*gamma2 = " +
                                   fmt(cert.gain_product) + ")");
    }
    if (!(x_err0 >= 0.0) || !(y_err0 >= 0.0)) {
        throw Error("certify", "initial errors must be nonnegative");
    }
    const double inv = 1.0 / (1.0 - cert.gain_product);
    x_coef_ = x_err0 * inv;
    y_coef_ = cert.gamma1 * y_err0 * inv;
}

double Envelope::operator()(double t) const {
    return x_coef_ * std::exp(-omega1_ * t) + y_coef_ * std::exp(-omega2_ * t);
}

EissCheck eiss_bound_check(std::span<const double> times, std::span<const double> state_error,
                           std::span<const double> input_error, double omega, double gamma,
                           double relative_budget) {
    if (times.empty()) {
        throw Error("certify", "eISS check on an empty trajectory");
    }
    if (state_error.size() != times.size() || input_error.size() != times.size()) {
        throw Error("certify", "eISS check series lengths differ");
    }
    EissCheck out;
    const double z0 = state_error[0];
    const double t0 = times[0];
    double input_sup = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        input_sup = std::max(input_sup, input_error[k]);
        const double bound = z0 * std::exp(-omega * (times[k] - t0)) + gamma * input_sup;
        const double excess = state_error[k] - bound;
        if (excess <= 0.0) {
            continue;
        }
        const double rel = bound > 0.0 ? excess / bound : std::numeric_limits<double>::infinity();
        out.max_absolute_violation = std::max(out.max_absolute_violation, excess);
        if (rel > out.max_relative_violation) {
            out.max_relative_violation = rel;
            out.worst_sample = k;
        }
    }
    out.holds = out.max_relative_violation <= relative_budget;
    return out;
}

EissCheck eiss_bound_check(std::span<const double> times, const std::vector<Vector>& state,
                           const Vector& state_ref, const std::vector<Vector>& input,
                           const Vector& input_ref, double omega, double gamma,
                           double relative_budget) {
    std::vector<double> z(state.size());
    std::vector<double> u(input.size());
    std::transform(state.begin(), state.end(), z.begin(),
                   [&](const Vector& s) { return (s - state_ref).norm(); });
    std::transform(input.begin(), input.end(), u.begin(),
                   [&](const Vector& s) { return (s - input_ref).norm(); });
    return eiss_bound_check(times, z, u, omega, gamma, relative_budget);
}

std::string certificate_to_text(const Certificate& cert) {
    const Constants& c = cert.constants;
    std::ostringstream os;
    os << "constants: mu=" << fmt(c.mu()) << " kappa1=" << fmt(c.kappa1())
       << " kappa2=" << fmt(c.kappa2()) << " kappa3=" << fmt(c.kappa3())
       << " kappa=" << fmt(c.kappa()) << " lambda2=" << fmt(c.lambda2()) << "\n";
    os << "parameters: alpha=" << fmt(cert.alpha) << " beta=" << fmt(cert.beta) << "\n";
    os << "alpha_max=" << fmt(cert.alpha_max)
       << (cert.alpha_admissible ? " (alpha admissible)" : " (alpha NOT admissible)") << "\n";
    if (cert.beta_min) {
        os << "beta_min=" << fmt(*cert.beta_min)
           << (cert.beta_admissible ? " (beta admissible)" : " (beta NOT admissible)") << "\n";
    } else {
        os << "beta_min undefined for this alpha\n";
    }
    os << "omega1=" << fmt(cert.omega1) << " gamma1=" << fmt(cert.gamma1) << "\n";
    os << "omega2=" << fmt(cert.omega2) << " gamma2=" << fmt(cert.gamma2) << "\n";
    os << "gamma1*gamma2=" << fmt(cert.gain_product) << "\n";
    os << "small-gain: " << (cert.small_gain ? "holds" : "violated") << "\n";
    return os.str();
}

std::string certificate_to_json(const Certificate& cert) {
    const Constants& c = cert.constants;
    nlohmann::json j = {
        {"constants",
         {{"mu", c.mu()},
          {"kappa1", c.kappa1()},
          {"kappa2", c.kappa2()},
          {"kappa3", c.kappa3()},
          {"kappa", c.kappa()},
          {"lambda2", c.lambda2()}}},
        {"alpha", cert.alpha},
        {"beta", cert.beta},
        {"alpha_max", cert.alpha_max},
        {"beta_min", cert.beta_min ? nlohmann::json(*cert.beta_min) : nlohmann::json(nullptr)},
        {"omega1", cert.omega1},
        {"gamma1", cert.gamma1},
        {"omega2", cert.omega2},
        {"gamma2", cert.gamma2},
        {"gain_product", cert.gain_product},
        {"alpha_admissible", cert.alpha_admissible},
        {"beta_admissible", cert.beta_admissible},
        {"small_gain", cert.small_gain},
    };
    return j.dump(2) + "\n";
}

}  // namespace aggnash
