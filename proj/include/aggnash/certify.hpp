#pragma once

#include "aggnash/game.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aggnash {

/// Game constants together with the graph's lambda2.
/// kappa2 may be zero (a game without aggregation coupling); everything else
/// must be strictly positive.
class Constants {
public:
    Constants(double mu, double kappa1, double kappa2, double kappa3, double lambda2);
    static Constants from_game(const GameConstants& k, double lambda2);

    [[nodiscard]] double mu() const { return mu_; }
    [[nodiscard]] double kappa1() const { return kappa1_; }
    [[nodiscard]] double kappa2() const { return kappa2_; }
    [[nodiscard]] double kappa3() const { return kappa3_; }
    [[nodiscard]] double lambda2() const { return lambda2_; }
    /// kappa1 + kappa2 * kappa3, the Lipschitz constant of the pseudo-gradient.
    [[nodiscard]] double kappa() const { return kappa1_ + kappa2_ * kappa3_; }

private:
    double mu_, kappa1_, kappa2_, kappa3_, lambda2_;
};

/// Admissible parameter region: 0 < alpha < alpha_max and beta > beta_min(alpha).
struct ParameterBounds {
    Constants constants;
    double alpha_max;

    /// 2 k2 k3 (2 + 2 alpha k + alpha mu) / (lambda2 (2 mu - alpha k^2)).
    /// Throws for alpha outside (0, alpha_max).
    [[nodiscard]] double beta_min(double alpha) const;
};

[[nodiscard]] ParameterBounds parameter_bounds(const Constants& c);

/// Gains of the two interconnected subsystems and the small-gain verdict.
/// A failing verdict is a result, not an error.
struct Certificate {
    Constants constants;
    double alpha;
    double beta;

    double alpha_max;
    std::optional<double> beta_min;  // empty when alpha is inadmissible

    double omega1;  // x-subsystem decay rate
    double gamma1;  // x-subsystem gain from the tracking error
    double omega2;  // tracking subsystem decay rate
    double gamma2;  // tracking subsystem gain from the strategy error
    double gain_product;

    bool alpha_admissible;
    bool beta_admissible;
    bool small_gain;
};

/// Rejects nonpositive alpha or beta.
[[nodiscard]] Certificate gains(const Constants& c, double alpha, double beta);

/// Bound on sup_{tau <= t} ||x(tau) - x*||:
///   (x_err0 e^{-omega1 t} + gamma1 y_err0 e^{-omega2 t}) / (1 - gamma1 gamma2).
class Envelope {
public:
    /// Rejects certificates without the small-gain property.
    Envelope(const Certificate& cert, double x_err0, double y_err0);

    [[nodiscard]] double operator()(double t) const;

    [[nodiscard]] double x_coefficient() const { return x_coef_; }
    [[nodiscard]] double y_coefficient() const { return y_coef_; }
    [[nodiscard]] double omega1() const { return omega1_; }
    [[nodiscard]] double omega2() const { return omega2_; }

private:
    double x_coef_, y_coef_, omega1_, omega2_;
};

struct EissCheck {
    bool holds = true;
    double max_relative_violation = 0.0;
    double max_absolute_violation = 0.0;
    std::size_t worst_sample = 0;
};

/// Checks ||z(t_k) - z*|| <= ||z(0) - z*|| e^{-omega t_k} + gamma sup_{j<=k} ||u(t_j) - u*||
/// at every sample, given the error norms on a common time grid. `holds`
/// means the largest relative violation is within `relative_budget`.
[[nodiscard]] EissCheck eiss_bound_check(std::span<const double> times,
                                         std::span<const double> state_error,
                                         std::span<const double> input_error, double omega,
                                         double gamma, double relative_budget = 0.0);

/// Same check from sampled vectors and their reference points.
[[nodiscard]] EissCheck eiss_bound_check(std::span<const double> times,
                                         const std::vector<Vector>& state, const Vector& state_ref,
                                         const std::vector<Vector>& input, const Vector& input_ref,
                                         double omega, double gamma,
                                         double relative_budget = 0.0);

[[nodiscard]] std::string certificate_to_text(const Certificate& cert);
[[nodiscard]] std::string certificate_to_json(const Certificate& cert);

}  // namespace aggnash
