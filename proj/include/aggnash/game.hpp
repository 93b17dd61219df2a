#pragma once

#include "aggnash/strategy_set.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace aggnash {

/// Monotonicity and Lipschitz constants of a game.
///
/// `mu` lower-bounds the strong monotonicity of the pseudo-gradient on the
/// feasible set, `kappa1`/`kappa2` bound the Lipschitz constants of G in x and
/// in eta, `kappa3` bounds the Lipschitz constant of every contribution map.
struct GameConstants {
    double mu = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
    /// Smallest eigenvalue of the symmetrized pseudo-gradient Jacobian, when
    /// the game is affine. Never smaller than `mu`.
    std::optional<double> mu_exact;
    /// True when the values come from random sampling rather than formulas.
    bool estimated = false;
};

/// N-player aggregative game. Player i decides x_i in a convex set of
/// dimension n_i; the aggregate is sigma(x) = (1/N) sum_i phi_i(x_i) in R^m.
///
/// Profiles are stacked column vectors of total length n = sum_i n_i;
/// aggregate estimates eta are stacked as N blocks of length m.
/// Implementations must be immutable and their evaluators pure.
class AggregativeGame {
public:
    AggregativeGame(std::vector<Eigen::Index> player_dims, Eigen::Index aggregate_dim);
    virtual ~AggregativeGame() = default;

    [[nodiscard]] std::size_t players() const { return dims_.size(); }
    [[nodiscard]] Eigen::Index player_dim(std::size_t i) const { return dims_.at(i); }
    [[nodiscard]] Eigen::Index aggregate_dim() const { return m_; }
    [[nodiscard]] Eigen::Index profile_dim() const { return offsets_.back(); }
    [[nodiscard]] Eigen::Index offset(std::size_t i) const { return offsets_.at(i); }

    [[nodiscard]] auto block(const Vector& x, std::size_t i) const {
        return x.segment(offsets_[i], dims_[i]);
    }
    [[nodiscard]] auto block(Vector& x, std::size_t i) const {
        return x.segment(offsets_[i], dims_[i]);
    }

    [[nodiscard]] virtual const StrategySet& strategy_set(std::size_t i) const = 0;

    /// phi_i(x_i) in R^m.
    [[nodiscard]] virtual Vector contribution(std::size_t i, const Vector& xi) const = 0;
    /// Jacobian of phi_i, shape m x n_i.
    [[nodiscard]] virtual Matrix contribution_jacobian(std::size_t i, const Vector& xi) const = 0;
    /// G_i(x_i, eta_i): player i's partial gradient with the aggregate replaced by eta_i.
    [[nodiscard]] virtual Vector local_gradient(std::size_t i, const Vector& xi,
                                                const Vector& eta_i) const = 0;

    /// theta_i(x_i, sigma). Only needed for best-response verification.
    [[nodiscard]] virtual bool has_cost() const { return false; }
    [[nodiscard]] virtual double cost(std::size_t i, const Vector& xi, const Vector& sigma) const;

    /// Closed-form constants if the family admits them.
    [[nodiscard]] virtual std::optional<GameConstants> analytic_constants() const {
        return std::nullopt;
    }

private:
    std::vector<Eigen::Index> dims_;
    std::vector<Eigen::Index> offsets_;
    Eigen::Index m_;
};

using GamePtr = std::shared_ptr<const AggregativeGame>;

// Profile-level operations. All reject dimension mismatches with Error("game").

[[nodiscard]] Vector aggregate(const AggregativeGame& game, const Vector& x);
/// Stacked phi(x) = col(phi_1(x_1), ..., phi_N(x_N)).
[[nodiscard]] Vector contributions(const AggregativeGame& game, const Vector& x);
[[nodiscard]] Vector gradient_map(const AggregativeGame& game, const Vector& x, const Vector& eta);
/// F(x) = G(x, 1_N (x) sigma(x)).
[[nodiscard]] Vector pseudo_gradient(const AggregativeGame& game, const Vector& x);

[[nodiscard]] Vector project(const AggregativeGame& game, const Vector& x);
/// Largest per-player distance from x_i to its strategy set.
[[nodiscard]] double feasibility_violation(const AggregativeGame& game, const Vector& x);
/// Player i's cost J_i(x) = theta_i(x_i, sigma(x)).
[[nodiscard]] double player_cost(const AggregativeGame& game, std::size_t i, const Vector& x);

/// Analytic constants when available, otherwise sampled over random
/// feasible pairs (mu as the smallest observed monotonicity ratio, kappas as
/// the largest observed Lipschitz ratios) and flagged `estimated`.
[[nodiscard]] GameConstants estimate_constants(const AggregativeGame& game,
                                               std::size_t sample_count, std::uint64_t seed);
/// Always samples, even when a closed form exists.
[[nodiscard]] GameConstants sample_constants(const AggregativeGame& game,
                                             std::size_t sample_count, std::uint64_t seed);

/// Random point of the strategy set. Unbounded sides are sampled within
/// +-`spread` of the set's reference point.
template <class Rng>
Vector sample_point(const StrategySet& set, Rng& rng, double spread = 10.0);

/// Random feasible profile.
template <class Rng>
Vector sample_profile(const AggregativeGame& game, Rng& rng, double spread = 10.0);

/// Quadratic Cournot game with scalar decisions and phi_i(x_i) = x_i:
/// theta_i(x_i, sigma) = a_i x_i^2 + b_i x_i + c_i x_i sigma on [lower_i, upper_i].
class QuadraticCournotGame final : public AggregativeGame {
public:
    QuadraticCournotGame(Vector a, Vector b, Vector c, Vector lower, Vector upper);

    /// The 20-player instance with a_i = 0.1 + 0.01 sin(i),
    /// b_i = (i - ln i)/(1 + i + i^3), c_i = 0.003 cos(i),
    /// Omega_i = [-1 - 1/(2i), i/10 + 1/sqrt(i)], i = 1..players.
    static QuadraticCournotGame builtin_sec5(std::size_t players = 20);

    const StrategySet& strategy_set(std::size_t i) const override { return sets_.at(i); }
    Vector contribution(std::size_t i, const Vector& xi) const override;
    Matrix contribution_jacobian(std::size_t i, const Vector& xi) const override;
    Vector local_gradient(std::size_t i, const Vector& xi, const Vector& eta_i) const override;
    bool has_cost() const override { return true; }
    double cost(std::size_t i, const Vector& xi, const Vector& sigma) const override;
    std::optional<GameConstants> analytic_constants() const override;

    /// F(x) = M x + b.
    [[nodiscard]] Matrix jacobian() const;
    [[nodiscard]] const Vector& a() const { return a_; }
    [[nodiscard]] const Vector& b() const { return b_; }
    [[nodiscard]] const Vector& c() const { return c_; }
    [[nodiscard]] const Vector& lower() const { return lower_; }
    [[nodiscard]] const Vector& upper() const { return upper_; }

private:
    Vector a_, b_, c_, lower_, upper_;
    std::vector<StrategySet> sets_;
};

/// Game assembled from callables; used for non-quadratic and m > 1 cases.
class CallbackGame final : public AggregativeGame {
public:
    using Contribution = std::function<Vector(std::size_t, const Vector&)>;
    using Jacobian = std::function<Matrix(std::size_t, const Vector&)>;
    using Gradient = std::function<Vector(std::size_t, const Vector&, const Vector&)>;
    using Cost = std::function<double(std::size_t, const Vector&, const Vector&)>;

    CallbackGame(std::vector<StrategySet> sets, Eigen::Index aggregate_dim, Contribution phi,
                 Jacobian phi_jacobian, Gradient gradient, Cost cost = {});

    const StrategySet& strategy_set(std::size_t i) const override { return sets_.at(i); }
    Vector contribution(std::size_t i, const Vector& xi) const override { return phi_(i, xi); }
    Matrix contribution_jacobian(std::size_t i, const Vector& xi) const override {
        return jac_(i, xi);
    }
    Vector local_gradient(std::size_t i, const Vector& xi, const Vector& eta_i) const override {
        return grad_(i, xi, eta_i);
    }
    bool has_cost() const override { return static_cast<bool>(cost_); }
    double cost(std::size_t i, const Vector& xi, const Vector& sigma) const override;

private:
    static std::vector<Eigen::Index> dims_of(const std::vector<StrategySet>& sets);

    std::vector<StrategySet> sets_;
    Contribution phi_;
    Jacobian jac_;
    Gradient grad_;
    Cost cost_;
};

// ---------------------------------------------------------------------------

template <class Rng>
Vector sample_point(const StrategySet& set, Rng& rng, double spread) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Vector ref = set.reference_point();
    Vector p(set.dim());
    if (const auto* box = set.as_box()) {
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            const double lo = std::isfinite(box->lower[k]) ? box->lower[k] : ref[k] - spread;
            const double hi = std::isfinite(box->upper[k]) ? box->upper[k] : ref[k] + spread;
            p[k] = lo + (hi - lo) * unit(rng);
        }
        return p;
    }
    const auto* ball = set.as_ball();
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        p[k] = gauss(rng);
    }
    const double n = p.norm();
    const double r = ball->radius * std::pow(unit(rng), 1.0 / static_cast<double>(p.size()));
    return n > 0.0 ? Vector(ball->center + p * (r / n)) : ball->center;
}

template <class Rng>
Vector sample_profile(const AggregativeGame& game, Rng& rng, double spread) {
    Vector x(game.profile_dim());
    for (std::size_t i = 0; i < game.players(); ++i) {
        game.block(x, i) = sample_point(game.strategy_set(i), rng, spread);
    }
    return x;
}

}  // namespace aggnash
