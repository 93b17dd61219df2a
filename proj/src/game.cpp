#include "aggnash/game.hpp"

#include "aggnash/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aggnash {

namespace {

void check_profile(const AggregativeGame& game, const Vector& x, const char* what) {
    if (x.size() != game.profile_dim()) {
        throw Error("game", std::string(what) + " has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(game.profile_dim()));
    }
}

void check_estimates(const AggregativeGame& game, const Vector& eta) {
    const Eigen::Index expected = game.aggregate_dim() * static_cast<Eigen::Index>(game.players());
    if (eta.size() != expected) {
        throw Error("game", "eta has dimension " + std::to_string(eta.size()) + ", expected " +
                                std::to_string(expected));
    }
}

}  // namespace

AggregativeGame::AggregativeGame(std::vector<Eigen::Index> player_dims, Eigen::Index aggregate_dim)
    : dims_(std::move(player_dims)), m_(aggregate_dim) {
    if (dims_.empty()) {
        throw Error("game", "a game needs at least one player");
    }
    if (m_ <= 0) {
        throw Error("game", "aggregate dimension must be positive");
    }
    offsets_.reserve(dims_.size() + 1);
    offsets_.push_back(0);
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (dims_[i] <= 0) {
            throw Error("game", "player " + std::to_string(i) + " has nonpositive dimension");
        }
        offsets_.push_back(offsets_.back() + dims_[i]);
    }
}

double AggregativeGame::cost(std::size_t, const Vector&, const Vector&) const {
    throw Error("game", "this game does not provide cost evaluators");
}

Vector contributions(const AggregativeGame& game, const Vector& x) {
    check_profile(game, x, "profile");
    const Eigen::Index m = game.aggregate_dim();
    Vector phi(m * static_cast<Eigen::Index>(game.players()));
    for (std::size_t i = 0; i < game.players(); ++i) {
        Vector p = game.contribution(i, game.block(x, i));
        if (p.size() != m) {
            throw Error("game", "contribution of player " + std::to_string(i) +
                                    " has dimension " + std::to_string(p.size()));
        }
        phi.segment(static_cast<Eigen::Index>(i) * m, m) = p;
    }
    return phi;
}

Vector aggregate(const AggregativeGame& game, const Vector& x) {
    const Vector phi = contributions(game, x);
    const Eigen::Index m = game.aggregate_dim();
    Vector sigma = Vector::Zero(m);
    for (std::size_t i = 0; i < game.players(); ++i) {
        sigma += phi.segment(static_cast<Eigen::Index>(i) * m, m);
    }
    return sigma / static_cast<double>(game.players());
}

Vector gradient_map(const AggregativeGame& game, const Vector& x, const Vector& eta) {
    check_profile(game, x, "profile");
    check_estimates(game, eta);
    const Eigen::Index m = game.aggregate_dim();
    Vector g(x.size());
    for (std::size_t i = 0; i < game.players(); ++i) {
        Vector gi = game.local_gradient(i, game.block(x, i),
                                        eta.segment(static_cast<Eigen::Index>(i) * m, m));
        if (gi.size() != game.player_dim(i)) {
            throw Error("game", "gradient of player " + std::to_string(i) + " has dimension " +
                                    std::to_string(gi.size()));
        }
        game.block(g, i) = gi;
    }
    return g;
}

Vector pseudo_gradient(const AggregativeGame& game, const Vector& x) {
    const Vector sigma = aggregate(game, x);
    return gradient_map(game, x, sigma.replicate(static_cast<Eigen::Index>(game.players()), 1));
}

Vector project(const AggregativeGame& game, const Vector& x) {
    check_profile(game, x, "profile");
    Vector p(x.size());
    for (std::size_t i = 0; i < game.players(); ++i) {
        game.block(p, i) = game.strategy_set(i).project(game.block(x, i));
    }
    return p;
}

double feasibility_violation(const AggregativeGame& game, const Vector& x) {
    check_profile(game, x, "profile");
    double worst = 0.0;
    for (std::size_t i = 0; i < game.players(); ++i) {
        worst = std::max(worst, game.strategy_set(i).distance(game.block(x, i)));
    }
    return worst;
}

double player_cost(const AggregativeGame& game, std::size_t i, const Vector& x) {
    return game.cost(i, game.block(x, i), aggregate(game, x));
}

GameConstants sample_constants(const AggregativeGame& game, std::size_t sample_count,
                               std::uint64_t seed) {
    if (sample_count == 0) {
        throw Error("game", "constant estimation needs at least one sample");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto n_players = static_cast<Eigen::Index>(game.players());

    GameConstants k;
    k.mu = std::numeric_limits<double>::infinity();
    k.estimated = true;
    for (std::size_t s = 0; s < sample_count; ++s) {
        const Vector x = sample_profile(game, rng);
        const Vector y = sample_profile(game, rng);
        const Vector dx = x - y;
        const double dx2 = dx.squaredNorm();
        if (dx2 == 0.0) {
            continue;
        }
        k.mu = std::min(k.mu, dx.dot(pseudo_gradient(game, x) - pseudo_gradient(game, y)) / dx2);

        // eta around feasible aggregates; the perturbation exercises off-consensus estimates.
        Vector eta = aggregate(game, sample_profile(game, rng)).replicate(n_players, 1);
        for (Eigen::Index r = 0; r < eta.size(); ++r) {
            eta[r] += 0.1 * gauss(rng);
        }
        Vector eta2 = eta;
        for (Eigen::Index r = 0; r < eta2.size(); ++r) {
            eta2[r] += gauss(rng);
        }
        const Vector gx = gradient_map(game, x, eta);
        k.kappa1 = std::max(k.kappa1, (gx - gradient_map(game, y, eta)).norm() / std::sqrt(dx2));
        k.kappa2 = std::max(k.kappa2,
                            (gx - gradient_map(game, x, eta2)).norm() / (eta - eta2).norm());

        for (std::size_t i = 0; i < game.players(); ++i) {
            const Vector xi = game.block(x, i);
            const Vector yi = game.block(y, i);
            const double d = (xi - yi).norm();
            if (d > 0.0) {
                k.kappa3 = std::max(
                    k.kappa3, (game.contribution(i, xi) - game.contribution(i, yi)).norm() / d);
            }
        }
    }
    if (!std::isfinite(k.mu)) {
        throw Error("game", "all sampled pairs coincide; strategy sets are single points");
    }
    return k;
}

GameConstants estimate_constants(const AggregativeGame& game, std::size_t sample_count,
                                 std::uint64_t seed) {
    if (auto exact = game.analytic_constants()) {
        return *exact;
    }
    return sample_constants(game, sample_count, seed);
}

// --- QuadraticCournotGame ---------------------------------------------------

QuadraticCournotGame::QuadraticCournotGame(Vector a, Vector b, Vector c, Vector lower, Vector upper)
    : AggregativeGame(std::vector<Eigen::Index>(static_cast<std::size_t>(a.size()), 1), 1),
      a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), lower_(std::move(lower)),
      upper_(std::move(upper)) {
    const Eigen::Index n = a_.size();
    if (b_.size() != n || c_.size() != n || lower_.size() != n || upper_.size() != n) {
        throw Error("game", "quadratic_cournot arrays a, b, c, lower, upper must share a length");
    }
    if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite()) {
        throw Error("game", "quadratic_cournot coefficients must be finite");
    }
    sets_.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        sets_.push_back(StrategySet::interval(lower_[i], upper_[i]));
    }
}

QuadraticCournotGame QuadraticCournotGame::builtin_sec5(std::size_t players) {
    const auto n = static_cast<Eigen::Index>(players);
    Vector a(n), b(n), c(n), lo(n), hi(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double i = static_cast<double>(k + 1);
        a[k] = 0.1 + 0.01 * std::sin(i);
        b[k] = (i - std::log(i)) / (1.0 + i + i * i * i);
        c[k] = 0.003 * std::cos(i);
        lo[k] = -1.0 - 1.0 / (2.0 * i);
        hi[k] = i / 10.0 + 1.0 / std::sqrt(i);
    }
    return QuadraticCournotGame(a, b, c, lo, hi);
}

Vector QuadraticCournotGame::contribution(std::size_t, const Vector& xi) const { return xi; }

Matrix QuadraticCournotGame::contribution_jacobian(std::size_t, const Vector&) const {
    return Matrix::Identity(1, 1);
}

Vector QuadraticCournotGame::local_gradient(std::size_t i, const Vector& xi,
                                            const Vector& eta_i) const {
    const auto k = static_cast<Eigen::Index>(i);
    const double inv_n = 1.0 / static_cast<double>(players());
    return Vector::Constant(1, 2.0 * a_[k] * xi[0] + b_[k] + c_[k] * eta_i[0] +
                                   c_[k] * xi[0] * inv_n);
}

double QuadraticCournotGame::cost(std::size_t i, const Vector& xi, const Vector& sigma) const {
    const auto k = static_cast<Eigen::Index>(i);
    return a_[k] * xi[0] * xi[0] + b_[k] * xi[0] + c_[k] * xi[0] * sigma[0];
}

Matrix QuadraticCournotGame::jacobian() const {
    const Eigen::Index n = a_.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    Matrix m = (c_ * inv_n).replicate(1, n);
    m.diagonal() += 2.0 * a_ + c_ * inv_n;
    return m;
}

std::optional<GameConstants> QuadraticCournotGame::analytic_constants() const {
    const double inv_n = 1.0 / static_cast<double>(players());
    // dG/dx is diagonal with entries 2a_i + c_i/N, dG/deta is diag(c), phi_i is the identity.
    const Vector gx = 2.0 * a_ + c_ * inv_n;
    GameConstants k;
    k.kappa1 = gx.cwiseAbs().maxCoeff();
    k.kappa2 = c_.cwiseAbs().maxCoeff();
    k.kappa3 = 1.0;
    // Monotonicity of G in x minus the aggregation coupling bound kappa2*kappa3.
    k.mu = gx.minCoeff() - k.kappa2 * k.kappa3;
    const Matrix m = jacobian();
    const Matrix sym = 0.5 * (m + m.transpose());
    k.mu_exact = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly)
                     .eigenvalues()
                     .minCoeff();
    return k;
}

// --- CallbackGame -------------------------------------------------------------

std::vector<Eigen::Index> CallbackGame::dims_of(const std::vector<StrategySet>& sets) {
    std::vector<Eigen::Index> dims;
    dims.reserve(sets.size());
    for (const auto& s : sets) {
        dims.push_back(s.dim());
    }
    return dims;
}

CallbackGame::CallbackGame(std::vector<StrategySet> sets, Eigen::Index aggregate_dim,
                           Contribution phi, Jacobian phi_jacobian, Gradient gradient, Cost cost)
    : AggregativeGame(dims_of(sets), aggregate_dim), sets_(std::move(sets)), phi_(std::move(phi)),
      jac_(std::move(phi_jacobian)), grad_(std::move(gradient)), cost_(std::move(cost)) {
    if (!phi_ || !jac_ || !grad_) {
        throw Error("game", "callback game needs contribution, jacobian and gradient callables");
    }
}

double CallbackGame::cost(std::size_t i, const Vector& xi, const Vector& sigma) const {
    if (!cost_) {
        return AggregativeGame::cost(i, xi, sigma);
    }
    return cost_(i, xi, sigma);
}

}  // namespace aggnash
