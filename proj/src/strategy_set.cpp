#include "aggnash/strategy_set.hpp"

#include "aggnash/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aggnash {

StrategySet StrategySet::box(Vector lower, Vector upper) {
    if (lower.size() != upper.size() || lower.size() == 0) {
        throw Error("game", "box bounds must be nonempty and of equal length");
    }
    for (Eigen::Index k = 0; k < lower.size(); ++k) {
        if (std::isnan(lower[k]) || std::isnan(upper[k]) || lower[k] > upper[k]) {
            throw Error("game", "empty box: lower[" + std::to_string(k) + "] > upper[" +
                                    std::to_string(k) + "]");
        }
    }
    return StrategySet(Box{std::move(lower), std::move(upper)});
}

StrategySet StrategySet::interval(double lower, double upper) {
    return box(Vector::Constant(1, lower), Vector::Constant(1, upper));
}

StrategySet StrategySet::unbounded(Eigen::Index dim) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return box(Vector::Constant(dim, -inf), Vector::Constant(dim, inf));
}

StrategySet StrategySet::ball(Vector center, double radius) {
    if (center.size() == 0 || !(radius >= 0.0) || !std::isfinite(radius)) {
        throw Error("game", "ball needs a nonempty center and a finite radius >= 0");
    }
    return StrategySet(Ball{std::move(center), radius});
}

Eigen::Index StrategySet::dim() const {
    return std::visit([](const auto& s) -> Eigen::Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
            return s.lower.size();
        } else {
            return s.center.size();
        }
    }, shape_);
}

Vector StrategySet::project(const Vector& v) const {
    if (v.size() != dim()) {
        throw Error("game", "projection dimension mismatch");
    }
    if (const auto* b = as_box()) {
        return v.cwiseMax(b->lower).cwiseMin(b->upper);
    }
    const auto& ball = std::get<Ball>(shape_);
    const Vector d = v - ball.center;
    const double r = d.norm();
    if (r <= ball.radius) {
        return v;
    }
    return ball.center + d * (ball.radius / r);
}

double StrategySet::distance(const Vector& v) const { return (v - project(v)).norm(); }

bool StrategySet::contains(const Vector& v, double tol) const {
    if (const auto* b = as_box()) {
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            if (v[k] < b->lower[k] - tol || v[k] > b->upper[k] + tol) {
                return false;
            }
        }
        return v.size() == b->lower.size();
    }
    return distance(v) <= tol;
}

bool StrategySet::is_bounded() const {
    if (const auto* b = as_box()) {
        return b->lower.allFinite() && b->upper.allFinite();
    }
    return true;
}

Vector StrategySet::reference_point() const {
    if (const auto* b = as_box()) {
        Vector p(b->lower.size());
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            const double lo = b->lower[k];
            const double hi = b->upper[k];
            if (std::isfinite(lo) && std::isfinite(hi)) {
                p[k] = 0.5 * (lo + hi);
            } else {
                p[k] = std::clamp(0.0, lo, hi);
            }
        }
        return p;
    }
    return std::get<Ball>(shape_).center;
}

}  // namespace aggnash
