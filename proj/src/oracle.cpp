#include "aggnash/oracle.hpp"

#include "aggnash/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace aggnash {

namespace {

// theta_i at a unilateral deviation y_i, with the others' share of the aggregate fixed.
class Deviation {
public:
    Deviation(const AggregativeGame& game, std::size_t i, const Vector& x)
        : game_(game), i_(i),
          rest_(aggregate(game, x) -
                game.contribution(i, game.block(x, i)) / static_cast<double>(game.players())) {}

    [[nodiscard]] Vector sigma(const Vector& yi) const {
        return rest_ + game_.contribution(i_, yi) / static_cast<double>(game_.players());
    }
    [[nodiscard]] double cost(const Vector& yi) const { return game_.cost(i_, yi, sigma(yi)); }
    [[nodiscard]] Vector gradient(const Vector& yi) const {
        return game_.local_gradient(i_, yi, sigma(yi));
    }

private:
    const AggregativeGame& game_;
    std::size_t i_;
    Vector rest_;
};

double grid_gap(const StrategySet& set, const Deviation& dev, const Vector& xi,
                std::size_t points) {
    const Box& box = *set.as_box();
    const double lo = box.lower[0];
    const double hi = box.upper[0];
    const double current = dev.cost(xi);
    double best = current;
    Vector y(1);
    for (std::size_t k = 0; k < points; ++k) {
        const double s = points > 1 ? static_cast<double>(k) / static_cast<double>(points - 1) : 0.5;
        y[0] = lo + (hi - lo) * s;
        best = std::min(best, dev.cost(y));
    }
    return current - best;
}

double descent_gap(const StrategySet& set, const Deviation& dev, const Vector& xi,
                   std::size_t iterations) {
    const double current = dev.cost(xi);
    Vector y = xi;
    double fy = current;
    double step = 1.0;
    for (std::size_t it = 0; it < iterations; ++it) {
        const Vector g = dev.gradient(y);
        bool moved = false;
        // Armijo backtracking on the projected arc.
        for (int bt = 0; bt < 60; ++bt) {
            const Vector cand = set.project(y - step * g);
            const double fc = dev.cost(cand);
            const Vector d = cand - y;
            if (fc <= fy + 1e-4 * g.dot(d)) {
                moved = d.squaredNorm() > 0.0 && fc < fy;
                y = cand;
                fy = std::min(fy, fc);
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            break;
        }
    }
    return current - std::min(current, fy);
}

}  // namespace

double ne_residual(const AggregativeGame& game, const Vector& x, double tau) {
    return (x - project(game, x - tau * pseudo_gradient(game, x))).norm();
}

double default_oracle_step(const GameConstants& k) {
    const double kappa = k.kappa1 + k.kappa2 * k.kappa3;
    if (!(k.mu > 0.0) || !(kappa > 0.0)) {
        throw Error("oracle", "oracle step needs mu > 0 and kappa > 0");
    }
    return k.mu / (kappa * kappa);
}

NEResult solve_ne(const AggregativeGame& game, const OracleOptions& opt) {
    const double tau = opt.step ? *opt.step : default_oracle_step(estimate_constants(game, 2000, 0));
    if (!(tau > 0.0)) {
        throw Error("oracle", "fixed-point step must be positive");
    }
    Vector x;
    if (opt.start) {
        x = project(game, *opt.start);
    } else {
        x.resize(game.profile_dim());
        for (std::size_t i = 0; i < game.players(); ++i) {
            game.block(x, i) = game.strategy_set(i).reference_point();
        }
    }

    NEResult r;
    r.step = tau;
    r.residual = ne_residual(game, x);
    Vector best = x;
    double best_res = r.residual;
    while (r.residual > opt.tol && r.iterations < opt.max_iter) {
        x = project(game, x - tau * pseudo_gradient(game, x));
        ++r.iterations;
        r.residual = ne_residual(game, x);
        if (!std::isfinite(r.residual)) {
            break;
        }
        if (r.residual < best_res) {
            best_res = r.residual;
            best = x;
        }
    }
    r.x = best;
    r.residual = best_res;
    r.converged = best_res <= opt.tol;
    return r;
}

MultiStartResult solve_ne_multistart(const AggregativeGame& game, const OracleOptions& opt,
                                     std::size_t starts, std::uint64_t seed) {
    if (starts == 0) {
        throw Error("oracle", "multistart needs at least one start");
    }
    std::mt19937_64 rng(seed);
    MultiStartResult out;
    OracleOptions o = opt;
    if (!o.step) {
        o.step = default_oracle_step(estimate_constants(game, 2000, seed));
    }
    for (std::size_t s = 0; s < starts; ++s) {
        o.start = sample_profile(game, rng);
        out.runs.push_back(solve_ne(game, o));
    }
    out.best = *std::min_element(out.runs.begin(), out.runs.end(),
                                 [](const NEResult& a, const NEResult& b) { return a.residual < b.residual; });
    for (std::size_t a = 0; a < out.runs.size(); ++a) {
        for (std::size_t b = a + 1; b < out.runs.size(); ++b) {
            out.max_pairwise_distance =
                std::max(out.max_pairwise_distance, (out.runs[a].x - out.runs[b].x).norm());
        }
    }
    out.unique = out.max_pairwise_distance <= 10.0 * opt.tol &&
                 std::all_of(out.runs.begin(), out.runs.end(), [](const NEResult& r) { return r.converged; });
    return out;
}

double NEVerification::max_gap() const {
    return gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end());
}

NEVerification verify_ne(const AggregativeGame& game, const Vector& x, const VerifyOptions& opt) {
    if (!game.has_cost()) {
        throw Error("oracle", "verify_ne needs cost evaluators");
    }
    if (feasibility_violation(game, x) > 0.0) {
        throw Error("oracle", "verify_ne needs a feasible profile");
    }
    NEVerification v;
    v.gaps.reserve(game.players());
    for (std::size_t i = 0; i < game.players(); ++i) {
        const StrategySet& set = game.strategy_set(i);
        const Deviation dev(game, i, x);
        const Vector xi = game.block(x, i);
        if (set.dim() == 1 && set.as_box() && set.is_bounded()) {
            v.modes.push_back(BestResponseMode::Grid);
            v.gaps.push_back(grid_gap(set, dev, xi, opt.grid_points));
        } else {
            v.modes.push_back(BestResponseMode::Descent);
            v.gaps.push_back(descent_gap(set, dev, xi, opt.descent_iterations));
        }
    }
    v.passed = v.max_gap() <= opt.tol;
    return v;
}

std::string ne_to_json(const NEResult& r, const MultiStartResult* multi) {
    nlohmann::json j = {
        {"x", std::vector<double>(r.x.data(), r.x.data() + r.x.size())},
        {"residual", r.residual},
        {"iterations", r.iterations},
        {"converged", r.converged},
        {"step", r.step},
    };
    if (multi) {
        j["multistart"] = {{"starts", multi->runs.size()},
                           {"max_pairwise_distance", multi->max_pairwise_distance},
                           {"unique", multi->unique}};
    }
    return j.dump(2) + "\n";
}

}  // namespace aggnash
