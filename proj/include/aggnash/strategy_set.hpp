#pragma once

#include <Eigen/Dense>

#include <variant>

namespace aggnash {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box. Entries of `lower`/`upper` may be -inf/+inf.
struct Box {
    Vector lower;
    Vector upper;
};

/// Closed Euclidean ball.
struct Ball {
    Vector center;
    double radius = 0.0;
};

/// A player's closed convex strategy set with exact Euclidean projection.
class StrategySet {
public:
    static StrategySet box(Vector lower, Vector upper);
    static StrategySet interval(double lower, double upper);
    static StrategySet unbounded(Eigen::Index dim);
    static StrategySet ball(Vector center, double radius);

    [[nodiscard]] Eigen::Index dim() const;
    [[nodiscard]] Vector project(const Vector& v) const;

    /// Euclidean distance from v to the set; 0 for members.
    [[nodiscard]] double distance(const Vector& v) const;
    [[nodiscard]] bool contains(const Vector& v, double tol = 0.0) const;

    /// True when every coordinate is bounded on both sides.
    [[nodiscard]] bool is_bounded() const;

    /// Box midpoint (projection of 0 on unbounded sides) or ball center.
    [[nodiscard]] Vector reference_point() const;

    [[nodiscard]] const Box* as_box() const { return std::get_if<Box>(&shape_); }
    [[nodiscard]] const Ball* as_ball() const { return std::get_if<Ball>(&shape_); }

private:
    explicit StrategySet(std::variant<Box, Ball> shape) : shape_(std::move(shape)) {}

    std::variant<Box, Ball> shape_;
};

}  // namespace aggnash
