#pragma once

#include <cmath>
#include <numbers>

namespace teamsim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

struct Point2 {
    double x{0};
    double y{0};

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
    double dot(const Point2& o) const { return x * o.x + y * o.y; }
    double cross(const Point2& o) const { return x * o.y - y * o.x; }

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Planar pose; theta is kept in (-pi, pi] by every constructor path that goes
/// through make_pose().
struct Pose2D {
    double x{0};
    double y{0};
    double theta{0};

    Point2 position() const { return {x, y}; }
    Point2 heading() const { return {std::cos(theta), std::sin(theta)}; }

    friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

Pose2D make_pose(double x, double y, double theta);

/// Rigid SE(2) transform: p -> R(rotation) p + translation.
struct Transform2D {
    double rotation{0};
    Point2 translation{};

    static Transform2D identity() { return {}; }

    Point2 apply(const Point2& p) const;
    Pose2D apply(const Pose2D& p) const;
    /// (*this) after `inner`: x -> this(inner(x)).
    Transform2D compose(const Transform2D& inner) const;
    Transform2D inverse() const;

    friend bool operator==(const Transform2D&, const Transform2D&) = default;
};

}  // namespace teamsim
