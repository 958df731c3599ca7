#pragma once

#include <stdexcept>
#include <variant>
#include <vector>

#include "teamsim/geometry.hpp"

namespace teamsim {

struct InvalidRegion : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CircleRegion {
    Point2 center;
    double radius{0};

    friend bool operator==(const CircleRegion&, const CircleRegion&) = default;
};

/// Counter-clockwise convex polygon.
struct PolygonRegion {
    std::vector<Point2> vertices;

    friend bool operator==(const PolygonRegion&, const PolygonRegion&) = default;
};

/// Keep-in area constraining exploration. Boundary points count as inside.
class KeepInRegion {
public:
    static KeepInRegion circle(Point2 center, double radius);
    static KeepInRegion polygon(std::vector<Point2> ccw_vertices);

    bool contains(const Point2& p) const;
    bool is_circle() const { return std::holds_alternative<CircleRegion>(shape_); }
    const CircleRegion& as_circle() const { return std::get<CircleRegion>(shape_); }
    const PolygonRegion& as_polygon() const { return std::get<PolygonRegion>(shape_); }

    friend bool operator==(const KeepInRegion&, const KeepInRegion&) = default;

private:
    explicit KeepInRegion(std::variant<CircleRegion, PolygonRegion> shape) : shape_(std::move(shape)) {}
    std::variant<CircleRegion, PolygonRegion> shape_;
};

}  // namespace teamsim
