#include "teamsim/region.hpp"

#include <cmath>

namespace teamsim {

KeepInRegion KeepInRegion::circle(Point2 center, double radius) {
    if (!(radius > 0) || !std::isfinite(radius)) throw InvalidRegion("circle radius must be positive");
    if (!std::isfinite(center.x) || !std::isfinite(center.y)) throw InvalidRegion("circle center must be finite");
    return KeepInRegion(CircleRegion{center, radius});
}

KeepInRegion KeepInRegion::polygon(std::vector<Point2> v) {
    const std::size_t n = v.size();
    if (n < 3) throw InvalidRegion("polygon needs at least 3 vertices");
    double area2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % n];
        const Point2& c = v[(i + 2) % n];
        if ((b - a).cross(c - b) < 0) throw InvalidRegion("polygon must be convex and counter-clockwise");
        area2 += a.cross(b);
    }
    if (!(area2 > 0)) throw InvalidRegion("polygon is degenerate");
    return KeepInRegion(PolygonRegion{std::move(v)});
}

bool KeepInRegion::contains(const Point2& p) const {
    if (const auto* c = std::get_if<CircleRegion>(&shape_)) return distance(p, c->center) <= c->radius;
    const auto& v = std::get<PolygonRegion>(shape_).vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % v.size()];
        if ((b - a).cross(p - a) < 0) return false;
    }
    return true;
}

}  // namespace teamsim
