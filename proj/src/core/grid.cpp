#include "teamsim/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace teamsim {

Cell GridGeometry::cell_containing(const Point2& p) const {
    return {static_cast<int>(std::floor((p.x - origin.x) / resolution)),
            static_cast<int>(std::floor((p.y - origin.y) / resolution))};
}

std::optional<Cell> GridGeometry::locate(const Point2& p) const {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return std::nullopt;
    const Cell c = cell_containing(p);
    if (!in_bounds(c)) return std::nullopt;
    return c;
}

void traverse_ray(const GridGeometry& g, const Point2& origin, double angle, double max_dist,
                  const RayVisitor& visit) {
    Cell c = g.cell_containing(origin);
    if (!g.in_bounds(c)) return;

    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    constexpr double inf = std::numeric_limits<double>::infinity();

    auto next_x = [&](int ix) {
        if (step_x == 0) return inf;
        const double boundary = g.origin.x + (ix + (step_x > 0 ? 1 : 0)) * g.resolution;
        return (boundary - origin.x) / dx;
    };
    auto next_y = [&](int iy) {
        if (step_y == 0) return inf;
        const double boundary = g.origin.y + (iy + (step_y > 0 ? 1 : 0)) * g.resolution;
        return (boundary - origin.y) / dy;
    };

    double t = 0.0;
    double t_max_x = next_x(c.ix);
    double t_max_y = next_y(c.iy);
    for (;;) {
        const double t_exit = std::min(t_max_x, t_max_y);
        if (!visit(c, t, std::min(t_exit, max_dist))) return;
        if (t_exit >= max_dist) return;
        if (t_max_x < t_max_y) {
            c.ix += step_x;
            t = t_max_x;
            t_max_x = next_x(c.ix);
        } else {
            c.iy += step_y;
            t = t_max_y;
            t_max_y = next_y(c.iy);
        }
        if (!g.in_bounds(c)) return;
    }
}

void walk_cells(const Cell& from, const Cell& to, const std::function<bool(const Cell&)>& visit) {
    const long nx = std::labs(static_cast<long>(to.ix) - from.ix);
    const long ny = std::labs(static_cast<long>(to.iy) - from.iy);
    const int sx = to.ix > from.ix ? 1 : -1;
    const int sy = to.iy > from.iy ? 1 : -1;
    Cell p = from;
    if (!visit(p)) return;
    long ix = 0;
    long iy = 0;
    while (ix < nx || iy < ny) {
        const long decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx;
        if (decision == 0) {
            p.ix += sx;
            p.iy += sy;
            ++ix;
            ++iy;
        } else if (decision < 0) {
            p.ix += sx;
            ++ix;
        } else {
            p.iy += sy;
            ++iy;
        }
        if (!visit(p)) return;
    }
}

}  // namespace teamsim
