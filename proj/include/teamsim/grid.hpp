#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "teamsim/geometry.hpp"

namespace teamsim {

struct Cell {
    int ix{0};
    int iy{0};

    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Shared geometry of the world map and every grid derived from it.
/// Cell (0,0) is the min-x/min-y corner; indices are row-major with iy as the
/// row, so "row-major order" means increasing (iy, ix).
struct GridGeometry {
    int width{0};
    int height{0};
    double resolution{1.0};
    Point2 origin{};

    std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    bool in_bounds(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < width && iy < height; }
    bool in_bounds(const Cell& c) const { return in_bounds(c.ix, c.iy); }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(ix);
    }
    std::size_t index(const Cell& c) const { return index(c.ix, c.iy); }
    Cell cell_of(std::size_t idx) const {
        return {static_cast<int>(idx % static_cast<std::size_t>(width)),
                static_cast<int>(idx / static_cast<std::size_t>(width))};
    }
    Point2 cell_center(const Cell& c) const {
        return {origin.x + (c.ix + 0.5) * resolution, origin.y + (c.iy + 0.5) * resolution};
    }
    Point2 cell_center(std::size_t idx) const { return cell_center(cell_of(idx)); }
    /// Cell containing p (floor semantics), unclamped.
    Cell cell_containing(const Point2& p) const;
    std::optional<Cell> locate(const Point2& p) const;
    double cell_area() const { return resolution * resolution; }

    friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Visitor for ray traversal: (cell, t_enter, t_exit) -> continue?
using RayVisitor = std::function<bool(const Cell&, double, double)>;

/// Exact grid traversal (Amanatides-Woo DDA) of the ray origin + t*(cos a, sin a)
/// for t in [0, max_dist]. Stops when the ray leaves the grid, when the visitor
/// returns false, or after the cell containing t = max_dist.
void traverse_ray(const GridGeometry& g, const Point2& origin, double angle, double max_dist,
                  const RayVisitor& visit);

/// Integer walk between two cell centers. Visits every cell whose interior the
/// open segment between the centers passes through, in order, including both
/// endpoints. Exact corner crossings step diagonally (the side cells are not
/// touched).
void walk_cells(const Cell& from, const Cell& to, const std::function<bool(const Cell&)>& visit);

}  // namespace teamsim
