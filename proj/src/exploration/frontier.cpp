#include "teamsim/exploration/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace teamsim::exploration {

using mapping::CellClass;

bool is_frontier_cell(const mapping::OccupancyGrid& grid, const Cell& c) {
    const GridGeometry& g = grid.geometry();
    if (grid.cls(c) != CellClass::Free) return false;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const Cell n{c.ix + dx, c.iy + dy};
            if (g.in_bounds(n) && grid.cls(n) == CellClass::Unknown) return true;
        }
    }
    return false;
}

namespace {

Point2 snap_to_free(const mapping::OccupancyGrid& grid, const Point2& p) {
    const GridGeometry& g = grid.geometry();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (grid.cls(idx) != CellClass::Free) continue;
        const double d = distance(g.cell_center(idx), p);
        if (d < best) {
            best = d;
            best_idx = idx;
        }
    }
    return g.cell_center(best_idx);
}

}  // namespace

std::vector<Frontier> detect_frontiers(const mapping::OccupancyGrid& grid, std::size_t min_cluster_size) {
    const GridGeometry& g = grid.geometry();
    std::vector<std::uint8_t> is_frontier(g.size(), 0);
    for (std::size_t idx = 0; idx < g.size(); ++idx)
        is_frontier[idx] = is_frontier_cell(grid, g.cell_of(idx)) ? 1 : 0;

    std::vector<std::uint8_t> seen(g.size(), 0);
    std::vector<Frontier> out;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (!is_frontier[idx] || seen[idx]) continue;
        Frontier f;
        std::deque<std::size_t> queue{idx};
        seen[idx] = 1;
        while (!queue.empty()) {
            const std::size_t cur = queue.front();
            queue.pop_front();
            f.cells.push_back(cur);
            const Cell c = g.cell_of(cur);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const Cell n{c.ix + dx, c.iy + dy};
                    if (!g.in_bounds(n)) continue;
                    const std::size_t ni = g.index(n);
                    if (is_frontier[ni] && !seen[ni]) {
                        seen[ni] = 1;
                        queue.push_back(ni);
                    }
                }
            }
        }
        if (f.cells.size() < min_cluster_size) continue;
        std::sort(f.cells.begin(), f.cells.end());
        Point2 mean{};
        for (std::size_t c : f.cells) mean = mean + g.cell_center(c);
        mean = mean * (1.0 / static_cast<double>(f.cells.size()));
        f.centroid = snap_to_free(grid, mean);
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<Frontier> filter_keep_in(std::vector<Frontier> frontiers, const KeepInRegion& region,
                                     const GridGeometry& geometry) {
    std::erase_if(frontiers, [&](const Frontier& f) {
        return !std::all_of(f.cells.begin(), f.cells.end(),
                            [&](std::size_t c) { return region.contains(geometry.cell_center(c)); });
    });
    return frontiers;
}

std::size_t visible_unknown_cells(const mapping::OccupancyGrid& grid, const Cell& from, double range) {
    const GridGeometry& g = grid.geometry();
    const int reach = static_cast<int>(std::ceil(range / g.resolution));
    const Point2 origin = g.cell_center(from);
    std::size_t count = 0;
    for (int iy = from.iy - reach; iy <= from.iy + reach; ++iy) {
        for (int ix = from.ix - reach; ix <= from.ix + reach; ++ix) {
            const Cell target{ix, iy};
            if (!g.in_bounds(target) || grid.cls(target) != CellClass::Unknown) continue;
            if (distance(g.cell_center(target), origin) > range) continue;
            bool visible = true;
            walk_cells(from, target, [&](const Cell& c) {
                if (c == from || c == target) return true;
                if (grid.cls(c) == CellClass::Occupied) {
                    visible = false;
                    return false;
                }
                return true;
            });
            if (visible) ++count;
        }
    }
    return count;
}

namespace {

std::optional<Cell> goal_cell_for(const planning::InflatedCostmap& costmap, const Point2& centroid,
                                  double max_dist, const std::optional<KeepInRegion>& region) {
    const GridGeometry& g = costmap.geometry();
    const Cell c = g.cell_containing(centroid);
    if (!costmap.blocked(c) && (!region || region->contains(g.cell_center(c)))) return c;
    const int reach = static_cast<int>(std::ceil(max_dist / g.resolution)) + 1;
    std::optional<Cell> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int iy = c.iy - reach; iy <= c.iy + reach; ++iy) {
        for (int ix = c.ix - reach; ix <= c.ix + reach; ++ix) {
            const Cell n{ix, iy};
            if (costmap.blocked(n)) continue;
            const Point2 center = g.cell_center(n);
            const double d = distance(center, centroid);
            if (d > max_dist || (region && !region->contains(center))) continue;
            if (d < best_d) {  // row-major scan keeps the first on ties
                best = n;
                best_d = d;
            }
        }
    }
    return best;
}

}  // namespace

Frontier score(Frontier f, const mapping::OccupancyGrid& grid, const planning::InflatedCostmap& costmap,
               const Pose2D& robot_pose, const ExplorationConfig& config, const std::optional<KeepInRegion>& region) {
    const GridGeometry& g = grid.geometry();
    const Cell centroid_cell = g.cell_containing(f.centroid);
    f.info_gain = g.cell_area() * static_cast<double>(visible_unknown_cells(grid, centroid_cell, config.gain_range));
    f.scored = true;
    f.feasible = false;
    f.goal.reset();
    f.path.reset();

    const auto goal = goal_cell_for(costmap, f.centroid, config.goal_snap_radius, region);
    if (goal) {
        const Point2 gp = g.cell_center(*goal);
        const Pose2D goal_pose = make_pose(gp.x, gp.y, std::atan2(gp.y - robot_pose.y, gp.x - robot_pose.x));
        try {
            planning::Path p = planning::plan(costmap, robot_pose, goal_pose);
            f.effort = p.length;
            f.feasible = true;
            f.goal = goal_pose;
            f.path = std::move(p);
        } catch (const planning::GoalUnreachable&) {
        } catch (const planning::StartBlocked&) {
        }
    }
    if (!f.feasible) f.effort = std::numeric_limits<double>::infinity();
    f.utility = config.alpha * f.info_gain - config.beta * (f.feasible ? f.effort : 0.0);
    return f;
}

std::optional<std::size_t> select_frontier(std::span<const Frontier> scored) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        const Frontier& f = scored[i];
        if (!f.feasible) continue;
        if (!best) {
            best = i;
            continue;
        }
        const Frontier& b = scored[*best];
        if (f.utility > b.utility || (f.utility == b.utility && f.effort < b.effort) ||
            (f.utility == b.utility && f.effort == b.effort && f.first_cell() < b.first_cell()))
            best = i;
    }
    return best;
}

}  // namespace teamsim::exploration
