#include "teamsim/planning/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace teamsim::planning {

using mapping::CellClass;

InflatedCostmap::InflatedCostmap(const mapping::OccupancyGrid& grid, double inflation_radius)
    : geometry_(grid.geometry()),
      inflation_radius_(inflation_radius),
      blocked_(grid.geometry().size(), 0),
      source_(grid.geometry().size(), 0),
      sources_(grid.geometry().size(), 0) {
    const double res = geometry_.resolution;
    const int reach = static_cast<int>(std::ceil(inflation_radius / res));
    for (int dy = -reach; dy <= reach; ++dy)
        for (int dx = -reach; dx <= reach; ++dx)
            if (std::hypot(dx, dy) * res <= inflation_radius + 1e-9) kernel_.push_back({dx, dy});

    for (std::size_t idx = 0; idx < geometry_.size(); ++idx) {
        if (grid.cls(idx) == CellClass::Free) continue;
        source_[idx] = 1;
        spread(idx, 1);
    }
}

void InflatedCostmap::spread(std::size_t idx, int delta) {
    const Cell c = geometry_.cell_of(idx);
    for (const Cell& k : kernel_) {
        const Cell n{c.ix + k.ix, c.iy + k.iy};
        if (!geometry_.in_bounds(n)) continue;
        const std::size_t ni = geometry_.index(n);
        sources_[ni] = static_cast<std::uint16_t>(sources_[ni] + delta);
        blocked_[ni] = sources_[ni] > 0;
    }
}

void InflatedCostmap::apply_diff(const mapping::MapDiff& diff) {
    if (source_.empty()) throw std::logic_error("costmap was not built from an occupancy grid");
    for (const auto& ch : diff.changed) {
        const std::uint8_t now = ch.cls == CellClass::Free ? 0 : 1;
        if (now == source_[ch.index]) continue;
        source_[ch.index] = now;
        spread(ch.index, now ? 1 : -1);
    }
}

InflatedCostmap::InflatedCostmap(GridGeometry geometry, std::vector<std::uint8_t> blocked, double inflation_radius)
    : geometry_(geometry), inflation_radius_(inflation_radius), blocked_(std::move(blocked)) {
    if (blocked_.size() != geometry_.size()) throw std::invalid_argument("blocked mask size mismatch");
}

double MoveCount::cells() const {
    return static_cast<double>(straight) + static_cast<double>(diagonal) * std::numbers::sqrt2;
}

bool diagonal_clear(const InflatedCostmap& costmap, const Cell& from, const Cell& to) {
    return !costmap.blocked(Cell{to.ix, from.iy}) && !costmap.blocked(Cell{from.ix, to.iy});
}

std::optional<Cell> nearest_unblocked(const InflatedCostmap& costmap, const Point2& p, double max_dist) {
    const GridGeometry& g = costmap.geometry();
    const int reach = static_cast<int>(std::ceil(max_dist / g.resolution)) + 1;
    const Cell c = g.cell_containing(p);
    std::optional<Cell> best;
    double best_d = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (int iy = c.iy - reach; iy <= c.iy + reach; ++iy) {
        for (int ix = c.ix - reach; ix <= c.ix + reach; ++ix) {
            const Cell n{ix, iy};
            if (costmap.blocked(n)) continue;
            const double d = distance(g.cell_center(n), p);
            if (d > max_dist) continue;
            const std::size_t idx = g.index(n);
            if (d < best_d || (d == best_d && idx < best_idx)) {
                best = n;
                best_d = d;
                best_idx = idx;
            }
        }
    }
    return best;
}

namespace {

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

}  // namespace

Path plan(const InflatedCostmap& costmap, const Pose2D& start, const Pose2D& goal) {
    const GridGeometry& g = costmap.geometry();

    const auto goal_cell = g.locate(goal.position());
    if (!goal_cell || costmap.blocked(*goal_cell)) throw GoalUnreachable("goal cell is blocked or outside the map");

    Cell start_cell = g.cell_containing(start.position());
    if (costmap.blocked(start_cell)) {
        const auto snapped = nearest_unblocked(costmap, start.position(), 0.5);
        if (!snapped) throw StartBlocked("no unblocked cell within 0.5 m of the start");
        start_cell = *snapped;
    }

    const std::size_t n = g.size();
    const std::size_t src = g.index(start_cell);
    const std::size_t dst = g.index(*goal_cell);

    std::vector<MoveCount> best(n);
    std::vector<double> best_cost(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, std::numeric_limits<std::size_t>::max());
    auto heuristic = [&](std::size_t idx) {
        const Cell c = g.cell_of(idx);
        return std::hypot(static_cast<double>(c.ix - goal_cell->ix), static_cast<double>(c.iy - goal_cell->iy));
    };

    // (f, h, index): ties broken by smaller heuristic, then row-major order.
    using Key = std::tuple<double, double, std::size_t>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
    best[src] = {};
    best_cost[src] = 0.0;
    open.emplace(heuristic(src), heuristic(src), src);

    while (!open.empty()) {
        const auto [f, h, idx] = open.top();
        open.pop();
        if (f > best_cost[idx] + h) continue;  // stale entry
        if (idx == dst) break;
        const Cell c = g.cell_of(idx);
        for (int k = 0; k < 8; ++k) {
            const Cell nb{c.ix + kDx[k], c.iy + kDy[k]};
            if (costmap.blocked(nb)) continue;
            const bool diag = k >= 4;
            if (diag && !diagonal_clear(costmap, c, nb)) continue;
            MoveCount m = best[idx];
            if (diag) ++m.diagonal;
            else ++m.straight;
            const double cost = m.cells();
            const std::size_t ni = g.index(nb);
            if (cost < best_cost[ni]) {
                best[ni] = m;
                best_cost[ni] = cost;
                parent[ni] = idx;
                const double nh = heuristic(ni);
                open.emplace(cost + nh, nh, ni);
            }
        }
    }
    if (!std::isfinite(best_cost[dst])) throw GoalUnreachable("no path to goal");

    Path path;
    for (std::size_t at = dst;; at = parent[at]) {
        path.cells.push_back(at);
        if (at == src) break;
    }
    std::reverse(path.cells.begin(), path.cells.end());
    path.moves = best[dst];
    path.length = path.moves.cells() * g.resolution;
    for (std::size_t i = 0; i < path.cells.size(); ++i) {
        const Point2 p = g.cell_center(path.cells[i]);
        double theta = goal.theta;
        if (i + 1 < path.cells.size()) {
            const Point2 q = g.cell_center(path.cells[i + 1]);
            theta = std::atan2(q.y - p.y, q.x - p.x);
        }
        path.waypoints.push_back(make_pose(p.x, p.y, theta));
    }
    // Finish on the requested point rather than the center of its cell.
    if (path.waypoints.size() >= 2) {
        Pose2D& prev = path.waypoints[path.waypoints.size() - 2];
        prev.theta = std::atan2(goal.y - prev.y, goal.x - prev.x);
    }
    path.waypoints.back() = goal;
    return path;
}

}  // namespace teamsim::planning
