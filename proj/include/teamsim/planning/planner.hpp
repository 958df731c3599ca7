#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "teamsim/geometry.hpp"
#include "teamsim/grid.hpp"
#include "teamsim/mapping/occupancy_grid.hpp"
#include "teamsim/sim/world.hpp"

namespace teamsim::planning {

struct GoalUnreachable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StartBlocked : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Occupancy grid with Occupied and Unknown cells grown by the inflation
/// radius. A cell is blocked iff some Occupied/Unknown cell center lies within
/// `inflation_radius` of its center.
class InflatedCostmap {
public:
    InflatedCostmap(const mapping::OccupancyGrid& grid, double inflation_radius = 0.35);
    /// Builds directly from a blocked mask (tests, mazes).
    InflatedCostmap(GridGeometry geometry, std::vector<std::uint8_t> blocked, double inflation_radius = 0.0);

    const GridGeometry& geometry() const { return geometry_; }
    double inflation_radius() const { return inflation_radius_; }
    bool blocked(const Cell& c) const { return !geometry_.in_bounds(c) || blocked_[geometry_.index(c)] != 0; }
    bool blocked(std::size_t idx) const { return blocked_[idx] != 0; }

    /// Incremental update; equivalent to rebuilding from the grid the diff
    /// was produced by. Only valid for costmaps built from a grid.
    void apply_diff(const mapping::MapDiff& diff);

    friend bool operator==(const InflatedCostmap& a, const InflatedCostmap& b) {
        return a.geometry_ == b.geometry_ && a.blocked_ == b.blocked_;
    }

private:
    void spread(std::size_t idx, int delta);

    GridGeometry geometry_;
    double inflation_radius_;
    std::vector<std::uint8_t> blocked_;
    std::vector<Cell> kernel_;
    std::vector<std::uint8_t> source_;    // cell is Occupied/Unknown
    std::vector<std::uint16_t> sources_;  // non-free cells within the radius
};

/// Exact move tally of a grid path; its metric length is
/// (straight + diagonal * sqrt 2) * resolution.
struct MoveCount {
    std::int64_t straight{0};
    std::int64_t diagonal{0};

    double cells() const;
    friend bool operator==(const MoveCount&, const MoveCount&) = default;
};

/// Waypoints sit on cell centers except the last, which is the goal pose itself.
struct Path {
    std::vector<Pose2D> waypoints;
    std::vector<std::size_t> cells;
    MoveCount moves;
    double length{0};

    bool empty() const { return waypoints.empty(); }
};

/// True when a diagonal step between the two 8-adjacent cells is allowed
/// (both orthogonal side cells free, so paths never cut a blocked corner).
bool diagonal_clear(const InflatedCostmap& costmap, const Cell& from, const Cell& to);

/// Nearest unblocked cell whose center is within `max_dist` of p; ties go to
/// the smaller row-major index.
std::optional<Cell> nearest_unblocked(const InflatedCostmap& costmap, const Point2& p, double max_dist);

/// A* over the 8-connected grid with a Euclidean heuristic. The start snaps to
/// the nearest unblocked cell within 0.5 m when blocked.
Path plan(const InflatedCostmap& costmap, const Pose2D& start, const Pose2D& goal);

}  // namespace teamsim::planning
