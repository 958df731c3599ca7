#pragma once

#include <optional>
#include <span>
#include <vector>

#include "teamsim/geometry.hpp"
#include "teamsim/mapping/occupancy_grid.hpp"
#include "teamsim/planning/planner.hpp"
#include "teamsim/region.hpp"

namespace teamsim::exploration {

struct Frontier {
    std::vector<std::size_t> cells;  // sorted row-major
    Point2 centroid;                 // center of the FREE cell nearest the cell mean
    double info_gain{0};             // m^2
    double effort{0};                // m
    double utility{0};
    bool scored{false};
    bool feasible{false};
    std::optional<Pose2D> goal;       // navigation target actually planned to
    std::optional<planning::Path> path;

    std::size_t first_cell() const { return cells.front(); }
};

struct ExplorationConfig {
    std::size_t min_cluster_size{3};
    double alpha{1.0};        // per m^2 of expected gain
    double beta{1.0};         // per m of path
    double gain_range{5.0};   // m
    double goal_snap_radius{1.0};
};

/// FREE cell with at least one in-bounds UNKNOWN 8-neighbour.
bool is_frontier_cell(const mapping::OccupancyGrid& grid, const Cell& c);

/// Maximal 8-connected clusters of frontier cells with at least
/// `min_cluster_size` cells, ordered by their first row-major cell.
std::vector<Frontier> detect_frontiers(const mapping::OccupancyGrid& grid, std::size_t min_cluster_size = 3);

/// Keeps frontiers whose every cell center lies inside the region.
std::vector<Frontier> filter_keep_in(std::vector<Frontier> frontiers, const KeepInRegion& region,
                                     const GridGeometry& geometry);

/// Unknown cells within `range` of `from` whose interior is reachable by a
/// straight cell walk crossing no OCCUPIED cell.
std::size_t visible_unknown_cells(const mapping::OccupancyGrid& grid, const Cell& from, double range);

/// Fills info_gain, effort, utility and feasibility. The navigation goal is
/// the centroid, moved to the nearest unblocked costmap cell inside `region`
/// (if any) when the centroid itself is blocked by inflation.
Frontier score(Frontier frontier, const mapping::OccupancyGrid& grid, const planning::InflatedCostmap& costmap,
               const Pose2D& robot_pose, const ExplorationConfig& config = {},
               const std::optional<KeepInRegion>& region = std::nullopt);

/// Index of the best feasible frontier (max utility, then smaller effort,
/// then smaller first cell), or nullopt when exploration is complete.
std::optional<std::size_t> select_frontier(std::span<const Frontier> scored);

}  // namespace teamsim::exploration
