#pragma once

#include <cstddef>

#include "teamsim/mapping/occupancy_grid.hpp"
#include "teamsim/planning/planner.hpp"
#include "teamsim/sim/world.hpp"

namespace teamsim::planning {

struct FollowerConfig {
    double lookahead{0.5};
    double corner_tolerance{0.05};  // max distance of skipped waypoints from the pursuit chord
    double goal_tolerance{0.15};
    double heading_tolerance{0.2};
    double heading_gain{2.0};
    double approach_gain{1.5};  // linear speed <= gain * distance-to-goal
    double min_speed{0.1};
    double rotate_in_place{0.35};
};

enum class FollowStatus { Following, Arrived };

struct FollowResult {
    sim::Velocity command;
    FollowStatus status{FollowStatus::Following};
};

/// A path plus progress along it.
struct PathTracker {
    Path path;
    std::size_t progress{0};
    bool ignore_final_heading{false};
};

/// Pure-pursuit step toward the furthest waypoint within the lookahead whose
/// chord stays within the corner tolerance of the path, computed from the
/// agent's pose estimate.
FollowResult follow_step(PathTracker& tracker, const sim::AgentState& agent, double dt,
                         const FollowerConfig& config = {});

/// True iff a newly Occupied/Unknown cell in `diff` lies within the inflation
/// radius of a not-yet-reached path cell.
bool invalidate_on_diff(const PathTracker& tracker, const mapping::MapDiff& diff, const GridGeometry& geometry,
                        double inflation_radius);

}  // namespace teamsim::planning
