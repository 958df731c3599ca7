#include "teamsim/planning/follower.hpp"

#include <algorithm>
#include <cmath>

namespace teamsim::planning {

namespace {

/// True iff every waypoint in [from, to) lies within `tolerance` of the chord
/// from `here` to waypoint `to`.
bool hugs_path(const std::vector<Pose2D>& wps, std::size_t from, std::size_t to, const Point2& here,
               double tolerance) {
    const Point2 end = wps[to].position();
    const Point2 d = end - here;
    const double len2 = d.dot(d);
    for (std::size_t i = from; i < to; ++i) {
        const Point2 p = wps[i].position();
        const double u = len2 > 0 ? std::clamp((p - here).dot(d) / len2, 0.0, 1.0) : 0.0;
        if (distance(here + d * u, p) > tolerance) return false;
    }
    return true;
}

}  // namespace

FollowResult follow_step(PathTracker& tracker, const sim::AgentState& agent, double /*dt*/,
                         const FollowerConfig& config) {
    const auto& wps = tracker.path.waypoints;
    if (wps.empty()) return {{0, 0}, FollowStatus::Arrived};

    const Pose2D& pose = agent.estimated_pose;
    const Point2 here = pose.position();
    const Pose2D& goal = wps.back();
    const double to_goal = distance(here, goal.position());

    if (to_goal <= config.goal_tolerance) {
        const double err = normalize_angle(goal.theta - pose.theta);
        if (tracker.ignore_final_heading || std::abs(err) <= config.heading_tolerance) {
            tracker.progress = wps.size() - 1;
            return {{0, 0}, FollowStatus::Arrived};
        }
        const double w = std::clamp(config.heading_gain * err, -agent.max_angular, agent.max_angular);
        return {{0, w}, FollowStatus::Following};
    }

    // Advance progress to the closest waypoint ahead of the current one.
    std::size_t closest = tracker.progress;
    double closest_d = distance(here, wps[closest].position());
    for (std::size_t i = tracker.progress + 1; i < wps.size(); ++i) {
        const double d = distance(here, wps[i].position());
        if (d < closest_d) {
            closest = i;
            closest_d = d;
        }
        if (d > closest_d + 2.0 * config.lookahead) break;
    }
    tracker.progress = closest;

    std::size_t target = tracker.progress;
    while (target + 1 < wps.size() && distance(here, wps[target + 1].position()) <= config.lookahead &&
           hugs_path(wps, tracker.progress, target + 1, here, config.corner_tolerance))
        ++target;
    if (target == tracker.progress && distance(here, wps[target].position()) <= config.lookahead &&
        target + 1 < wps.size())
        ++target;

    const Point2 aim = wps[target].position();
    const double bearing = std::atan2(aim.y - here.y, aim.x - here.x);
    const double alpha = normalize_angle(bearing - pose.theta);

    if (std::abs(alpha) > config.rotate_in_place) {
        const double w = std::clamp(config.heading_gain * alpha, -agent.max_angular, agent.max_angular);
        return {{0, w}, FollowStatus::Following};
    }

    double v = std::min(agent.max_linear, std::max(config.min_speed, config.approach_gain * to_goal));
    v *= std::cos(alpha);
    const double ld = std::max(distance(here, aim), 1e-3);
    double w = v * 2.0 * std::sin(alpha) / ld;
    if (std::abs(w) > agent.max_angular) {
        v *= agent.max_angular / std::abs(w);
        w = std::copysign(agent.max_angular, w);
    }
    return {{v, w}, FollowStatus::Following};
}

bool invalidate_on_diff(const PathTracker& tracker, const mapping::MapDiff& diff, const GridGeometry& geometry,
                        double inflation_radius) {
    const auto& cells = tracker.path.cells;
    if (cells.empty()) return false;
    const std::size_t from = std::min(tracker.progress, cells.size() - 1);
    for (const auto& change : diff.changed) {
        if (change.cls == mapping::CellClass::Free) continue;
        const Point2 c = geometry.cell_center(change.index);
        for (std::size_t i = from; i < cells.size(); ++i)
            if (distance(geometry.cell_center(cells[i]), c) <= inflation_radius + 1e-9) return true;
    }
    return false;
}

}  // namespace teamsim::planning
