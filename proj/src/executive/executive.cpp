#include "teamsim/executive/executive.hpp"

#include <cmath>
#include <sstream>

namespace teamsim::executive {

const char* to_string(Mode m) {
    switch (m) {
        case Mode::Idle: return "IDLE";
        case Mode::Traversing: return "TRAVERSING";
        case Mode::Exploring: return "EXPLORING";
        case Mode::Returning: return "RETURNING";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
    for (auto m : {Mode::Idle, Mode::Traversing, Mode::Exploring, Mode::Returning})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

const char* to_string(AckReason r) {
    switch (r) {
        case AckReason::Ok: return "OK";
        case AckReason::Stale: return "STALE";
        case AckReason::Unreachable: return "UNREACHABLE";
        case AckReason::StartBlocked: return "START_BLOCKED";
    }
    return "?";
}

std::optional<AckReason> parse_ack_reason(std::string_view s) {
    for (auto r : {AckReason::Ok, AckReason::Stale, AckReason::Unreachable, AckReason::StartBlocked})
        if (s == to_string(r)) return r;
    return std::nullopt;
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Completion: return "completion";
        case EventKind::ExplorationComplete: return "exploration_complete";
        case EventKind::FrontierSelected: return "frontier_selected";
        case EventKind::FrontierBlacklisted: return "frontier_blacklisted";
        case EventKind::Replanned: return "replanned";
        case EventKind::TraverseFailed: return "traverse_failed";
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
    for (auto k : {EventKind::Completion, EventKind::ExplorationComplete, EventKind::FrontierSelected,
                   EventKind::FrontierBlacklisted, EventKind::Replanned, EventKind::TraverseFailed})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

Executive::Executive(ExecutiveConfig config) : config_(std::move(config)) { config_.commands.validate(); }

std::optional<std::int64_t> Executive::last_seq(const std::string& client) const {
    const auto it = last_seq_.find(client);
    if (it == last_seq_.end()) return std::nullopt;
    return it->second;
}

bool Executive::consistent() const {
    const bool goal_mode = mode_ == Mode::Traversing || mode_ == Mode::Returning;
    if (active_region_.has_value() != (mode_ == Mode::Exploring)) return false;
    if (active_goal_.has_value() != goal_mode) return false;
    if (mode_ == Mode::Idle && tracker_) return false;
    return true;
}

void Executive::clear_behavior() {
    if (tracker_) path_dirty_ = true;
    if (!frontiers_.empty()) frontiers_dirty_ = true;
    mode_ = Mode::Idle;
    active_goal_.reset();
    active_region_.reset();
    tracker_.reset();
    unreachable_since_.reset();
    frontiers_.clear();
    selected_.reset();
    frontier_goal_cell_.reset();
}

void Executive::set_path(planning::Path path, bool ignore_final_heading) {
    tracker_ = planning::PathTracker{std::move(path), 0, ignore_final_heading};
    path_dirty_ = true;
    best_distance_ = std::numeric_limits<double>::infinity();
    best_distance_t_ = 0;
}

Ack Executive::handle_command(const Command& cmd, const planning::InflatedCostmap& costmap,
                              const sim::AgentState& robot) {
    Ack ack{cmd.seq, cmd.client, false, AckReason::Ok, describe(cmd)};
    const auto last = last_seq_.find(cmd.client);
    if (last != last_seq_.end() && cmd.seq <= last->second) {
        ack.reason = AckReason::Stale;
        return ack;
    }
    last_seq_[cmd.client] = cmd.seq;

    switch (cmd.kind) {
        case CommandKind::Stop:
            clear_behavior();
            break;
        case CommandKind::Traverse:
        case CommandKind::Return: {
            const Pose2D goal = std::get<Pose2D>(resolve_goal(cmd, config_.commands));
            planning::Path path;
            try {
                path = planning::plan(costmap, robot.estimated_pose, goal);
            } catch (const planning::GoalUnreachable&) {
                ack.reason = AckReason::Unreachable;
                return ack;
            } catch (const planning::StartBlocked&) {
                ack.reason = AckReason::StartBlocked;
                return ack;
            }
            clear_behavior();
            mode_ = cmd.kind == CommandKind::Traverse ? Mode::Traversing : Mode::Returning;
            active_goal_ = goal;
            set_path(std::move(path), false);
            break;
        }
        case CommandKind::Explore: {
            KeepInRegion region = std::get<KeepInRegion>(resolve_goal(cmd, config_.commands));
            clear_behavior();
            mode_ = Mode::Exploring;
            active_region_ = std::move(region);
            failures_.clear();
            blacklist_.clear();
            reached_goals_.clear();
            break;
        }
    }
    ack.accepted = true;
    return ack;
}

bool Executive::stalled(const sim::AgentState& robot, double t) {
    if (!tracker_ || tracker_->path.empty()) return false;
    const double d = distance(robot.estimated_pose.position(), tracker_->path.waypoints.back().position());
    if (!std::isfinite(best_distance_) || d < best_distance_ - config_.stall_progress) {
        best_distance_ = d;
        best_distance_t_ = t;
        return false;
    }
    return t - best_distance_t_ >= config_.stall_timeout;
}

TickOutput Executive::tick(const mapping::OccupancyGrid& grid, const planning::InflatedCostmap& costmap,
                           const sim::AgentState& robot, const mapping::MapDiff& diff, double /*dt*/, double t) {
    TickOutput out;
    switch (mode_) {
        case Mode::Idle: break;
        case Mode::Traversing:
        case Mode::Returning: tick_goal(costmap, robot, diff, t, out); break;
        case Mode::Exploring: tick_explore(grid, costmap, robot, diff, t, out); break;
    }
    if (mode_ == Mode::Idle) out.command = {0, 0};
    out.path_changed = path_dirty_;
    out.frontiers_changed = frontiers_dirty_;
    path_dirty_ = false;
    frontiers_dirty_ = false;
    return out;
}

void Executive::tick_goal(const planning::InflatedCostmap& costmap, const sim::AgentState& robot,
                          const mapping::MapDiff& diff, double t, TickOutput& out) {
    const double inflation = costmap.inflation_radius();
    const bool need_replan =
        !tracker_ || planning::invalidate_on_diff(*tracker_, diff, costmap.geometry(), inflation) || stalled(robot, t);
    if (need_replan) {
        try {
            set_path(planning::plan(costmap, robot.estimated_pose, *active_goal_), false);
            unreachable_since_.reset();
            out.events.push_back({EventKind::Replanned, t, "", active_goal_});
        } catch (const std::runtime_error&) {
            if (tracker_) path_dirty_ = true;
            tracker_.reset();
            if (!unreachable_since_) unreachable_since_ = t;
            if (t - *unreachable_since_ >= config_.replan_timeout) {
                out.events.push_back({EventKind::TraverseFailed, t, "goal unreachable", active_goal_});
                clear_behavior();
            }
            return;
        }
    }
    const auto r = planning::follow_step(*tracker_, robot, 0.0, config_.follower);
    if (r.status == planning::FollowStatus::Arrived) {
        out.events.push_back({EventKind::Completion, t, to_string(mode_), active_goal_});
        clear_behavior();
        return;
    }
    out.command = r.command;
}

void Executive::note_failure(std::size_t goal_cell, double t, TickOutput& out) {
    if (++failures_[goal_cell] >= config_.blacklist_after && blacklist_.insert(goal_cell).second)
        out.events.push_back({EventKind::FrontierBlacklisted, t, "cell " + std::to_string(goal_cell), std::nullopt});
}

bool Executive::select_next(const mapping::OccupancyGrid& grid, const planning::InflatedCostmap& costmap,
                            const sim::AgentState& robot, double t, TickOutput& out) {
    const GridGeometry& g = grid.geometry();
    auto candidates = exploration::filter_keep_in(
        exploration::detect_frontiers(grid, config_.exploration.min_cluster_size), *active_region_, g);
    frontiers_.clear();
    for (auto& f : candidates) {
        auto scored = exploration::score(std::move(f), grid, costmap, robot.estimated_pose, config_.exploration,
                                         active_region_);
        if (scored.goal) {
            const std::size_t cell = g.index(g.cell_containing(scored.goal->position()));
            // A goal we already stood on did not resolve this frontier; going back would loop.
            if (blacklist_.count(cell) || reached_goals_.count(cell)) scored.feasible = false;
        }
        frontiers_.push_back(std::move(scored));
    }
    frontiers_dirty_ = true;
    const auto best = exploration::select_frontier(frontiers_);
    if (!best) return false;
    selected_ = frontiers_[*best];
    frontier_goal_cell_ = g.index(g.cell_containing(selected_->goal->position()));
    set_path(*selected_->path, true);
    std::ostringstream detail;
    detail << "cells=" << selected_->cells.size() << " gain=" << selected_->info_gain
           << " effort=" << selected_->effort;
    out.events.push_back({EventKind::FrontierSelected, t, detail.str(), selected_->goal});
    return true;
}

void Executive::tick_explore(const mapping::OccupancyGrid& grid, const planning::InflatedCostmap& costmap,
                             const sim::AgentState& robot, const mapping::MapDiff& diff, double t, TickOutput& out) {
    if (tracker_) {
        const bool invalid = planning::invalidate_on_diff(*tracker_, diff, costmap.geometry(),
                                                          costmap.inflation_radius());
        const bool stuck = stalled(robot, t);
        if (invalid || stuck) {
            bool replanned = false;
            if (!stuck) {
                try {
                    set_path(planning::plan(costmap, robot.estimated_pose, *selected_->goal), true);
                    replanned = true;
                    out.events.push_back({EventKind::Replanned, t, "", selected_->goal});
                } catch (const std::runtime_error&) {
                }
            }
            if (!replanned) {
                note_failure(*frontier_goal_cell_, t, out);
                tracker_.reset();
                path_dirty_ = true;
            }
        }
    }
    if (tracker_) {
        const auto r = planning::follow_step(*tracker_, robot, 0.0, config_.follower);
        if (r.status == planning::FollowStatus::Following) {
            out.command = r.command;
            return;
        }
        reached_goals_.insert(*frontier_goal_cell_);
        tracker_.reset();
        path_dirty_ = true;
    }
    if (!select_next(grid, costmap, robot, t, out)) {
        out.events.push_back({EventKind::ExplorationComplete, t, "", std::nullopt});
        clear_behavior();
        return;
    }
    const auto r = planning::follow_step(*tracker_, robot, 0.0, config_.follower);
    out.command = r.command;
}

}  // namespace teamsim::executive
