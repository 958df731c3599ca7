#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "teamsim/executive/command.hpp"
#include "teamsim/exploration/frontier.hpp"
#include "teamsim/mapping/occupancy_grid.hpp"
#include "teamsim/planning/follower.hpp"
#include "teamsim/planning/planner.hpp"
#include "teamsim/sim/world.hpp"

namespace teamsim::executive {

enum class Mode { Idle, Traversing, Exploring, Returning };
const char* to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

enum class AckReason { Ok, Stale, Unreachable, StartBlocked };
const char* to_string(AckReason r);
std::optional<AckReason> parse_ack_reason(std::string_view s);

struct Ack {
    std::int64_t seq{0};
    std::string client;
    bool accepted{false};
    AckReason reason{AckReason::Ok};
    std::string text;  // describe(command), e.g. "goto medium"

    friend bool operator==(const Ack&, const Ack&) = default;
};

enum class EventKind {
    Completion,           // traverse / return goal reached
    ExplorationComplete,  // no feasible frontier left in the region
    FrontierSelected,
    FrontierBlacklisted,
    Replanned,
    TraverseFailed,       // goal stayed unreachable past the replan timeout
};
const char* to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct Event {
    EventKind kind{EventKind::Completion};
    double t{0};
    std::string detail;
    std::optional<Pose2D> pose;

    friend bool operator==(const Event&, const Event&) = default;
};

struct ExecutiveConfig {
    CommandConfig commands;
    planning::FollowerConfig follower;
    exploration::ExplorationConfig exploration;
    int blacklist_after{3};         // failed plans to one frontier goal
    double replan_timeout{10.0};    // s a traverse goal may stay unreachable
    double stall_timeout{6.0};      // s without progress before a forced replan
    double stall_progress{0.1};     // m of approach that counts as progress
};

struct TickOutput {
    sim::Velocity command;
    std::vector<Event> events;
    bool path_changed{false};
    bool frontiers_changed{false};
};

/// Behavior state machine for the robot. Single writer: commands and ticks
/// must be delivered from one thread in order.
class Executive {
public:
    explicit Executive(ExecutiveConfig config = {});

    /// Applies one command. Stale seqs (not above the client's last seq) are
    /// rejected without touching state; every fresh command yields exactly one Ack.
    Ack handle_command(const Command& cmd, const planning::InflatedCostmap& costmap, const sim::AgentState& robot);

    TickOutput tick(const mapping::OccupancyGrid& grid, const planning::InflatedCostmap& costmap,
                    const sim::AgentState& robot, const mapping::MapDiff& diff, double dt, double t);

    Mode mode() const { return mode_; }
    const std::optional<Pose2D>& active_goal() const { return active_goal_; }
    const std::optional<KeepInRegion>& active_region() const { return active_region_; }
    const planning::Path* active_path() const { return tracker_ ? &tracker_->path : nullptr; }
    /// Scored frontiers of the latest selection round (exploration only).
    const std::vector<exploration::Frontier>& frontiers() const { return frontiers_; }
    const std::optional<exploration::Frontier>& selected_frontier() const { return selected_; }
    std::optional<std::int64_t> last_seq(const std::string& client) const;
    const ExecutiveConfig& config() const { return config_; }

    /// active_region iff Exploring; active_goal iff Traversing/Returning.
    bool consistent() const;

private:
    void clear_behavior();
    void set_path(planning::Path path, bool ignore_final_heading);
    void tick_goal(const planning::InflatedCostmap& costmap, const sim::AgentState& robot,
                   const mapping::MapDiff& diff, double t, TickOutput& out);
    void tick_explore(const mapping::OccupancyGrid& grid, const planning::InflatedCostmap& costmap,
                      const sim::AgentState& robot, const mapping::MapDiff& diff, double t, TickOutput& out);
    bool select_next(const mapping::OccupancyGrid& grid, const planning::InflatedCostmap& costmap,
                     const sim::AgentState& robot, double t, TickOutput& out);
    void note_failure(std::size_t goal_cell, double t, TickOutput& out);
    bool stalled(const sim::AgentState& robot, double t);

    ExecutiveConfig config_;
    Mode mode_{Mode::Idle};
    std::optional<Pose2D> active_goal_;
    std::optional<KeepInRegion> active_region_;
    std::optional<planning::PathTracker> tracker_;
    std::map<std::string, std::int64_t> last_seq_;

    // goal behaviors
    std::optional<double> unreachable_since_;

    // exploration
    std::vector<exploration::Frontier> frontiers_;
    std::optional<exploration::Frontier> selected_;
    std::optional<std::size_t> frontier_goal_cell_;
    std::map<std::size_t, int> failures_;
    std::set<std::size_t> blacklist_;
    std::set<std::size_t> reached_goals_;

    // stall detection
    double best_distance_{0};
    double best_distance_t_{0};

    bool path_dirty_{false};
    bool frontiers_dirty_{false};
};

}  // namespace teamsim::executive
