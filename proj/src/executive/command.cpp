#include "teamsim/executive/command.hpp"

#include <cmath>

namespace teamsim::executive {

const char* to_string(Tier t) {
    switch (t) {
        case Tier::Near: return "near";
        case Tier::Medium: return "medium";
        case Tier::Far: return "far";
    }
    return "?";
}

const char* to_string(CommandKind k) {
    switch (k) {
        case CommandKind::Traverse: return "traverse";
        case CommandKind::Explore: return "explore";
        case CommandKind::Stop: return "stop";
        case CommandKind::Return: return "return";
    }
    return "?";
}

std::optional<Tier> parse_tier(std::string_view s) {
    if (s == "near") return Tier::Near;
    if (s == "medium") return Tier::Medium;
    if (s == "far") return Tier::Far;
    return std::nullopt;
}

std::optional<CommandKind> parse_command_kind(std::string_view s) {
    if (s == "traverse") return CommandKind::Traverse;
    if (s == "explore") return CommandKind::Explore;
    if (s == "stop") return CommandKind::Stop;
    if (s == "return") return CommandKind::Return;
    return std::nullopt;
}

void CommandConfig::validate() const {
    for (double d : traverse_distances)
        if (!(d > 0)) throw std::invalid_argument("traverse distances must be positive");
    for (const auto& r : explore_regions)
        if (!(r.offset > 0) || !(r.radius > 0)) throw std::invalid_argument("explore offsets and radii must be positive");
    if (!(return_offset > 0)) throw std::invalid_argument("return offset must be positive");
}

ResolvedGoal resolve_goal(const Command& cmd, const CommandConfig& config) {
    const Point2 origin = cmd.human_pose.position();
    const Point2 gaze = cmd.human_pose.heading();
    switch (cmd.kind) {
        case CommandKind::Traverse: {
            const Point2 p = origin + gaze * config.traverse_distance(cmd.tier);
            return make_pose(p.x, p.y, cmd.human_pose.theta);
        }
        case CommandKind::Explore: {
            if (cmd.region) return *cmd.region;
            const auto& spec = config.explore_region(cmd.tier);
            return KeepInRegion::circle(origin + gaze * spec.offset, spec.radius);
        }
        case CommandKind::Return: {
            const Point2 p = origin + gaze * config.return_offset;
            return make_pose(p.x, p.y, cmd.human_pose.theta + kPi);
        }
        case CommandKind::Stop: break;
    }
    throw std::invalid_argument("stop has no goal");
}

std::optional<Command> command_from_gesture(const gesture::Gesture& g, const Pose2D& human_pose, std::int64_t seq,
                                            std::string client) {
    Command cmd;
    cmd.human_pose = human_pose;
    cmd.seq = seq;
    cmd.client = std::move(client);
    switch (g.kind) {
        case gesture::GestureKind::TraversePoint:
        case gesture::GestureKind::ExploreOscillate:
            if (g.fingers < 1 || g.fingers > 3) return std::nullopt;
            cmd.kind = g.kind == gesture::GestureKind::TraversePoint ? CommandKind::Traverse : CommandKind::Explore;
            cmd.tier = static_cast<Tier>(g.fingers - 1);
            return cmd;
        case gesture::GestureKind::StopPalm:
            cmd.kind = CommandKind::Stop;
            return cmd;
        case gesture::GestureKind::ReturnSign:
            cmd.kind = CommandKind::Return;
            return cmd;
        case gesture::GestureKind::Unrecognized: break;
    }
    return std::nullopt;
}

std::string describe(const Command& cmd) {
    switch (cmd.kind) {
        case CommandKind::Traverse: return std::string("goto ") + to_string(cmd.tier);
        case CommandKind::Explore:
            return cmd.region ? std::string("explore region") : std::string("explore ") + to_string(cmd.tier);
        case CommandKind::Stop: return "stop";
        case CommandKind::Return: return "return";
    }
    return "?";
}

}  // namespace teamsim::executive
