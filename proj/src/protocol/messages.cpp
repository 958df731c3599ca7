#include "teamsim/protocol/messages.hpp"

#include <array>

namespace teamsim::protocol {

namespace {

constexpr std::array<const char*, kMessageTypeCount> kTypeNames{
    "COMMAND", "ACK",    "TELEMETRY", "MAP_DIFF",      "MAP_SNAPSHOT", "PATH",
    "FRONTIERS", "MARKER", "EVENT",   "ALIGN_REQUEST", "ALIGN_RESULT", "HAPTIC",
};

}  // namespace

const char* to_string(MessageType t) { return kTypeNames[static_cast<std::size_t>(t)]; }

std::optional<MessageType> parse_message_type(std::string_view s) {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i)
        if (s == kTypeNames[i]) return static_cast<MessageType>(i);
    return std::nullopt;
}

KeepInRegion transform_region(const KeepInRegion& region, const Transform2D& tf) {
    if (region.is_circle()) {
        const auto& c = region.as_circle();
        return KeepInRegion::circle(tf.apply(c.center), c.radius);
    }
    std::vector<Point2> vertices;
    for (const auto& v : region.as_polygon().vertices) vertices.push_back(tf.apply(v));
    return KeepInRegion::polygon(std::move(vertices));
}

executive::Command to_command(const CommandMsg& msg, std::int64_t seq, const std::string& sender,
                              const Transform2D& human_to_robot) {
    executive::Command cmd;
    cmd.kind = msg.kind;
    cmd.tier = msg.tier;
    cmd.human_pose = human_to_robot.apply(msg.human_pose);
    cmd.seq = seq;
    cmd.client = msg.client.empty() ? sender : msg.client;
    if (msg.region) cmd.region = transform_region(*msg.region, human_to_robot);
    return cmd;
}

FrontiersMsg summarize(const std::vector<exploration::Frontier>& frontiers,
                       const std::optional<exploration::Frontier>& selected) {
    FrontiersMsg msg;
    for (std::size_t i = 0; i < frontiers.size(); ++i) {
        const auto& f = frontiers[i];
        msg.frontiers.push_back({f.centroid, f.cells.size(), f.info_gain, f.effort, f.utility, f.feasible, f.goal});
        if (selected && selected->first_cell() == f.first_cell()) msg.selected = i;
    }
    return msg;
}

}  // namespace teamsim::protocol
