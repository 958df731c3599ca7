#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "teamsim/executive/command.hpp"
#include "teamsim/executive/executive.hpp"
#include "teamsim/executive/markers.hpp"
#include "teamsim/geometry.hpp"
#include "teamsim/gesture/recognizer.hpp"
#include "teamsim/mapping/occupancy_grid.hpp"
#include "teamsim/region.hpp"
#include "teamsim/sim/world.hpp"

namespace teamsim::protocol {

inline constexpr int kProtocolVersion = 1;

enum class MessageType {
    Command,
    Ack,
    Telemetry,
    MapDiff,
    MapSnapshot,
    Path,
    Frontiers,
    Marker,
    Event,
    AlignRequest,
    AlignResult,
    Haptic,
};
inline constexpr std::size_t kMessageTypeCount = 12;

/// Wire names, e.g. "MAP_DIFF".
const char* to_string(MessageType t);
std::optional<MessageType> parse_message_type(std::string_view s);

/// Command as sent by a client. Poses and regions are in the sender's frame;
/// the server maps them into the robot frame with the current alignment.
struct CommandMsg {
    executive::CommandKind kind{executive::CommandKind::Stop};
    executive::Tier tier{executive::Tier::Near};
    Pose2D human_pose;
    std::optional<KeepInRegion> region;
    std::string client;  // empty: the connection id names the sender

    friend bool operator==(const CommandMsg&, const CommandMsg&) = default;
};

struct TelemetryMsg {
    std::uint64_t tick{0};
    Pose2D robot_pose;  // estimate, robot map frame
    Pose2D human_pose;
    sim::Velocity velocity;
    executive::Mode mode{executive::Mode::Idle};
    std::optional<Pose2D> goal;
    std::optional<KeepInRegion> region;
    std::optional<double> coverage;  // of the active keep-in region

    friend bool operator==(const TelemetryMsg&, const TelemetryMsg&) = default;
};

/// Empty waypoints clear the displayed path.
struct PathMsg {
    std::vector<Pose2D> waypoints;

    friend bool operator==(const PathMsg&, const PathMsg&) = default;
};

struct FrontierSummary {
    Point2 centroid;
    std::uint64_t size{0};
    double info_gain{0};
    double effort{0};
    double utility{0};
    bool feasible{false};
    std::optional<Pose2D> goal;

    friend bool operator==(const FrontierSummary&, const FrontierSummary&) = default;
};

struct FrontiersMsg {
    std::vector<FrontierSummary> frontiers;
    std::optional<std::uint64_t> selected;  // index into frontiers

    friend bool operator==(const FrontiersMsg&, const FrontiersMsg&) = default;
};

struct Correspondence {
    Point2 human;
    Point2 robot;

    friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

struct AlignRequestMsg {
    std::vector<Correspondence> pairs;

    friend bool operator==(const AlignRequestMsg&, const AlignRequestMsg&) = default;
};

struct AlignResultMsg {
    bool accepted{false};
    Transform2D transform;  // human frame -> robot frame
    double residual{0};
    std::string error;

    friend bool operator==(const AlignResultMsg&, const AlignResultMsg&) = default;
};

struct HapticMsg {
    gesture::HapticPattern pattern{gesture::HapticPattern::QuickPulse};

    friend bool operator==(const HapticMsg&, const HapticMsg&) = default;
};

/// Alternatives are in MessageType order.
using Payload = std::variant<CommandMsg, executive::Ack, TelemetryMsg, mapping::MapDiff, mapping::GridSnapshot,
                             PathMsg, FrontiersMsg, executive::Marker, executive::Event, AlignRequestMsg,
                             AlignResultMsg, HapticMsg>;

struct Envelope {
    int v{kProtocolVersion};
    std::int64_t seq{0};
    double t{0};
    Payload payload;

    MessageType type() const { return static_cast<MessageType>(payload.index()); }

    friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// Fills in the robot-frame Command the executive consumes.
executive::Command to_command(const CommandMsg& msg, std::int64_t seq, const std::string& sender,
                              const Transform2D& human_to_robot);

FrontiersMsg summarize(const std::vector<exploration::Frontier>& frontiers,
                       const std::optional<exploration::Frontier>& selected);

KeepInRegion transform_region(const KeepInRegion& region, const Transform2D& tf);

}  // namespace teamsim::protocol
