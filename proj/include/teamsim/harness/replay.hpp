#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teamsim/protocol/messages.hpp"

namespace teamsim::harness {

/// What a console shows, rebuilt purely from the server's frame stream.
struct ConsoleView {
    std::optional<GridGeometry> geometry;
    std::vector<mapping::CellClass> classes;
    std::optional<protocol::TelemetryMsg> telemetry;
    std::vector<Pose2D> path;
    std::optional<protocol::FrontiersMsg> frontiers;
    std::map<std::string, executive::Marker> markers;
    std::vector<executive::Ack> acks;
    std::vector<executive::Event> events;
    std::optional<protocol::AlignResultMsg> alignment;  // latest accepted
    std::string overlay;                                // text of the last accepted Ack
    std::uint64_t haptics{0};
    std::uint64_t frames{0};
    std::uint64_t diffs_before_snapshot{0};
    std::uint64_t seq_gaps{0};
    std::int64_t last_seq{0};

    void apply(const protocol::Envelope& env);
};

struct ReplayLine {
    double t{0};
    bool inbound{false};
    std::string frame;  // without the newline
};

/// `<t>\t<in|out>\t<frame>` per line.
std::string format_replay_line(const ReplayLine& line);

struct ReplayResult {
    ConsoleView view;
    std::uint64_t lines{0};
    std::uint64_t inbound{0};
    std::uint64_t outbound{0};
    std::uint64_t decode_errors{0};
    std::uint64_t malformed_lines{0};
    double last_t{0};
};

/// Feeds every outbound frame of a replay log through the codec into a
/// ConsoleView; inbound frames are decoded and counted.
ReplayResult replay(std::istream& log);

}  // namespace teamsim::harness
