#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "teamsim/harness/metrics.hpp"
#include "teamsim/harness/replay.hpp"
#include "teamsim/harness/scenario.hpp"
#include "teamsim/mapping/occupancy_grid.hpp"
#include "teamsim/protocol/net.hpp"

namespace teamsim::harness {

enum class Transport { Loopback, Tcp };

const char* to_string(Transport t);
std::optional<Transport> parse_transport(std::string_view s);

/// Serves the mission to outside clients in wall-clock time.
struct LiveOptions {
    protocol::ServerConfig server;
    double speed{1.0};               // sim seconds per wall-clock second
    std::optional<double> duration;  // sim seconds; defaults to the scenario budget
    std::function<void(unsigned short tcp_port, unsigned short ws_port)> on_listening;
};

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides the scenario seed
    Transport transport{Transport::Loopback};
    std::optional<LiveOptions> live;    // requires the loopback transport
};

/// Robot-side facts an accepted Return left behind.
struct ReturnRecord {
    double t{0};
    Point2 start;
    Pose2D goal;
    std::vector<Pose2D> path;
};

/// Everything a run produced besides the metrics.
struct MissionTrace {
    std::vector<executive::Ack> acks;
    std::vector<executive::Event> events;
    std::vector<executive::Marker> markers;  // robot registry, insertion order
    std::optional<ReturnRecord> last_return;
    sim::Velocity final_command;
    Pose2D final_estimate;
    std::set<std::uint64_t> occluded_telemetry_ticks;  // telemetry published while occluded
    std::uint64_t occluded_ticks{0};
    ConsoleView human_view;                             // the human client's console
    std::set<std::uint64_t> human_telemetry_ticks;      // telemetry ticks the human received
    std::uint64_t inbound_rejected{0};                  // markers refused, unexpected types
};

struct MissionResult {
    Summary summary;
    MissionTrace trace;
    std::vector<ReplayLine> replay;
    mapping::GridSnapshot final_map;

    const MissionMetrics& metrics() const { return summary.metrics; }
};

/// Runs a scenario headlessly. The human client reaches the robot through an
/// in-process hub connection or a real TCP socket on an ephemeral loopback
/// port; both give identical metrics.
MissionResult run(const Scenario& scenario, const RunOptions& options = {});

std::vector<AssertionResult> evaluate(const Scenario& scenario, const MissionResult& result);

}  // namespace teamsim::harness
