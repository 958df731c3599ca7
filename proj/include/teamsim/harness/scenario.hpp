#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "teamsim/executive/command.hpp"
#include "teamsim/executive/executive.hpp"
#include "teamsim/executive/markers.hpp"
#include "teamsim/geometry.hpp"
#include "teamsim/gesture/glove.hpp"
#include "teamsim/region.hpp"
#include "teamsim/sim/world.hpp"

namespace teamsim::harness {

struct ScenarioInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Every coordinate in a scenario is a ground-truth world coordinate. Actions
// performed by the human are converted into the human device frame by the
// client before they go on the wire.

/// Glove frames fed through the activation FSM. A spec is synthesized at run
/// time from the run seed; a recorded trace is replayed with its times shifted
/// by the action time.
struct GloveAction {
    std::string spec;  // e.g. "traverse:1"; empty when `trace` is set
    std::string source;
    std::vector<gesture::GloveFrame> trace;
};

/// Command sent directly by the human client, bypassing the glove.
struct CommandAction {
    executive::CommandKind kind{executive::CommandKind::Stop};
    executive::Tier tier{executive::Tier::Near};
    std::optional<Pose2D> human_pose;  // default: the human's pose when sent
    std::optional<KeepInRegion> region;
};

/// The human walks in a straight line, then turns to the heading if given.
struct WalkAction {
    Point2 target;
    std::optional<double> heading;
};

struct MarkerAction {
    executive::Marker marker;
    bool from_human{false};  // placed on the human's device rather than inserted by the robot
};

/// Shared landmarks for frame alignment; the human device measures each one
/// with isotropic Gaussian noise.
struct AlignAction {
    std::vector<Point2> landmarks;
    double noise{0};
};

using Action = std::variant<GloveAction, CommandAction, WalkAction, MarkerAction, AlignAction>;

struct ScriptItem {
    double t{0};
    Action action;
};

struct FinalDistance {
    Point2 target;
    double max{0};
};
struct MaxCollisions {
    std::uint64_t max{0};
};
struct MinCoverage {
    double min{0};
};
/// time_to_coverage(fraction) must exist and be at most `within` seconds.
struct CoverageReached {
    double fraction{0.9};
    double within{0};
};
struct MonotoneCoverage {};
struct EventCount {
    executive::EventKind kind{executive::EventKind::Completion};
    int min{0};
    std::optional<int> max;
};
struct FinalMode {
    executive::Mode mode{executive::Mode::Idle};
};
struct AckCount {
    int accepted{0};
    int rejected{0};
};
struct AckText {
    std::string text;
};
/// The robot stopped on its return path, at least `margin` meters from both
/// the pose where the return started and the return goal.
struct HaltedOnReturn {
    double margin{0.5};
};
/// The marker is stored at `position` and the human's console renders it there.
struct MarkerAt {
    std::string id;
    Point2 position;
    double tolerance{0.1};
};
/// At least `min_ticks` ticks with the robot hidden from the human, and a
/// telemetry frame reached the human for every one of them.
struct OccludedTelemetry {
    int min_ticks{1};
};
struct KeepInSound {};

using Assertion = std::variant<FinalDistance, MaxCollisions, MinCoverage, CoverageReached, MonotoneCoverage, EventCount,
                               FinalMode, AckCount, AckText, HaltedOnReturn, MarkerAt, OccludedTelemetry, KeepInSound>;

std::string describe(const Assertion& a);

struct Scenario {
    std::string name;
    std::filesystem::path world_path;
    std::optional<sim::WorldMap> world;
    std::uint64_t seed{0};
    double budget{60.0};
    double dt{0.1};
    double telemetry_period{0.1};
    double coverage_period{1.0};

    Pose2D robot_pose;
    sim::DriftModel robot_drift;
    Pose2D human_pose;
    double human_speed{1.4};
    sim::LidarConfig lidar;
    Transform2D human_frame;  // human device frame -> world frame
    std::optional<KeepInRegion> coverage_region;
    double glove_noise{0.02};

    std::vector<ScriptItem> script;
    std::vector<Assertion> assertions;

    /// Throws ScenarioInvalid on a broken invariant.
    void validate() const;
};

/// Parses a scenario. Relative world and trace paths resolve against
/// `base_dir`; a missing or malformed world raises ScenarioInvalid.
Scenario parse_scenario(std::string_view toml_text, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

/// Glove spec strings: "traverse:N", "explore:N", "stop", "return",
/// "unrecognized" or "idle:SECONDS". Throws ScenarioInvalid for anything else.
std::vector<gesture::GloveFrame> synthesize_glove(std::string_view spec, double t0, double noise, std::uint64_t seed);

}  // namespace teamsim::harness
