#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "teamsim/geometry.hpp"

namespace teamsim::harness {

struct CoverageSample {
    double t{0};
    double fraction{0};

    friend bool operator==(const CoverageSample&, const CoverageSample&) = default;
};

struct MissionMetrics {
    std::vector<CoverageSample> coverage_curve;
    std::map<std::string, int> commands_issued;  // by command kind, as received by the robot
    std::map<std::string, int> events;           // by event kind
    int acks_accepted{0};
    int acks_rejected{0};
    std::uint64_t collisions{0};
    double distance_traveled{0};
    Pose2D final_robot_pose;
    std::string final_mode;
    double sim_time{0};
    std::uint64_t ticks{0};
    std::uint64_t keep_in_checks{0};
    std::uint64_t keep_in_violations{0};

    /// First sample time whose fraction reaches p.
    std::optional<double> time_to_coverage(double p) const;
    double final_coverage() const { return coverage_curve.empty() ? 0.0 : coverage_curve.back().fraction; }
    bool coverage_monotone() const;

    friend bool operator==(const MissionMetrics&, const MissionMetrics&) = default;
};

struct AssertionResult {
    std::string description;
    bool passed{false};
    std::string detail;

    friend bool operator==(const AssertionResult&, const AssertionResult&) = default;
};

struct Summary {
    std::string scenario;
    std::uint64_t seed{0};
    std::string transport;
    MissionMetrics metrics;
    std::vector<AssertionResult> assertions;

    bool passed() const;
    friend bool operator==(const Summary&, const Summary&) = default;
};

/// Machine-readable summary: one JSON object with stable key order.
std::string to_json(const Summary& s);
/// Inverse of to_json; throws std::invalid_argument on malformed input.
Summary summary_from_json(std::string_view text);

/// Human-readable report: coverage curve table, command counts, assertion
/// pass/fail lines.
std::string render_report(const Summary& s);

}  // namespace teamsim::harness
