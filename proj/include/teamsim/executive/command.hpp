#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "teamsim/geometry.hpp"
#include "teamsim/gesture/recognizer.hpp"
#include "teamsim/region.hpp"

namespace teamsim::executive {

enum class Tier { Near, Medium, Far };
enum class CommandKind { Traverse, Explore, Stop, Return };

const char* to_string(Tier t);
const char* to_string(CommandKind k);
std::optional<Tier> parse_tier(std::string_view s);
std::optional<CommandKind> parse_command_kind(std::string_view s);

struct Command {
    CommandKind kind{CommandKind::Stop};
    Tier tier{Tier::Near};                 // meaningful for Traverse / Explore
    Pose2D human_pose;                     // position + gaze heading, robot map frame
    std::int64_t seq{0};
    std::string client{"default"};
    std::optional<KeepInRegion> region;    // explicit keep-in region for Explore

    bool has_tier() const { return kind == CommandKind::Traverse || kind == CommandKind::Explore; }
};

struct ExploreRegionSpec {
    double offset{0};
    double radius{0};
};

struct CommandConfig {
    std::array<double, 3> traverse_distances{2.0, 4.5, 7.0};
    std::array<ExploreRegionSpec, 3> explore_regions{{{7.0, 7.0}, {15.0, 15.0}, {25.0, 25.0}}};
    double return_offset{1.0};

    double traverse_distance(Tier t) const { return traverse_distances[static_cast<std::size_t>(t)]; }
    const ExploreRegionSpec& explore_region(Tier t) const { return explore_regions[static_cast<std::size_t>(t)]; }
    /// Throws std::invalid_argument unless every value is positive.
    void validate() const;
};

using ResolvedGoal = std::variant<Pose2D, KeepInRegion>;

/// Traverse and Return give a pose, Explore a keep-in region. Stop has no goal
/// and throws std::invalid_argument.
ResolvedGoal resolve_goal(const Command& cmd, const CommandConfig& config = {});

/// Maps a recognized gesture to a command: n fingers select the Near/Medium/Far tier.
std::optional<Command> command_from_gesture(const gesture::Gesture& g, const Pose2D& human_pose, std::int64_t seq,
                                            std::string client = "glove");

/// Short operator-facing text, e.g. "goto medium", "explore far", "stop", "return".
std::string describe(const Command& cmd);

}  // namespace teamsim::executive
