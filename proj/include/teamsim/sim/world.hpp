#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "teamsim/geometry.hpp"
#include "teamsim/grid.hpp"
#include "teamsim/random.hpp"

namespace teamsim::sim {

enum class Terrain : std::uint8_t { Open, Wall };

struct WorldFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidOrigin : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Static ground-truth obstacle map. Closed world: every boundary cell is a wall.
class WorldMap {
public:
    WorldMap(GridGeometry geometry, std::vector<Terrain> cells);

    /// Parses the ASCII world format: `resolution <float>` then rows of '#'/'.'
    /// with row 0 as the top (max-y) row.
    static WorldMap parse(std::string_view text, Point2 origin = {});
    static WorldMap load(const std::filesystem::path& path, Point2 origin = {});

    const GridGeometry& geometry() const { return geometry_; }
    Terrain at(const Cell& c) const { return cells_[geometry_.index(c)]; }
    /// Out-of-bounds cells count as walls.
    bool is_wall(const Cell& c) const { return !geometry_.in_bounds(c) || at(c) == Terrain::Wall; }
    bool is_wall_at(const Point2& p) const { return is_wall(geometry_.cell_containing(p)); }
    std::span<const Terrain> cells() const { return cells_; }

    std::string to_text() const;

private:
    GridGeometry geometry_;
    std::vector<Terrain> cells_;
};

struct LidarConfig {
    int beam_count{360};
    double fov{kTwoPi};
    double max_range{100.0};
    double range_noise_sigma{0.0};

    void validate() const;
};

struct Beam {
    double range{0};
    bool hit{false};

    friend bool operator==(const Beam&, const Beam&) = default;
};

struct Scan {
    Pose2D pose;
    double fov{kTwoPi};
    double max_range{100.0};
    std::vector<Beam> beams;

    double angle_of(std::size_t i) const {
        return pose.theta + static_cast<double>(i) * fov / static_cast<double>(beams.size());
    }

    friend bool operator==(const Scan&, const Scan&) = default;
};

/// Moving circular body seen by the lidar (the human teammate). The lidar sees
/// it as the cells whose centers it covers.
struct CircleObstacle {
    Point2 center;
    double radius{0};
};

struct RayHit {
    double range{0};
    bool hit{false};
};

/// Distance along the ray to the first wall-cell or body-cell boundary,
/// or (max_range, false). Throws InvalidOrigin if the origin is outside the map
/// or inside a wall.
RayHit raycast(const WorldMap& world, const Pose2D& origin, double angle, double max_range,
               std::span<const CircleObstacle> dynamic = {});

Scan scan(const WorldMap& world, const Pose2D& sensor_pose, const LidarConfig& config, RandomStream& noise,
          std::span<const CircleObstacle> dynamic = {});

struct DriftModel {
    double yaw_rate_bias_sigma{0};  // rad / sqrt(s)
    double translation_sigma{0};    // m / sqrt(s)
    std::uint64_t seed{0};

    bool enabled() const { return yaw_rate_bias_sigma > 0 || translation_sigma > 0; }
};

struct Velocity {
    double linear{0};
    double angular{0};

    friend bool operator==(const Velocity&, const Velocity&) = default;
};

struct AgentState {
    Pose2D true_pose;
    Pose2D estimated_pose;
    Velocity commanded;
    double max_linear{2.0};
    double max_angular{2.0};
    double radius{0.3};
    bool blocked{false};           // last step's motion was refused
    std::uint64_t block_count{0};  // ticks with refused motion

    DriftModel drift;
    Transform2D drift_offset;  // estimated = drift_offset(true)
    RandomStream drift_rng{0};

    static AgentState robot(Pose2D pose, DriftModel drift = {});
    static AgentState human(Pose2D pose);
};

struct Agents {
    AgentState robot;
    AgentState human;
};

/// True if a disc at `center` overlaps any wall cell.
bool footprint_hits_wall(const WorldMap& world, const Point2& center, double radius);

/// Advances both agents by dt with velocity clamping, unicycle kinematics,
/// wall and agent-agent blocking, and pose-estimate drift.
void step(const WorldMap& world, Agents& agents, double dt);

}  // namespace teamsim::sim
