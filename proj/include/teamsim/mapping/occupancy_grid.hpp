#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamsim/grid.hpp"
#include "teamsim/region.hpp"
#include "teamsim/sim/world.hpp"

namespace teamsim::mapping {

enum class CellClass : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

const char* to_string(CellClass c);

struct InvalidPose : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyRegion : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SensorModel {
    double l_occ{0.85};
    double l_free{-0.4};
    double clamp{10.0};
    double p_occupied{0.65};
    double p_free{0.35};
};

/// Pure classification of a log-odds value.
CellClass classify(double log_odds, const SensorModel& model = {});

struct CellChange {
    std::size_t index{0};
    CellClass cls{CellClass::Unknown};

    friend bool operator==(const CellChange&, const CellChange&) = default;
};

/// Cells whose class changed in one integration, sorted by index.
struct MapDiff {
    std::uint64_t tick{0};
    std::vector<CellChange> changed;

    bool empty() const { return changed.empty(); }
    friend bool operator==(const MapDiff&, const MapDiff&) = default;
};

class OccupancyGrid {
public:
    explicit OccupancyGrid(GridGeometry geometry, SensorModel model = {});

    const GridGeometry& geometry() const { return geometry_; }
    const SensorModel& model() const { return model_; }
    double log_odds(std::size_t idx) const { return log_odds_[idx]; }
    CellClass cls(std::size_t idx) const { return classes_[idx]; }
    CellClass cls(const Cell& c) const { return classes_[geometry_.index(c)]; }
    std::span<const CellClass> classes() const { return classes_; }

    /// Ray-casts every beam from `pose` (the pose estimate) and applies
    /// log-odds updates: free for cells strictly before the endpoint, occupied
    /// for the endpoint of a hit beam.
    MapDiff integrate_scan(const Pose2D& pose, const sim::Scan& scan, std::uint64_t tick = 0);

    /// Adds `delta` to one cell's log-odds (clamped) and refreshes its class.
    void update_cell(std::size_t idx, double delta);

private:
    GridGeometry geometry_;
    SensorModel model_;
    std::vector<double> log_odds_;
    std::vector<CellClass> classes_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t generation_{0};
};

/// Fraction of region cells (by cell center) whose class is not Unknown.
/// Throws EmptyRegion when no cell center falls in the region.
double coverage(const OccupancyGrid& grid, const std::optional<KeepInRegion>& region = std::nullopt);

/// Immutable class-layer export used for snapshots and replay.
struct GridSnapshot {
    GridGeometry geometry;
    std::uint64_t tick{0};
    std::vector<CellClass> classes;

    friend bool operator==(const GridSnapshot&, const GridSnapshot&) = default;
};

GridSnapshot snapshot(const OccupancyGrid& grid, std::uint64_t tick = 0);

/// Run-length encoding of a class layer: runs of `<letter><count>` with
/// U/F/O letters, e.g. "U12F3O1".
std::string rle_encode(std::span<const CellClass> classes);
std::vector<CellClass> rle_decode(std::string_view text, std::size_t expected_cells);

/// Applies a diff to a class layer in place.
void apply_diff(std::vector<CellClass>& classes, const MapDiff& diff);

}  // namespace teamsim::mapping
