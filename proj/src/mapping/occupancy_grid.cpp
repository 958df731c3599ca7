#include "teamsim/mapping/occupancy_grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace teamsim::mapping {

const char* to_string(CellClass c) {
    switch (c) {
        case CellClass::Unknown: return "UNKNOWN";
        case CellClass::Free: return "FREE";
        case CellClass::Occupied: return "OCCUPIED";
    }
    return "?";
}

CellClass classify(double log_odds, const SensorModel& model) {
    const double p = 1.0 / (1.0 + std::exp(-log_odds));
    if (p > model.p_occupied) return CellClass::Occupied;
    if (p < model.p_free) return CellClass::Free;
    return CellClass::Unknown;
}

OccupancyGrid::OccupancyGrid(GridGeometry geometry, SensorModel model)
    : geometry_(geometry),
      model_(model),
      log_odds_(geometry.size(), 0.0),
      classes_(geometry.size(), CellClass::Unknown),
      stamp_(geometry.size(), 0) {
    if (!(geometry.resolution > 0)) throw std::invalid_argument("grid resolution must be positive");
}

void OccupancyGrid::update_cell(std::size_t idx, double delta) {
    log_odds_[idx] = std::clamp(log_odds_[idx] + delta, -model_.clamp, model_.clamp);
    classes_[idx] = classify(log_odds_[idx], model_);
}

MapDiff OccupancyGrid::integrate_scan(const Pose2D& pose, const sim::Scan& scan, std::uint64_t tick) {
    if (!geometry_.locate(pose.position())) throw InvalidPose("scan pose outside the occupancy grid");

    ++generation_;
    std::vector<std::size_t> touched;
    std::vector<CellClass> before;
    auto touch = [&](std::size_t idx) {
        if (stamp_[idx] != generation_) {
            stamp_[idx] = generation_;
            touched.push_back(idx);
            before.push_back(classes_[idx]);
        }
    };

    // The endpoint is the first cell the ray leaves beyond the measured range,
    // so a beam stopping exactly on a wall face lands in the wall cell.
    const double eps = 1e-6 * geometry_.resolution;
    std::vector<std::size_t> ray;
    for (std::size_t i = 0; i < scan.beams.size(); ++i) {
        const sim::Beam& beam = scan.beams[i];
        const double angle = pose.theta + static_cast<double>(i) * scan.fov / static_cast<double>(scan.beams.size());
        const double reach = beam.range + eps;
        ray.clear();
        bool reached_end = false;
        traverse_ray(geometry_, pose.position(), angle, reach, [&](const Cell& c, double, double t_exit) {
            ray.push_back(geometry_.index(c));
            reached_end = t_exit > beam.range;
            return !reached_end;
        });
        if (ray.empty()) continue;
        const std::size_t free_count = reached_end ? ray.size() - 1 : ray.size();
        for (std::size_t k = 0; k < free_count; ++k) {
            touch(ray[k]);
            log_odds_[ray[k]] = std::clamp(log_odds_[ray[k]] + model_.l_free, -model_.clamp, model_.clamp);
        }
        if (reached_end && beam.hit) {
            const std::size_t end = ray.back();
            touch(end);
            log_odds_[end] = std::clamp(log_odds_[end] + model_.l_occ, -model_.clamp, model_.clamp);
        }
    }

    MapDiff diff{tick, {}};
    for (std::size_t k = 0; k < touched.size(); ++k) {
        const std::size_t idx = touched[k];
        classes_[idx] = classify(log_odds_[idx], model_);
        if (classes_[idx] != before[k]) diff.changed.push_back({idx, classes_[idx]});
    }
    std::sort(diff.changed.begin(), diff.changed.end(),
              [](const CellChange& a, const CellChange& b) { return a.index < b.index; });
    return diff;
}

double coverage(const OccupancyGrid& grid, const std::optional<KeepInRegion>& region) {
    const GridGeometry& g = grid.geometry();
    std::size_t total = 0;
    std::size_t known = 0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (region && !region->contains(g.cell_center(idx))) continue;
        ++total;
        if (grid.cls(idx) != CellClass::Unknown) ++known;
    }
    if (total == 0) throw EmptyRegion("region contains no grid cells");
    return static_cast<double>(known) / static_cast<double>(total);
}

GridSnapshot snapshot(const OccupancyGrid& grid, std::uint64_t tick) {
    return {grid.geometry(), tick, {grid.classes().begin(), grid.classes().end()}};
}

namespace {

char letter(CellClass c) {
    switch (c) {
        case CellClass::Unknown: return 'U';
        case CellClass::Free: return 'F';
        case CellClass::Occupied: return 'O';
    }
    return 'U';
}

}  // namespace

std::string rle_encode(std::span<const CellClass> classes) {
    std::string out;
    std::size_t i = 0;
    while (i < classes.size()) {
        std::size_t j = i;
        while (j < classes.size() && classes[j] == classes[i]) ++j;
        out += letter(classes[i]);
        out += std::to_string(j - i);
        i = j;
    }
    return out;
}

std::vector<CellClass> rle_decode(std::string_view text, std::size_t expected_cells) {
    std::vector<CellClass> out;
    out.reserve(expected_cells);
    std::size_t pos = 0;
    while (pos < text.size()) {
        CellClass cls;
        switch (text[pos]) {
            case 'U': cls = CellClass::Unknown; break;
            case 'F': cls = CellClass::Free; break;
            case 'O': cls = CellClass::Occupied; break;
            default: throw std::invalid_argument("bad RLE class letter at offset " + std::to_string(pos));
        }
        ++pos;
        std::size_t count = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), count);
        if (ec != std::errc{} || count == 0)
            throw std::invalid_argument("bad RLE run length at offset " + std::to_string(pos));
        pos = static_cast<std::size_t>(ptr - text.data());
        if (out.size() + count > expected_cells) throw std::invalid_argument("RLE exceeds grid size");
        out.insert(out.end(), count, cls);
    }
    if (out.size() != expected_cells) throw std::invalid_argument("RLE shorter than grid size");
    return out;
}

void apply_diff(std::vector<CellClass>& classes, const MapDiff& diff) {
    for (const auto& ch : diff.changed) {
        if (ch.index >= classes.size()) throw std::out_of_range("diff cell index outside grid");
        classes[ch.index] = ch.cls;
    }
}

}  // namespace teamsim::mapping
