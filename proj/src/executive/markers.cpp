#include "teamsim/executive/markers.hpp"

#include <cmath>

namespace teamsim::executive {

const char* to_string(MarkerSource s) { return s == MarkerSource::Manual ? "manual" : "scripted"; }

std::optional<MarkerSource> parse_marker_source(const std::string& s) {
    if (s == "manual") return MarkerSource::Manual;
    if (s == "scripted") return MarkerSource::Scripted;
    return std::nullopt;
}

bool MarkerRegistry::add(const Marker& marker) {
    if (!std::isfinite(marker.position.x) || !std::isfinite(marker.position.y))
        throw std::invalid_argument("marker position must be finite");
    if (marker.id.empty()) throw std::invalid_argument("marker id must not be empty");
    const auto it = by_id_.find(marker.id);
    if (it != by_id_.end()) {
        if (markers_[it->second] == marker) return false;
        throw MarkerExists("marker id already in use: " + marker.id);
    }
    by_id_.emplace(marker.id, markers_.size());
    markers_.push_back(marker);
    return true;
}

const Marker* MarkerRegistry::find(const std::string& id) const {
    const auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &markers_[it->second];
}

}  // namespace teamsim::executive
