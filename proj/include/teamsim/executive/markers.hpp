#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamsim/geometry.hpp"

namespace teamsim::executive {

enum class MarkerSource { Manual, Scripted };

const char* to_string(MarkerSource s);
std::optional<MarkerSource> parse_marker_source(const std::string& s);

/// Object of interest pinned in the robot map frame.
struct Marker {
    std::string id;
    Point2 position;
    std::string label;
    MarkerSource source{MarkerSource::Manual};

    friend bool operator==(const Marker&, const Marker&) = default;
};

struct MarkerExists : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class MarkerRegistry {
public:
    /// Stores the marker and returns true. Re-adding an identical marker is a
    /// no-op returning false; a different marker under an existing id throws
    /// MarkerExists. Non-finite positions throw std::invalid_argument.
    bool add(const Marker& marker);

    const Marker* find(const std::string& id) const;
    /// Markers in insertion order.
    const std::vector<Marker>& all() const { return markers_; }
    std::size_t size() const { return markers_.size(); }

private:
    std::vector<Marker> markers_;
    std::map<std::string, std::size_t> by_id_;
};

}  // namespace teamsim::executive
