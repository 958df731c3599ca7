#pragma once

#include <span>
#include <stdexcept>

#include "teamsim/geometry.hpp"
#include "teamsim/protocol/messages.hpp"

namespace teamsim::protocol {

struct AlignmentDegenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Alignment {
    Transform2D transform;  // human frame -> robot frame
    double residual{0};     // RMS of |T(p_human) - p_robot|, m
};

/// Closed-form least-squares SE(2) fit. Throws AlignmentDegenerate for fewer
/// than two pairs or when every human point coincides.
Alignment estimate_alignment(std::span<const Correspondence> pairs);

}  // namespace teamsim::protocol
