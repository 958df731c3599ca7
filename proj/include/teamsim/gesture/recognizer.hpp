#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "teamsim/gesture/glove.hpp"

namespace teamsim::gesture {

enum class GestureKind { TraversePoint, ExploreOscillate, StopPalm, ReturnSign, Unrecognized };

struct Gesture {
    GestureKind kind{GestureKind::Unrecognized};
    int fingers{0};  // 1..3 for TraversePoint / ExploreOscillate, else 0

    static Gesture traverse(int n) { return {GestureKind::TraversePoint, n}; }
    static Gesture explore(int n) { return {GestureKind::ExploreOscillate, n}; }
    static Gesture stop() { return {GestureKind::StopPalm, 0}; }
    static Gesture return_sign() { return {GestureKind::ReturnSign, 0}; }
    static Gesture unrecognized() { return {}; }

    friend bool operator==(const Gesture&, const Gesture&) = default;
};

std::string to_string(const Gesture& g);

struct WindowTooShort : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FrameOrderError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RecognizerConfig {
    double fist_threshold{0.8};
    double activation_hold{0.5};   // s
    double gesture_window{1.5};    // s
    double extended_below{0.3};
    double flexed_above{0.7};
    double min_amplitude{0.15};
    int min_crossings{2};
    double crossing_band{0.05};    // hysteresis around the window mean
    int smoothing{5};              // centered moving-average length
};

/// Number of zero crossings of `signal` about its mean; 0 when the smoothed
/// half peak-to-peak amplitude is below `min_amplitude`.
int oscillation_count(std::span<const double> signal, const RecognizerConfig& config = {});

/// Classifies the frames following activation. `window_start` is the arming
/// time; throws WindowTooShort if the frames end before window_start + T.
/// Leading frames that still show the arming fist are not part of the shape.
Gesture classify_window(std::span<const GloveFrame> frames, double window_start,
                        const RecognizerConfig& config = {});
Gesture classify_window(std::span<const GloveFrame> frames, const RecognizerConfig& config = {});

enum class HapticPattern { QuickPulse, LongPulse };

const char* to_string(HapticPattern p);
std::optional<HapticPattern> parse_haptic_pattern(std::string_view s);

struct HapticEvent {
    HapticPattern pattern{HapticPattern::QuickPulse};
    double t{0};

    friend bool operator==(const HapticEvent&, const HapticEvent&) = default;
};

enum class ActivationPhase { Idle, Armed };

struct ActivationOutput {
    std::vector<HapticEvent> haptics;
    std::optional<Gesture> gesture;  // recognized command gesture, if any
};

/// Fist-hold activation followed by one gesture window. A fist (all five
/// flexions above the threshold) held for the activation time arms the FSM
/// with a quick pulse; the next window yields a gesture or a long pulse.
class ActivationFsm {
public:
    explicit ActivationFsm(RecognizerConfig config = {}) : config_(config) {}

    ActivationOutput step(const GloveFrame& frame);

    ActivationPhase phase() const { return phase_; }
    std::optional<double> armed_at() const {
        return phase_ == ActivationPhase::Armed ? std::optional(armed_at_) : std::nullopt;
    }
    const RecognizerConfig& config() const { return config_; }

private:
    RecognizerConfig config_;
    ActivationPhase phase_{ActivationPhase::Idle};
    std::optional<double> fist_since_;
    std::optional<double> last_t_;
    double armed_at_{0};
    std::vector<GloveFrame> window_;
};

}  // namespace teamsim::gesture
