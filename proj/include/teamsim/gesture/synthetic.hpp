#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "teamsim/gesture/glove.hpp"
#include "teamsim/gesture/recognizer.hpp"
#include "teamsim/random.hpp"

namespace teamsim::gesture {

struct TraceParams {
    double noise_sigma{0.02};
    double rate_hz{50.0};
    std::uint64_t seed{0};
    double fist_threshold{0.8};  // level that defines when the fist counts as made
};

struct SyntheticTrace {
    std::vector<GloveFrame> frames;
    std::optional<Gesture> intended;  // nullopt for traces that must not arm
    double fist_onset{0};             // noise-free time every finger passes the fist threshold
};

/// The eight command gestures: traverse 1-3, explore 1-3, stop, return.
std::vector<Gesture> command_gestures();

/// Relaxed hand, activation fist, then the gesture held past the window.
/// Passing Gesture::unrecognized() produces an armed episode of ambiguous
/// wiggling instead.
SyntheticTrace generate_gesture_trace(const Gesture& gesture, const TraceParams& params, double t0 = 0.0);

/// Free hand motion with brief (< 0.4 s) fists only; must never arm.
SyntheticTrace generate_idle_trace(double duration, const TraceParams& params, double t0 = 0.0);

/// Full-fist and open-palm prompts (plus an intermediate prompt) in raw units
/// for a glove with the given per-finger offset and gain.
std::vector<CalibrationPrompt> generate_calibration_prompts(const std::array<double, kFingers>& offset,
                                                            const std::array<double, kFingers>& gain,
                                                            const TraceParams& params);

struct GloveDriftModel {
    double baseline_sigma{0};  // raw units / sqrt(s)
    double yaw_bias_sigma{0};  // rad / sqrt(s)
    std::uint64_t seed{0};
};

struct RecalibrationEvent {
    double t{0};
    double yaw_bias_cleared{0};
    std::array<double, kFingers> baseline_cleared{};
};

/// Sensor model of a physical glove: raw = offset + baseline drift + gain * flexion,
/// with a random-walk yaw bias on the palm heading.
class SimulatedGlove {
public:
    SimulatedGlove(std::array<double, kFingers> offset, std::array<double, kFingers> gain,
                   GloveDriftModel drift = {});

    RawGloveFrame sense(const GloveFrame& truth) const;
    void advance(double dt);
    void inject_drift(const std::array<double, kFingers>& baseline, double yaw_bias);

    double yaw_bias() const { return yaw_bias_; }
    const std::array<double, kFingers>& baseline_drift() const { return baseline_; }
    const std::vector<RecalibrationEvent>& recalibrations() const { return log_; }

    friend void drift_recalibrate(SimulatedGlove& glove, double t);

private:
    std::array<double, kFingers> offset_;
    std::array<double, kFingers> gain_;
    GloveDriftModel drift_;
    RandomStream rng_;
    std::array<double, kFingers> baseline_{};
    double yaw_bias_{0};
    std::vector<RecalibrationEvent> log_;
};

/// Clears the yaw-bias random walk and re-zeros flexion baselines.
void drift_recalibrate(SimulatedGlove& glove, double t);

}  // namespace teamsim::gesture
