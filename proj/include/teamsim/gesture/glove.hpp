#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace teamsim::gesture {

inline constexpr int kFingers = 5;  // thumb, index, middle, ring, pinky

/// Normalized glove sample: flexion 0 = fully extended, 1 = fully flexed.
struct GloveFrame {
    double t{0};
    std::array<double, kFingers> flexion{};
    double palm_yaw{0};
    double palm_pitch{0};
    bool palm_facing_out{false};

    friend bool operator==(const GloveFrame&, const GloveFrame&) = default;
};

/// Uncalibrated sample in sensor units.
struct RawGloveFrame {
    double t{0};
    std::array<double, kFingers> raw{};
    double palm_yaw{0};
    double palm_pitch{0};
    bool palm_facing_out{false};
};

struct CalibrationDegenerate : std::runtime_error {
    explicit CalibrationDegenerate(int finger_index)
        : std::runtime_error("calibration range too small on finger " + std::to_string(finger_index)),
          finger(finger_index) {}
    int finger;
};

struct CalibrationIncomplete : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class PromptKind { Fist, OpenPalm, Other };

/// Frames recorded while one calibration prompt was shown to the user.
struct CalibrationPrompt {
    PromptKind kind{PromptKind::Other};
    std::vector<RawGloveFrame> frames;
};

struct Calibration {
    static constexpr double kMinRange = 0.05;

    std::array<double, kFingers> raw_min{};
    std::array<double, kFingers> raw_max{};

    double normalize(int finger, double raw) const;
    GloveFrame normalize(const RawGloveFrame& raw) const;

    /// Calibration that passes raw values through unchanged (raw already in [0,1]).
    static Calibration identity();
};

/// Per-finger 5th/95th percentiles over all prompt samples. Requires a fist and
/// an open-palm prompt held for at least `min_hold` seconds each.
Calibration calibrate(const std::vector<CalibrationPrompt>& prompts, double min_hold = 1.0);

/// Linear-interpolated percentile (q in [0,100]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

/// Trace text format, one frame per line:
/// `t flex0 flex1 flex2 flex3 flex4 yaw pitch facing_out`.
std::vector<GloveFrame> read_trace(std::istream& in);
std::vector<GloveFrame> load_trace(const std::filesystem::path& path);
void write_trace(std::ostream& out, const std::vector<GloveFrame>& frames);

}  // namespace teamsim::gesture
