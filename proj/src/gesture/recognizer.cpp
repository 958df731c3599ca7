#include "teamsim/gesture/recognizer.hpp"

#include <algorithm>
#include <numeric>

namespace teamsim::gesture {

std::string to_string(const Gesture& g) {
    switch (g.kind) {
        case GestureKind::TraversePoint: return "traverse_point(" + std::to_string(g.fingers) + ")";
        case GestureKind::ExploreOscillate: return "explore_oscillate(" + std::to_string(g.fingers) + ")";
        case GestureKind::StopPalm: return "stop_palm";
        case GestureKind::ReturnSign: return "return_sign";
        case GestureKind::Unrecognized: return "unrecognized";
    }
    return "?";
}

const char* to_string(HapticPattern p) { return p == HapticPattern::QuickPulse ? "QUICK_PULSE" : "LONG_PULSE"; }

std::optional<HapticPattern> parse_haptic_pattern(std::string_view s) {
    if (s == "QUICK_PULSE") return HapticPattern::QuickPulse;
    if (s == "LONG_PULSE") return HapticPattern::LongPulse;
    return std::nullopt;
}

int oscillation_count(std::span<const double> signal, const RecognizerConfig& config) {
    if (signal.size() < 2) return 0;
    const int half = std::max(0, config.smoothing / 2);
    std::vector<double> smooth(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
        const std::size_t hi = std::min(signal.size() - 1, i + half);
        double s = 0;
        for (std::size_t k = lo; k <= hi; ++k) s += signal[k];
        smooth[i] = s / static_cast<double>(hi - lo + 1);
    }
    const auto [mn, mx] = std::minmax_element(smooth.begin(), smooth.end());
    if ((*mx - *mn) / 2.0 < config.min_amplitude) return 0;

    const double mean = std::accumulate(smooth.begin(), smooth.end(), 0.0) / static_cast<double>(smooth.size());
    int side = 0;  // -1 below band, +1 above band
    int crossings = 0;
    for (double v : smooth) {
        const double dev = v - mean;
        int now = 0;
        if (dev > config.crossing_band) now = 1;
        else if (dev < -config.crossing_band) now = -1;
        if (now == 0) continue;
        if (side != 0 && now != side) ++crossings;
        side = now;
    }
    return crossings;
}

Gesture classify_window(std::span<const GloveFrame> frames, double window_start, const RecognizerConfig& config) {
    if (frames.empty() || frames.back().t - window_start < config.gesture_window - 1e-9)
        throw WindowTooShort("gesture window shorter than " + std::to_string(config.gesture_window) + " s");

    // The user is usually still holding the arming fist when the window opens.
    auto is_fist = [&](const GloveFrame& f) {
        return std::all_of(f.flexion.begin(), f.flexion.end(), [&](double v) { return v > config.fist_threshold; });
    };
    const auto shape_begin = std::find_if_not(frames.begin(), frames.end(), is_fist);
    if (shape_begin == frames.end()) return Gesture::unrecognized();
    frames = frames.subspan(static_cast<std::size_t>(shape_begin - frames.begin()));

    const double n = static_cast<double>(frames.size());
    std::array<double, kFingers> mean{};
    std::size_t facing_out = 0;
    for (const auto& f : frames) {
        for (int i = 0; i < kFingers; ++i) mean[i] += f.flexion[i] / n;
        if (f.palm_facing_out) ++facing_out;
    }
    std::array<bool, kFingers> extended{};
    std::array<bool, kFingers> flexed{};
    for (int i = 0; i < kFingers; ++i) {
        extended[i] = mean[i] < config.extended_below;
        flexed[i] = mean[i] > config.flexed_above;
    }

    const bool all_extended = std::all_of(extended.begin(), extended.end(), [](bool b) { return b; });
    if (all_extended && 2 * facing_out > frames.size()) return Gesture::stop();
    if (extended[0] && flexed[1] && flexed[2] && flexed[3] && flexed[4]) return Gesture::return_sign();

    int pointing = 0;
    for (int i = 1; i < kFingers; ++i) {
        if (extended[i]) ++pointing;
        else if (!flexed[i]) return Gesture::unrecognized();
    }
    if (pointing < 1 || pointing > 3) return Gesture::unrecognized();

    std::vector<double> signal;
    signal.reserve(frames.size());
    for (const auto& f : frames) {
        double s = 0;
        for (int i = 1; i < kFingers; ++i)
            if (extended[i]) s += f.flexion[i];
        signal.push_back(s / pointing);
    }
    if (oscillation_count(signal, config) >= config.min_crossings) return Gesture::explore(pointing);
    return Gesture::traverse(pointing);
}

Gesture classify_window(std::span<const GloveFrame> frames, const RecognizerConfig& config) {
    if (frames.empty()) throw WindowTooShort("empty gesture window");
    return classify_window(frames, frames.front().t, config);
}

ActivationOutput ActivationFsm::step(const GloveFrame& frame) {
    if (last_t_ && !(frame.t > *last_t_))
        throw FrameOrderError("glove frame timestamps must be strictly increasing");
    last_t_ = frame.t;

    ActivationOutput out;
    if (phase_ == ActivationPhase::Idle) {
        const bool fist = std::all_of(frame.flexion.begin(), frame.flexion.end(),
                                      [&](double v) { return v > config_.fist_threshold; });
        if (!fist) {
            fist_since_.reset();
            return out;
        }
        if (!fist_since_) fist_since_ = frame.t;
        if (frame.t - *fist_since_ >= config_.activation_hold - 1e-9) {
            phase_ = ActivationPhase::Armed;
            armed_at_ = frame.t;
            window_.clear();
            fist_since_.reset();
            out.haptics.push_back({HapticPattern::QuickPulse, frame.t});
        }
        return out;
    }

    window_.push_back(frame);
    if (frame.t - armed_at_ >= config_.gesture_window - 1e-9) {
        const Gesture g = classify_window(window_, armed_at_, config_);
        if (g.kind == GestureKind::Unrecognized) out.haptics.push_back({HapticPattern::LongPulse, frame.t});
        else out.gesture = g;
        phase_ = ActivationPhase::Idle;
        window_.clear();
    }
    return out;
}

}  // namespace teamsim::gesture
