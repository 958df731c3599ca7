#pragma once

// Runs synthetic glove traces through the activation FSM and tallies outcomes.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "teamsim/gesture/recognizer.hpp"
#include "teamsim/gesture/synthetic.hpp"

namespace teamsim::testing {

struct TraceOutcome {
    std::vector<gesture::HapticEvent> haptics;
    std::vector<gesture::Gesture> gestures;

    std::size_t count(gesture::HapticPattern p) const {
        std::size_t n = 0;
        for (const auto& h : haptics) n += h.pattern == p;
        return n;
    }
};

inline TraceOutcome run_fsm(const std::vector<gesture::GloveFrame>& frames, const gesture::RecognizerConfig& cfg = {}) {
    gesture::ActivationFsm fsm(cfg);
    TraceOutcome out;
    for (const auto& f : frames) {
        auto step = fsm.step(f);
        out.haptics.insert(out.haptics.end(), step.haptics.begin(), step.haptics.end());
        if (step.gesture) out.gestures.push_back(*step.gesture);
    }
    return out;
}

/// Start of the continuous all-fingers-above-threshold run that contains `t_end`.
inline double sensed_fist_onset(const std::vector<gesture::GloveFrame>& frames, double t_end,
                                double threshold = 0.8) {
    auto fist = [&](const gesture::GloveFrame& f) {
        for (double v : f.flexion)
            if (!(v > threshold)) return false;
        return true;
    };
    std::size_t k = 0;
    while (k < frames.size() && frames[k].t < t_end) ++k;
    if (k == frames.size()) return t_end;
    while (k > 0 && fist(frames[k - 1])) --k;
    return frames[k].t;
}

struct CorpusReport {
    std::size_t traces{0};
    std::size_t correct{0};
    std::size_t pulse_timing_ok{0};   // exactly one QUICK_PULSE within one frame of fist onset + 0.5 s
    std::size_t pulse_near_nominal{0};  // same, measured from the noise-free onset
    std::size_t armed{0};

    double accuracy() const { return traces ? static_cast<double>(correct) / static_cast<double>(traces) : 0.0; }
};

/// `per_gesture` traces for each command gesture at each noise level.
inline CorpusReport evaluate_gesture_corpus(std::size_t per_gesture, const std::vector<double>& noise_levels,
                                            std::uint64_t seed_base = 1000) {
    CorpusReport report;
    std::uint64_t seed = seed_base;
    for (const auto& g : gesture::command_gestures()) {
        for (std::size_t k = 0; k < per_gesture; ++k) {
            gesture::TraceParams params;
            params.noise_sigma = noise_levels[k % noise_levels.size()];
            params.seed = seed++;
            const auto trace = gesture::generate_gesture_trace(g, params);
            const auto out = run_fsm(trace.frames);
            ++report.traces;
            if (out.gestures.size() == 1 && out.gestures.front() == g && out.count(gesture::HapticPattern::LongPulse) == 0)
                ++report.correct;
            const std::size_t quick = out.count(gesture::HapticPattern::QuickPulse);
            if (quick > 0) ++report.armed;
            if (quick == 1) {
                double t_pulse = 0;
                for (const auto& h : out.haptics)
                    if (h.pattern == gesture::HapticPattern::QuickPulse) t_pulse = h.t;
                const double frame = 1.0 / params.rate_hz;
                const double onset = sensed_fist_onset(trace.frames, t_pulse);
                if (std::abs(t_pulse - (onset + 0.5)) <= frame + 1e-9) ++report.pulse_timing_ok;
                if (std::abs(t_pulse - (trace.fist_onset + 0.5)) <= frame + 1e-9) ++report.pulse_near_nominal;
            }
        }
    }
    return report;
}

}  // namespace teamsim::testing
