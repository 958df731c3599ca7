#include "teamsim/gesture/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "teamsim/geometry.hpp"

namespace teamsim::gesture {

namespace {

using Levels = std::array<double, kFingers>;

double lerp(double a, double b, double s) { return a + (b - a) * std::clamp(s, 0.0, 1.0); }

Levels lerp(const Levels& a, const Levels& b, double s) {
    Levels out;
    for (int i = 0; i < kFingers; ++i) out[i] = lerp(a[i], b[i], s);
    return out;
}

void add_noise(GloveFrame& f, RandomStream& rng, double sigma) {
    if (sigma <= 0) return;
    for (double& v : f.flexion) v = std::clamp(v + rng.gaussian(sigma), 0.0, 1.0);
}

}  // namespace

std::vector<Gesture> command_gestures() {
    return {Gesture::traverse(1), Gesture::traverse(2), Gesture::traverse(3), Gesture::explore(1),
            Gesture::explore(2),  Gesture::explore(3),  Gesture::stop(),      Gesture::return_sign()};
}

SyntheticTrace generate_gesture_trace(const Gesture& gesture, const TraceParams& params, double t0) {
    RandomStream rng(params.seed);
    const double dt = 1.0 / params.rate_hz;

    Levels relaxed;
    for (double& v : relaxed) v = rng.uniform(0.3, 0.6);
    const double yaw = rng.uniform(-kPi, kPi);
    const double pitch = rng.uniform(-0.3, 0.3);

    const double relax_end = t0 + rng.uniform(0.3, 0.6);
    const double ramp = 0.1;
    double ramp_fraction = 0;
    for (double v : relaxed) ramp_fraction = std::max(ramp_fraction, (params.fist_threshold - v) / (1.0 - v));
    const double fist_onset = relax_end + ramp * ramp_fraction;
    const double transition_start = relax_end + ramp + 0.5 + rng.uniform(0.05, 0.15);
    const double transition = rng.uniform(0.08, 0.15);
    const double gesture_start = transition_start + transition;
    const double gesture_end = gesture_start + rng.uniform(1.7, 2.0);
    const double end = gesture_end + 0.4;

    const double extended = rng.uniform(0.02, 0.12);
    Levels flexed;
    for (double& v : flexed) v = rng.uniform(0.88, 1.0);

    Levels shape = flexed;
    std::array<bool, kFingers> oscillating{};
    bool facing_out = false;
    switch (gesture.kind) {
        case GestureKind::TraversePoint:
        case GestureKind::ExploreOscillate:
            for (int i = 1; i <= gesture.fingers; ++i) {
                shape[i] = extended;
                oscillating[i] = gesture.kind == GestureKind::ExploreOscillate;
            }
            shape[0] = rng.uniform() < 0.5 ? flexed[0] : rng.uniform(0.4, 0.6);
            break;
        case GestureKind::StopPalm:
            shape.fill(extended);
            facing_out = true;
            break;
        case GestureKind::ReturnSign:
            shape[0] = extended;
            break;
        case GestureKind::Unrecognized:
            for (double& v : shape) v = rng.uniform(0.4, 0.6);
            break;
    }
    const double osc_amp = rng.uniform(0.18, 0.25);
    const double osc_freq = rng.uniform(1.3, 2.2);
    const double osc_center = 0.2;
    std::array<double, kFingers> wiggle_phase{};
    for (double& p : wiggle_phase) p = rng.uniform(0, kTwoPi);

    auto gesture_levels = [&](double t) {
        Levels out = shape;
        const double tau = t - transition_start;
        for (int i = 0; i < kFingers; ++i) {
            if (oscillating[i]) out[i] = std::clamp(osc_center + osc_amp * std::sin(kTwoPi * osc_freq * tau), 0.0, 1.0);
            if (gesture.kind == GestureKind::Unrecognized)
                out[i] = shape[i] + 0.05 * std::sin(kTwoPi * 0.7 * tau + wiggle_phase[i]);
        }
        return out;
    };

    Levels fist;
    fist.fill(1.0);
    SyntheticTrace trace;
    trace.fist_onset = fist_onset;
    if (gesture.kind != GestureKind::Unrecognized) trace.intended = gesture;
    else trace.intended = Gesture::unrecognized();

    for (int k = 0;; ++k) {
        const double t = t0 + k * dt;
        if (t > end) break;
        GloveFrame f{t, {}, yaw, pitch, false};
        if (t < relax_end) f.flexion = relaxed;
        else if (t < relax_end + ramp) f.flexion = lerp(relaxed, fist, (t - relax_end) / ramp);
        else if (t < transition_start) f.flexion = fist;
        else if (t < gesture_start) f.flexion = lerp(fist, gesture_levels(t), (t - transition_start) / transition);
        else if (t < gesture_end) f.flexion = gesture_levels(t);
        else f.flexion = lerp(gesture_levels(gesture_end), relaxed, (t - gesture_end) / 0.2);
        f.palm_facing_out = facing_out && t >= transition_start && t < gesture_end;
        add_noise(f, rng, params.noise_sigma);
        trace.frames.push_back(f);
    }
    return trace;
}

SyntheticTrace generate_idle_trace(double duration, const TraceParams& params, double t0) {
    RandomStream rng(params.seed);
    const double dt = 1.0 / params.rate_hz;

    struct Segment {
        double start;
        double length;
        Levels levels;
        bool oscillate;
        bool facing_out;
    };
    std::vector<Segment> segments;
    double t = t0;
    while (t < t0 + duration) {
        Segment s{t, 0, {}, false, false};
        const double pick = rng.uniform();
        const bool after_fist = !segments.empty() && segments.back().levels[0] == 1.0;
        if (pick < 0.25 && !after_fist) {
            s.length = rng.uniform(0.1, 0.3);  // brief fist: never long enough to arm
            s.levels.fill(1.0);
        } else {
            s.length = rng.uniform(0.3, 0.9);
            for (double& v : s.levels) v = rng.uniform(0.0, 0.75);
            s.oscillate = pick > 0.8;
            s.facing_out = rng.uniform() < 0.2;
        }
        segments.push_back(s);
        t += s.length;
    }

    SyntheticTrace trace;
    trace.fist_onset = -1;
    const double blend = 0.05;
    for (int k = 0;; ++k) {
        const double now = t0 + k * dt;
        if (now > t0 + duration) break;
        std::size_t si = 0;
        while (si + 1 < segments.size() && segments[si + 1].start <= now) ++si;
        const Segment& s = segments[si];
        Levels lv = s.levels;
        if (s.oscillate)
            for (int i = 1; i < kFingers; ++i) lv[i] = std::clamp(lv[i] + 0.2 * std::sin(kTwoPi * 1.5 * (now - s.start)), 0.0, 0.75);
        if (si > 0 && now - s.start < blend) lv = lerp(segments[si - 1].levels, lv, (now - s.start) / blend);
        GloveFrame f{now, lv, 0.0, 0.0, s.facing_out};
        add_noise(f, rng, params.noise_sigma);
        trace.frames.push_back(f);
    }
    return trace;
}

std::vector<CalibrationPrompt> generate_calibration_prompts(const std::array<double, kFingers>& offset,
                                                            const std::array<double, kFingers>& gain,
                                                            const TraceParams& params) {
    RandomStream rng(params.seed);
    const double dt = 1.0 / params.rate_hz;
    auto prompt = [&](PromptKind kind, double lo, double hi, double t0) {
        CalibrationPrompt p{kind, {}};
        for (double t = 0; t <= 1.2 + 1e-9; t += dt) {
            RawGloveFrame f{t0 + t, {}, 0, 0, false};
            for (int i = 0; i < kFingers; ++i) {
                const double flex = std::clamp(rng.uniform(lo, hi) + rng.gaussian(params.noise_sigma), 0.0, 1.0);
                f.raw[i] = offset[i] + gain[i] * flex;
            }
            p.frames.push_back(f);
        }
        return p;
    };
    return {prompt(PromptKind::OpenPalm, 0.0, 0.02, 0.0), prompt(PromptKind::Fist, 0.98, 1.0, 2.0),
            prompt(PromptKind::Other, 0.3, 0.7, 4.0)};
}

SimulatedGlove::SimulatedGlove(std::array<double, kFingers> offset, std::array<double, kFingers> gain,
                               GloveDriftModel drift)
    : offset_(offset), gain_(gain), drift_(drift), rng_(drift.seed) {}

RawGloveFrame SimulatedGlove::sense(const GloveFrame& truth) const {
    RawGloveFrame r{truth.t, {}, normalize_angle(truth.palm_yaw + yaw_bias_), truth.palm_pitch,
                    truth.palm_facing_out};
    for (int i = 0; i < kFingers; ++i) r.raw[i] = offset_[i] + baseline_[i] + gain_[i] * truth.flexion[i];
    return r;
}

void SimulatedGlove::advance(double dt) {
    const double sq = std::sqrt(dt);
    if (drift_.baseline_sigma > 0)
        for (double& b : baseline_) b += rng_.gaussian(drift_.baseline_sigma * sq);
    if (drift_.yaw_bias_sigma > 0) yaw_bias_ += rng_.gaussian(drift_.yaw_bias_sigma * sq);
}

void SimulatedGlove::inject_drift(const std::array<double, kFingers>& baseline, double yaw_bias) {
    baseline_ = baseline;
    yaw_bias_ = yaw_bias;
}

void drift_recalibrate(SimulatedGlove& glove, double t) {
    glove.log_.push_back({t, glove.yaw_bias_, glove.baseline_});
    glove.yaw_bias_ = 0.0;
    glove.baseline_.fill(0.0);
}

}  // namespace teamsim::gesture
