#include "teamsim/gesture/glove.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace teamsim::gesture {

double Calibration::normalize(int finger, double raw) const {
    const double lo = raw_min[finger];
    const double hi = raw_max[finger];
    return std::clamp((raw - lo) / (hi - lo), 0.0, 1.0);
}

GloveFrame Calibration::normalize(const RawGloveFrame& raw) const {
    GloveFrame f{raw.t, {}, raw.palm_yaw, raw.palm_pitch, raw.palm_facing_out};
    for (int i = 0; i < kFingers; ++i) f.flexion[i] = normalize(i, raw.raw[i]);
    return f;
}

Calibration Calibration::identity() {
    Calibration c;
    c.raw_min.fill(0.0);
    c.raw_max.fill(1.0);
    return c;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("percentile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
}

Calibration calibrate(const std::vector<CalibrationPrompt>& prompts, double min_hold) {
    auto held = [&](PromptKind kind) {
        return std::any_of(prompts.begin(), prompts.end(), [&](const CalibrationPrompt& p) {
            return p.kind == kind && p.frames.size() >= 2 &&
                   p.frames.back().t - p.frames.front().t >= min_hold - 1e-9;
        });
    };
    if (!held(PromptKind::Fist)) throw CalibrationIncomplete("missing a full-fist hold of at least 1 s");
    if (!held(PromptKind::OpenPalm)) throw CalibrationIncomplete("missing an open-palm hold of at least 1 s");

    Calibration cal;
    for (int finger = 0; finger < kFingers; ++finger) {
        std::vector<double> samples;
        for (const auto& p : prompts)
            for (const auto& f : p.frames) samples.push_back(f.raw[finger]);
        cal.raw_min[finger] = percentile(samples, 5.0);
        cal.raw_max[finger] = percentile(std::move(samples), 95.0);
        if (!(cal.raw_max[finger] - cal.raw_min[finger] >= Calibration::kMinRange))
            throw CalibrationDegenerate(finger);
    }
    return cal;
}

std::vector<GloveFrame> read_trace(std::istream& in) {
    std::vector<GloveFrame> frames;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        GloveFrame f;
        int facing = 0;
        ss >> f.t;
        for (double& v : f.flexion) ss >> v;
        ss >> f.palm_yaw >> f.palm_pitch >> facing;
        if (!ss) throw std::runtime_error("malformed trace line " + std::to_string(lineno));
        for (double v : f.flexion)
            if (!(v >= 0.0 && v <= 1.0))
                throw std::runtime_error("flexion out of [0,1] on trace line " + std::to_string(lineno));
        f.palm_facing_out = facing != 0;
        frames.push_back(f);
    }
    return frames;
}

std::vector<GloveFrame> load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace " + path.string());
    return read_trace(in);
}

void write_trace(std::ostream& out, const std::vector<GloveFrame>& frames) {
    out << std::setprecision(17);
    for (const auto& f : frames) {
        out << f.t;
        for (double v : f.flexion) out << ' ' << v;
        out << ' ' << f.palm_yaw << ' ' << f.palm_pitch << ' ' << (f.palm_facing_out ? 1 : 0) << '\n';
    }
}

}  // namespace teamsim::gesture
