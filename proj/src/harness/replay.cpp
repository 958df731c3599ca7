#include "teamsim/harness/replay.hpp"

#include <charconv>
#include <cstdio>
#include <istream>

#include "teamsim/protocol/codec.hpp"

namespace teamsim::harness {

void ConsoleView::apply(const protocol::Envelope& env) {
    ++frames;
    if (last_seq != 0 && env.seq != last_seq + 1) ++seq_gaps;
    last_seq = env.seq;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, mapping::GridSnapshot>) {
                geometry = p.geometry;
                classes = p.classes;
            } else if constexpr (std::is_same_v<T, mapping::MapDiff>) {
                if (!geometry) {
                    ++diffs_before_snapshot;
                    return;
                }
                mapping::apply_diff(classes, p);
            } else if constexpr (std::is_same_v<T, protocol::TelemetryMsg>) {
                telemetry = p;
            } else if constexpr (std::is_same_v<T, protocol::PathMsg>) {
                path = p.waypoints;
            } else if constexpr (std::is_same_v<T, protocol::FrontiersMsg>) {
                frontiers = p;
            } else if constexpr (std::is_same_v<T, executive::Marker>) {
                markers[p.id] = p;
            } else if constexpr (std::is_same_v<T, executive::Ack>) {
                acks.push_back(p);
                if (p.accepted) overlay = p.text;
            } else if constexpr (std::is_same_v<T, executive::Event>) {
                events.push_back(p);
            } else if constexpr (std::is_same_v<T, protocol::AlignResultMsg>) {
                if (p.accepted) alignment = p;
            } else if constexpr (std::is_same_v<T, protocol::HapticMsg>) {
                ++haptics;
            }
        },
        env.payload);
}

std::string format_replay_line(const ReplayLine& line) {
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "%.3f", line.t);
    std::string out(stamp);
    out += line.inbound ? "\tin\t" : "\tout\t";
    out += line.frame;
    out += '\n';
    return out;
}

ReplayResult replay(std::istream& log) {
    ReplayResult r;
    std::string line;
    while (std::getline(log, line)) {
        if (line.empty()) continue;
        ++r.lines;
        const auto a = line.find('\t');
        const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
        if (b == std::string::npos) {
            ++r.malformed_lines;
            continue;
        }
        double t = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + a, t);
        const std::string_view dir(line.data() + a + 1, b - a - 1);
        if (ec != std::errc{} || ptr != line.data() + a || (dir != "in" && dir != "out")) {
            ++r.malformed_lines;
            continue;
        }
        r.last_t = t;
        const std::string_view frame(line.data() + b + 1, line.size() - b - 1);
        try {
            const auto env = protocol::decode(frame);
            if (dir == "in") {
                ++r.inbound;
            } else {
                ++r.outbound;
                r.view.apply(env);
            }
        } catch (const protocol::DecodeError&) {
            ++r.decode_errors;
        } catch (const protocol::FrameTooLarge&) {
            ++r.decode_errors;
        }
    }
    return r;
}

}  // namespace teamsim::harness
