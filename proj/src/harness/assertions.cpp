#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "teamsim/harness/mission.hpp"

namespace teamsim::harness {

namespace {

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

/// Distance from p to the polyline and the arc length of the closest point.
std::pair<double, double> project_onto(const std::vector<Pose2D>& path, const Point2& p) {
    double best = std::numeric_limits<double>::infinity(), at = 0, walked = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Point2 a = path[i].position(), b = path[i + 1].position();
        const Point2 ab = b - a;
        const double len2 = ab.dot(ab);
        const double u = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        const double d = distance(a + ab * u, p);
        if (d < best) {
            best = d;
            at = walked + u * std::sqrt(len2);
        }
        walked += std::sqrt(len2);
    }
    return {best, at};
}

double path_length(const std::vector<Pose2D>& path) {
    double len = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) len += distance(path[i].position(), path[i + 1].position());
    return len;
}

AssertionResult check(const Scenario& s, const MissionResult& r, const Assertion& a) {
    const auto& m = r.metrics();
    const auto& tr = r.trace;
    AssertionResult out{describe(a), false, ""};
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FinalDistance>) {
                const double d = distance(m.final_robot_pose.position(), x.target);
                out.passed = d <= x.max;
                out.detail = fmt("distance %.4f m", d);
            } else if constexpr (std::is_same_v<T, MaxCollisions>) {
                out.passed = m.collisions <= x.max;
                out.detail = fmt("%.0f collisions", static_cast<double>(m.collisions));
            } else if constexpr (std::is_same_v<T, MinCoverage>) {
                out.passed = m.final_coverage() >= x.min;
                out.detail = fmt("coverage %.4f", m.final_coverage());
            } else if constexpr (std::is_same_v<T, CoverageReached>) {
                const auto ttc = m.time_to_coverage(x.fraction);
                out.passed = ttc && *ttc <= x.within;
                out.detail = ttc ? fmt("reached at %.1f s", *ttc) : "not reached";
            } else if constexpr (std::is_same_v<T, MonotoneCoverage>) {
                out.passed = m.coverage_monotone();
                out.detail = fmt("%.0f samples", static_cast<double>(m.coverage_curve.size()));
            } else if constexpr (std::is_same_v<T, EventCount>) {
                const auto it = m.events.find(executive::to_string(x.kind));
                const int n = it == m.events.end() ? 0 : it->second;
                out.passed = n >= x.min && (!x.max || n <= *x.max);
                out.detail = fmt("%.0f events", n);
            } else if constexpr (std::is_same_v<T, FinalMode>) {
                out.passed = m.final_mode == executive::to_string(x.mode);
                out.detail = "mode " + m.final_mode;
            } else if constexpr (std::is_same_v<T, AckCount>) {
                out.passed = m.acks_accepted == x.accepted && m.acks_rejected == x.rejected;
                out.detail = fmt("accepted %.0f, rejected %.0f", m.acks_accepted, m.acks_rejected);
            } else if constexpr (std::is_same_v<T, AckText>) {
                const auto& acks = tr.human_view.acks;
                out.passed = std::any_of(acks.begin(), acks.end(),
                                         [&](const auto& ack) { return ack.accepted && ack.text == x.text; });
                out.detail = "console overlay \"" + tr.human_view.overlay + "\"";
            } else if constexpr (std::is_same_v<T, HaltedOnReturn>) {
                if (!tr.last_return) {
                    out.detail = "no accepted return";
                    return;
                }
                const auto& ret = *tr.last_return;
                const Point2 p = m.final_robot_pose.position();
                const double from_start = distance(p, ret.start);
                const double to_goal = distance(p, ret.goal.position());
                const auto [off_path, along] = project_onto(ret.path, p);
                const double len = path_length(ret.path);
                const bool completed = std::any_of(tr.events.begin(), tr.events.end(), [&](const auto& e) {
                    return e.kind == executive::EventKind::Completion && e.t >= ret.t;
                });
                const bool still = tr.final_command.linear == 0 && tr.final_command.angular == 0;
                out.passed = !completed && still && m.final_mode == "IDLE" && from_start >= x.margin &&
                             to_goal >= x.margin && off_path <= 0.3 && along > 0 && along < len;
                out.detail = fmt("%.2f m from start, %.2f m from goal, ", from_start, to_goal) +
                             fmt("%.2f m off path at %.2f of %.2f m", off_path, along, len);
            } else if constexpr (std::is_same_v<T, MarkerAt>) {
                const auto stored = std::find_if(tr.markers.begin(), tr.markers.end(),
                                                 [&](const auto& mk) { return mk.id == x.id; });
                const auto shown = tr.human_view.markers.find(x.id);
                if (stored == tr.markers.end() || shown == tr.human_view.markers.end()) {
                    out.detail = stored == tr.markers.end() ? "not stored" : "never reached the console";
                    return;
                }
                // The human's display draws the map-frame marker in its own frame
                // through the alignment it received; compare where that lands in
                // the world.
                const Transform2D to_robot =
                    tr.human_view.alignment ? tr.human_view.alignment->transform : Transform2D::identity();
                const Point2 drawn = s.human_frame.apply(to_robot.inverse().apply(shown->second.position));
                const double stored_err = distance(stored->position, x.position);
                const double drawn_err = distance(drawn, x.position);
                out.passed = stored_err <= x.tolerance && drawn_err <= x.tolerance;
                out.detail = fmt("map error %.4f m, display error %.4f m", stored_err, drawn_err);
            } else if constexpr (std::is_same_v<T, OccludedTelemetry>) {
                std::size_t missing = 0;
                for (auto k : tr.occluded_telemetry_ticks) missing += !tr.human_telemetry_ticks.count(k);
                out.passed = static_cast<int>(tr.occluded_ticks) >= x.min_ticks && missing == 0;
                out.detail = fmt("%.0f occluded ticks, %.0f without telemetry", static_cast<double>(tr.occluded_ticks),
                                 static_cast<double>(missing));
            } else if constexpr (std::is_same_v<T, KeepInSound>) {
                out.passed = m.keep_in_checks > 0 && m.keep_in_violations == 0;
                out.detail = fmt("%.0f selections, %.0f violations", static_cast<double>(m.keep_in_checks),
                                 static_cast<double>(m.keep_in_violations));
            }
        },
        a);
    return out;
}

}  // namespace

std::vector<AssertionResult> evaluate(const Scenario& scenario, const MissionResult& result) {
    std::vector<AssertionResult> out;
    for (const auto& a : scenario.assertions) out.push_back(check(scenario, result, a));
    return out;
}

}  // namespace teamsim::harness
