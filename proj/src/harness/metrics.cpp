#include "teamsim/harness/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace teamsim::harness {

using json = nlohmann::ordered_json;

std::optional<double> MissionMetrics::time_to_coverage(double p) const {
    for (const auto& s : coverage_curve)
        if (s.fraction >= p) return s.t;
    return std::nullopt;
}

bool MissionMetrics::coverage_monotone() const {
    return std::adjacent_find(coverage_curve.begin(), coverage_curve.end(), [](const auto& a, const auto& b) {
               return b.fraction < a.fraction;
           }) == coverage_curve.end();
}

bool Summary::passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const auto& a) { return a.passed; });
}

std::string to_json(const Summary& s) {
    const auto& m = s.metrics;
    json curve = json::array();
    for (const auto& c : m.coverage_curve) curve.push_back({c.t, c.fraction});
    json ttc = json::object();
    for (double p : {0.5, 0.8, 0.9}) {
        char key[8];
        std::snprintf(key, sizeof key, "%.1f", p);
        const auto t = m.time_to_coverage(p);
        ttc[key] = t ? json(*t) : json(nullptr);
    }
    json asserts = json::array();
    for (const auto& a : s.assertions)
        asserts.push_back({{"check", a.description}, {"passed", a.passed}, {"detail", a.detail}});
    json out = {
        {"scenario", s.scenario},
        {"seed", s.seed},
        {"transport", s.transport},
        {"passed", s.passed()},
        {"metrics",
         {{"sim_time", m.sim_time},
          {"ticks", m.ticks},
          {"collisions", m.collisions},
          {"distance_traveled", m.distance_traveled},
          {"final_robot_pose", {m.final_robot_pose.x, m.final_robot_pose.y, m.final_robot_pose.theta}},
          {"final_mode", m.final_mode},
          {"final_coverage", m.final_coverage()},
          {"coverage_monotone", m.coverage_monotone()},
          {"time_to_coverage", ttc},
          {"commands_issued", m.commands_issued},
          {"events", m.events},
          {"acks", {{"accepted", m.acks_accepted}, {"rejected", m.acks_rejected}}},
          {"keep_in", {{"checks", m.keep_in_checks}, {"violations", m.keep_in_violations}}},
          {"coverage_curve", curve}}},
        {"assertions", asserts},
    };
    return out.dump(2) + "\n";
}

Summary summary_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        Summary s;
        s.scenario = j.at("scenario").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.transport = j.at("transport").get<std::string>();
        const auto& m = j.at("metrics");
        auto& out = s.metrics;
        out.sim_time = m.at("sim_time").get<double>();
        out.ticks = m.at("ticks").get<std::uint64_t>();
        out.collisions = m.at("collisions").get<std::uint64_t>();
        out.distance_traveled = m.at("distance_traveled").get<double>();
        const auto& p = m.at("final_robot_pose");
        out.final_robot_pose = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
        out.final_mode = m.at("final_mode").get<std::string>();
        out.commands_issued = m.at("commands_issued").get<std::map<std::string, int>>();
        out.events = m.at("events").get<std::map<std::string, int>>();
        out.acks_accepted = m.at("acks").at("accepted").get<int>();
        out.acks_rejected = m.at("acks").at("rejected").get<int>();
        out.keep_in_checks = m.at("keep_in").at("checks").get<std::uint64_t>();
        out.keep_in_violations = m.at("keep_in").at("violations").get<std::uint64_t>();
        for (const auto& c : m.at("coverage_curve")) out.coverage_curve.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
        for (const auto& a : j.at("assertions"))
            s.assertions.push_back(
                {a.at("check").get<std::string>(), a.at("passed").get<bool>(), a.at("detail").get<std::string>()});
        return s;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed summary: ") + e.what());
    }
}

std::string render_report(const Summary& s) {
    const auto& m = s.metrics;
    std::ostringstream out;
    char line[160];
    out << "scenario " << s.scenario << "  seed " << s.seed << "  transport " << s.transport << "\n";
    std::snprintf(line, sizeof line, "sim time %.1f s  ticks %llu  distance %.2f m  collisions %llu\n", m.sim_time,
                  static_cast<unsigned long long>(m.ticks), m.distance_traveled,
                  static_cast<unsigned long long>(m.collisions));
    out << line;
    std::snprintf(line, sizeof line, "final pose (%.3f, %.3f, %.3f)  mode %s\n", m.final_robot_pose.x,
                  m.final_robot_pose.y, m.final_robot_pose.theta, m.final_mode.c_str());
    out << line;

    out << "\ncoverage\n      t   fraction\n";
    // Thin long curves to at most ~30 rows, always keeping the last sample.
    const std::size_t n = m.coverage_curve.size();
    const std::size_t stride = std::max<std::size_t>(1, (n + 29) / 30);
    for (std::size_t i = 0; i < n; ++i) {
        if (i % stride != 0 && i + 1 != n) continue;
        std::snprintf(line, sizeof line, "%7.1f   %.4f\n", m.coverage_curve[i].t, m.coverage_curve[i].fraction);
        out << line;
    }
    for (double p : {0.5, 0.8, 0.9}) {
        const auto t = m.time_to_coverage(p);
        if (t) std::snprintf(line, sizeof line, "time_to_coverage(%.1f) = %.1f s\n", p, *t);
        else std::snprintf(line, sizeof line, "time_to_coverage(%.1f) = not reached\n", p);
        out << line;
    }
    out << "coverage monotone: " << (m.coverage_monotone() ? "yes" : "no") << "\n";

    out << "\ncommands\n";
    if (m.commands_issued.empty()) out << "  none\n";
    for (const auto& [kind, count] : m.commands_issued) out << "  " << kind << " " << count << "\n";
    out << "acks accepted " << m.acks_accepted << ", rejected " << m.acks_rejected << "\n";
    out << "events\n";
    if (m.events.empty()) out << "  none\n";
    for (const auto& [kind, count] : m.events) out << "  " << kind << " " << count << "\n";
    out << "keep-in checks " << m.keep_in_checks << ", violations " << m.keep_in_violations << "\n";

    out << "\nassertions\n";
    if (s.assertions.empty()) out << "  none\n";
    for (const auto& a : s.assertions) {
        out << (a.passed ? "  PASS  " : "  FAIL  ") << a.description;
        if (!a.detail.empty()) out << "  [" << a.detail << "]";
        out << "\n";
    }
    out << (s.passed() ? "RESULT PASS\n" : "RESULT FAIL\n");
    return out.str();
}

}  // namespace teamsim::harness
