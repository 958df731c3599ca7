#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "teamsim/harness/mission.hpp"
#include "teamsim/harness/replay.hpp"

using namespace teamsim;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& transport,
            const std::string& replay_out, const std::string& summary_out) {
    const auto t = harness::parse_transport(transport);
    if (!t) throw std::runtime_error("unknown transport '" + transport + "'");
    const auto scenario = harness::load_scenario(scenario_path);
    const auto result = harness::run(scenario, {seed, *t, std::nullopt});
    if (!replay_out.empty()) {
        std::ofstream out(replay_out);
        if (!out) throw std::runtime_error("cannot write " + replay_out);
        for (const auto& line : result.replay) out << harness::format_replay_line(line);
    }
    if (!summary_out.empty()) write_file(summary_out, harness::to_json(result.summary));
    std::cout << harness::render_report(result.summary);
    return result.summary.passed() ? 0 : 1;
}

int cmd_serve(const std::string& scenario_path, const harness::LiveOptions& live, const std::string& summary_out) {
    const auto scenario = harness::load_scenario(scenario_path);
    harness::RunOptions options;
    options.live = live;
    options.live->on_listening = [](unsigned short tcp, unsigned short ws) {
        std::printf("listening: tcp %u", tcp);
        if (ws) std::printf(", websocket %u", ws);
        std::printf("\n");
        std::fflush(stdout);
    };
    const auto result = harness::run(scenario, options);
    if (!summary_out.empty()) write_file(summary_out, harness::to_json(result.summary));
    std::cout << harness::render_report(result.summary);
    return result.summary.passed() ? 0 : 1;
}

int cmd_replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    const auto r = harness::replay(in);
    const auto& v = r.view;
    std::printf("lines %llu  inbound %llu  outbound %llu  decode errors %llu  malformed %llu\n",
                static_cast<unsigned long long>(r.lines), static_cast<unsigned long long>(r.inbound),
                static_cast<unsigned long long>(r.outbound), static_cast<unsigned long long>(r.decode_errors),
                static_cast<unsigned long long>(r.malformed_lines));
    std::printf("last frame at t = %.3f s  seq gaps %llu\n", r.last_t, static_cast<unsigned long long>(v.seq_gaps));
    if (v.geometry) {
        std::size_t known = 0;
        for (auto c : v.classes) known += c != mapping::CellClass::Unknown;
        std::printf("map %dx%d @ %.3f m, %zu of %zu cells known\n", v.geometry->width, v.geometry->height,
                    v.geometry->resolution, known, v.classes.size());
    }
    if (v.telemetry) {
        const auto& p = v.telemetry->robot_pose;
        std::printf("final robot pose (%.3f, %.3f, %.3f)  mode %s  tick %llu\n", p.x, p.y, p.theta,
                    executive::to_string(v.telemetry->mode), static_cast<unsigned long long>(v.telemetry->tick));
    }
    std::printf("acks %zu  events %zu  haptics %llu  overlay \"%s\"\n", v.acks.size(), v.events.size(),
                static_cast<unsigned long long>(v.haptics), v.overlay.c_str());
    for (const auto& [id, m] : v.markers)
        std::printf("marker %s \"%s\" at (%.3f, %.3f) %s\n", id.c_str(), m.label.c_str(), m.position.x, m.position.y,
                    executive::to_string(m.source));
    return r.decode_errors == 0 && r.malformed_lines == 0 ? 0 : 1;
}

int cmd_report(const std::string& path) {
    const auto summary = harness::summary_from_json(read_file(path));
    std::cout << harness::render_report(summary);
    return summary.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"teamsim: human-robot teaming simulator"};
    app.require_subcommand(1);

    std::string scenario_path, transport = "loopback", replay_out, summary_out, file;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Run a scenario headlessly");
    run->add_option("scenario", scenario_path, "Scenario TOML file")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--transport", transport, "loopback or tcp")->check(CLI::IsMember({"loopback", "tcp"}));
    run->add_option("--replay-out", replay_out, "Write the replay log here");
    run->add_option("--summary-out", summary_out, "Write the machine-readable summary here");

    harness::LiveOptions live;
    double duration = 0;
    bool no_ws = false;
    auto* serve = app.add_subcommand("serve", "Run a scenario in wall-clock time for live clients");
    serve->add_option("scenario", scenario_path, "Scenario TOML file")->required();
    serve->add_option("--bind", live.server.bind_address, "Listen address")->capture_default_str();
    serve->add_option("--tcp-port", live.server.tcp_port, "Stream socket port")->capture_default_str();
    serve->add_option("--ws-port", live.server.ws_port, "WebSocket gateway port")->capture_default_str();
    serve->add_flag("--no-ws", no_ws, "Disable the WebSocket gateway");
    serve->add_option("--speed", live.speed, "Sim seconds per wall-clock second")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    serve->add_option("--duration", duration, "Sim seconds to run (default: the scenario budget)")
        ->check(CLI::PositiveNumber);
    serve->add_option("--summary-out", summary_out, "Write the machine-readable summary here");

    auto* rep = app.add_subcommand("replay", "Rebuild the console view from a replay log");
    rep->add_option("file", file, "Replay log")->required();

    auto* report = app.add_subcommand("report", "Render a summary written by run --summary-out");
    report->add_option("file", file, "Summary JSON")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(scenario_path, seed, transport, replay_out, summary_out);
        if (serve->parsed()) {
            live.server.enable_ws = !no_ws;
            if (duration > 0) live.duration = duration;
            return cmd_serve(scenario_path, live, summary_out);
        }
        if (rep->parsed()) return cmd_replay(file);
        if (report->parsed()) return cmd_report(file);
    } catch (const harness::ScenarioInvalid& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
