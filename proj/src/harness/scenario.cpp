#include "teamsim/harness/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "teamsim/gesture/synthetic.hpp"

namespace teamsim::harness {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ScenarioInvalid(what); }

double number(const toml::node& n, const std::string& what) {
    if (auto v = n.value<double>()) return *v;
    invalid(what + ": expected a number");
}

double number_or(const toml::table& t, std::string_view key, double fallback, const std::string& ctx) {
    const auto* n = t.get(key);
    return n ? number(*n, ctx + "." + std::string(key)) : fallback;
}

const toml::table& table(const toml::node& n, const std::string& what) {
    const auto* t = n.as_table();
    if (!t) invalid(what + ": expected a table");
    return *t;
}

std::string text(const toml::node& n, const std::string& what) {
    if (auto v = n.value<std::string>()) return *v;
    invalid(what + ": expected a string");
}

std::vector<double> numbers(const toml::node& n, const std::string& what) {
    const auto* a = n.as_array();
    if (!a) invalid(what + ": expected an array");
    std::vector<double> out;
    for (const auto& e : *a) out.push_back(number(e, what));
    return out;
}

Point2 point(const toml::node& n, const std::string& what) {
    const auto v = numbers(n, what);
    if (v.size() != 2) invalid(what + ": expected [x, y]");
    return {v[0], v[1]};
}

Pose2D pose(const toml::node& n, const std::string& what) {
    const auto v = numbers(n, what);
    if (v.size() != 3) invalid(what + ": expected [x, y, theta]");
    return make_pose(v[0], v[1], v[2]);
}

KeepInRegion region(const toml::node& n, const std::string& what) {
    const auto& t = table(n, what);
    try {
        if (const auto* c = t.get("circle")) {
            const auto v = numbers(*c, what + ".circle");
            if (v.size() != 3) invalid(what + ".circle: expected [cx, cy, radius]");
            return KeepInRegion::circle({v[0], v[1]}, v[2]);
        }
        if (const auto* p = t.get("polygon")) {
            const auto* a = p->as_array();
            if (!a) invalid(what + ".polygon: expected an array of points");
            std::vector<Point2> vertices;
            for (const auto& e : *a) vertices.push_back(point(e, what + ".polygon"));
            return KeepInRegion::polygon(std::move(vertices));
        }
    } catch (const InvalidRegion& e) {
        invalid(what + ": " + e.what());
    }
    invalid(what + ": expected circle or polygon");
}

const toml::node& required(const toml::table& t, std::string_view key, const std::string& ctx) {
    const auto* n = t.get(key);
    if (!n) invalid(ctx + ": missing '" + std::string(key) + "'");
    return *n;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

CommandAction parse_command(const toml::table& item, const std::string& ctx) {
    const std::string spec = text(required(item, "command", ctx), ctx + ".command");
    std::istringstream words(spec);
    std::string kind_word, tier_word, extra;
    words >> kind_word >> tier_word >> extra;
    CommandAction cmd;
    const auto kind = executive::parse_command_kind(kind_word);
    if (!kind || !extra.empty()) invalid(ctx + ": bad command '" + spec + "'");
    cmd.kind = *kind;
    const bool tiered = cmd.kind == executive::CommandKind::Traverse || cmd.kind == executive::CommandKind::Explore;
    if (tiered) {
        const auto tier = executive::parse_tier(tier_word);
        if (!tier) invalid(ctx + ": command '" + spec + "' needs a tier (near, medium, far)");
        cmd.tier = *tier;
    } else if (!tier_word.empty()) {
        invalid(ctx + ": command '" + spec + "' takes no tier");
    }
    if (const auto* p = item.get("human_pose")) cmd.human_pose = pose(*p, ctx + ".human_pose");
    if (const auto* r = item.get("region")) {
        if (cmd.kind != executive::CommandKind::Explore) invalid(ctx + ": only explore takes a region");
        cmd.region = region(*r, ctx + ".region");
    }
    return cmd;
}

ScriptItem parse_item(const toml::table& item, const std::string& ctx, const std::filesystem::path& base) {
    ScriptItem out;
    out.t = number(required(item, "t", ctx), ctx + ".t");
    int actions = 0;
    for (const char* key : {"glove", "glove_file", "command", "walk", "marker", "align"}) actions += item.contains(key);
    if (actions != 1) invalid(ctx + ": exactly one of glove, glove_file, command, walk, marker, align is required");

    if (const auto* g = item.get("glove")) {
        GloveAction a;
        a.spec = text(*g, ctx + ".glove");
        a.source = a.spec;
        synthesize_glove(a.spec, 0.0, 0.0, 0);  // reject bad specs at load time
        out.action = std::move(a);
    } else if (const auto* f = item.get("glove_file")) {
        GloveAction a;
        const auto path = resolve(base, text(*f, ctx + ".glove_file"));
        a.source = path.filename().string();
        try {
            a.trace = gesture::load_trace(path);
        } catch (const std::exception& e) {
            invalid(ctx + ": cannot load glove trace " + path.string() + ": " + e.what());
        }
        if (a.trace.empty()) invalid(ctx + ": glove trace " + path.string() + " is empty");
        const double shift = out.t - a.trace.front().t;
        for (auto& frame : a.trace) frame.t += shift;
        out.action = std::move(a);
    } else if (item.contains("command")) {
        out.action = parse_command(item, ctx);
    } else if (const auto* w = item.get("walk")) {
        const auto v = numbers(*w, ctx + ".walk");
        if (v.size() != 2 && v.size() != 3) invalid(ctx + ".walk: expected [x, y] or [x, y, heading]");
        WalkAction a{{v[0], v[1]}, std::nullopt};
        if (v.size() == 3) a.heading = normalize_angle(v[2]);
        out.action = a;
    } else if (const auto* m = item.get("marker")) {
        const auto& t = table(*m, ctx + ".marker");
        MarkerAction a;
        a.marker.id = text(required(t, "id", ctx + ".marker"), ctx + ".marker.id");
        a.marker.position = point(required(t, "position", ctx + ".marker"), ctx + ".marker.position");
        if (const auto* l = t.get("label")) a.marker.label = text(*l, ctx + ".marker.label");
        const std::string by = t.get("by") ? text(*t.get("by"), ctx + ".marker.by") : "robot";
        if (by != "robot" && by != "human") invalid(ctx + ".marker.by: expected robot or human");
        a.from_human = by == "human";
        a.marker.source = a.from_human ? executive::MarkerSource::Manual : executive::MarkerSource::Scripted;
        out.action = a;
    } else if (const auto* al = item.get("align")) {
        const auto& t = table(*al, ctx + ".align");
        AlignAction a;
        const auto* arr = required(t, "landmarks", ctx + ".align").as_array();
        if (!arr) invalid(ctx + ".align.landmarks: expected an array of points");
        for (const auto& e : *arr) a.landmarks.push_back(point(e, ctx + ".align.landmarks"));
        a.noise = number_or(t, "noise", 0.0, ctx + ".align");
        out.action = a;
    }
    return out;
}

Assertion parse_assertion(const toml::table& item, const std::string& ctx) {
    if (item.size() != 1) invalid(ctx + ": each assertion holds exactly one check");
    const auto entry = item.cbegin();
    const std::string k(entry->first.str());
    const toml::node& node = entry->second;
    const std::string c = ctx + "." + k;
    if (k == "final_distance") {
        const auto& t = table(node, c);
        return FinalDistance{point(required(t, "target", c), c + ".target"), number(required(t, "max", c), c + ".max")};
    }
    if (k == "collisions") {
        const double v = number(node, c);
        if (v < 0) invalid(c + ": must be >= 0");
        return MaxCollisions{static_cast<std::uint64_t>(v)};
    }
    if (k == "coverage") return MinCoverage{number(node, c)};
    if (k == "time_to_coverage") {
        const auto& t = table(node, c);
        return CoverageReached{number_or(t, "fraction", 0.9, c), number(required(t, "within", c), c + ".within")};
    }
    if (k == "monotone_coverage") return MonotoneCoverage{};
    if (k == "event") {
        const auto& t = table(node, c);
        EventCount e;
        const auto kind = executive::parse_event_kind(text(required(t, "kind", c), c + ".kind"));
        if (!kind) invalid(c + ".kind: unknown event kind");
        e.kind = *kind;
        e.min = static_cast<int>(number_or(t, "min", 0, c));
        if (t.contains("max")) e.max = static_cast<int>(number(*t.get("max"), c + ".max"));
        return e;
    }
    if (k == "mode") {
        const auto mode = executive::parse_mode(text(node, c));
        if (!mode) invalid(c + ": unknown mode");
        return FinalMode{*mode};
    }
    if (k == "acks") {
        const auto& t = table(node, c);
        return AckCount{static_cast<int>(number_or(t, "accepted", 0, c)), static_cast<int>(number_or(t, "rejected", 0, c))};
    }
    if (k == "ack_text") return AckText{text(node, c)};
    if (k == "halted_on_return") return HaltedOnReturn{number_or(table(node, c), "margin", 0.5, c)};
    if (k == "marker") {
        const auto& t = table(node, c);
        return MarkerAt{text(required(t, "id", c), c + ".id"), point(required(t, "position", c), c + ".position"),
                        number_or(t, "tolerance", 0.1, c)};
    }
    if (k == "occluded_telemetry") return OccludedTelemetry{static_cast<int>(number_or(table(node, c), "min_ticks", 1, c))};
    if (k == "keep_in") return KeepInSound{};
    invalid(ctx + ": unknown assertion '" + k + "'");
}

}  // namespace

std::string describe(const Assertion& a) {
    std::ostringstream out;
    out.precision(6);
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FinalDistance>)
                out << "final robot position within " << x.max << " m of (" << x.target.x << ", " << x.target.y << ")";
            else if constexpr (std::is_same_v<T, MaxCollisions>)
                out << "collisions <= " << x.max;
            else if constexpr (std::is_same_v<T, MinCoverage>)
                out << "final coverage >= " << x.min;
            else if constexpr (std::is_same_v<T, CoverageReached>)
                out << "time_to_coverage(" << x.fraction << ") <= " << x.within << " s";
            else if constexpr (std::is_same_v<T, MonotoneCoverage>)
                out << "coverage curve non-decreasing";
            else if constexpr (std::is_same_v<T, EventCount>) {
                out << "event " << executive::to_string(x.kind) << " count >= " << x.min;
                if (x.max) out << " and <= " << *x.max;
            } else if constexpr (std::is_same_v<T, FinalMode>)
                out << "final mode " << executive::to_string(x.mode);
            else if constexpr (std::is_same_v<T, AckCount>)
                out << "acks accepted " << x.accepted << ", rejected " << x.rejected;
            else if constexpr (std::is_same_v<T, AckText>)
                out << "an accepted ack reads \"" << x.text << "\"";
            else if constexpr (std::is_same_v<T, HaltedOnReturn>)
                out << "halted on the return path, " << x.margin << " m clear of both ends";
            else if constexpr (std::is_same_v<T, MarkerAt>)
                out << "marker " << x.id << " at (" << x.position.x << ", " << x.position.y << ") within "
                    << x.tolerance << " m";
            else if constexpr (std::is_same_v<T, OccludedTelemetry>)
                out << "telemetry on every occluded tick, >= " << x.min_ticks << " occluded ticks";
            else if constexpr (std::is_same_v<T, KeepInSound>)
                out << "every selected frontier inside the keep-in region";
        },
        a);
    return out.str();
}

void Scenario::validate() const {
    if (!world) invalid("scenario has no world");
    if (!(budget > 0) || !std::isfinite(budget)) invalid("budget must be > 0");
    if (!(dt > 0) || !std::isfinite(dt)) invalid("dt must be > 0");
    if (!(telemetry_period > 0) || !(coverage_period > 0)) invalid("periods must be > 0");
    if (!(human_speed > 0)) invalid("human speed must be > 0");
    try {
        lidar.validate();
    } catch (const std::exception& e) {
        invalid(std::string("lidar: ") + e.what());
    }
    for (const auto* p : {&robot_pose, &human_pose})
        if (!std::isfinite(p->x) || !std::isfinite(p->y)) invalid("poses must be finite");
    if (sim::footprint_hits_wall(*world, robot_pose.position(), sim::AgentState::robot({}).radius))
        invalid("robot starts in contact with a wall");
    if (sim::footprint_hits_wall(*world, human_pose.position(), sim::AgentState::human({}).radius))
        invalid("human starts in contact with a wall");
    for (std::size_t i = 0; i < script.size(); ++i) {
        if (!std::isfinite(script[i].t) || script[i].t < 0) invalid("script times must be finite and >= 0");
        if (i > 0 && script[i].t < script[i - 1].t) invalid("script times must be non-decreasing");
    }
}

Scenario parse_scenario(std::string_view toml_text, const std::filesystem::path& base_dir) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "TOML error at line " << e.source().begin.line << ": " << e.description();
        invalid(msg.str());
    }

    Scenario s;
    s.name = text(required(root, "name", "scenario"), "name");
    s.world_path = resolve(base_dir, text(required(root, "world", "scenario"), "world"));
    try {
        s.world = sim::WorldMap::load(s.world_path);
    } catch (const std::exception& e) {
        invalid("unknown or unreadable world " + s.world_path.string() + ": " + e.what());
    }
    const double seed = number_or(root, "seed", 0, "scenario");
    if (seed < 0 || seed != std::floor(seed)) invalid("seed must be a non-negative integer");
    s.seed = static_cast<std::uint64_t>(seed);
    s.budget = number(required(root, "budget", "scenario"), "budget");
    s.dt = number_or(root, "dt", s.dt, "scenario");
    s.telemetry_period = number_or(root, "telemetry_period", s.telemetry_period, "scenario");
    s.coverage_period = number_or(root, "coverage_period", s.coverage_period, "scenario");
    if (const auto* r = root.get("coverage_region")) s.coverage_region = region(*r, "coverage_region");

    const auto& robot = table(required(root, "robot", "scenario"), "robot");
    s.robot_pose = pose(required(robot, "pose", "robot"), "robot.pose");
    if (const auto* d = robot.get("drift")) {
        const auto& t = table(*d, "robot.drift");
        s.robot_drift.yaw_rate_bias_sigma = number_or(t, "yaw_rate_bias_sigma", 0, "robot.drift");
        s.robot_drift.translation_sigma = number_or(t, "translation_sigma", 0, "robot.drift");
        s.robot_drift.seed = static_cast<std::uint64_t>(number_or(t, "seed", static_cast<double>(s.seed), "robot.drift"));
        if (s.robot_drift.yaw_rate_bias_sigma < 0 || s.robot_drift.translation_sigma < 0)
            invalid("robot.drift: sigmas must be >= 0");
    }

    const auto& human = table(required(root, "human", "scenario"), "human");
    s.human_pose = pose(required(human, "pose", "human"), "human.pose");
    s.human_speed = number_or(human, "speed", s.human_speed, "human");
    s.glove_noise = number_or(human, "glove_noise", s.glove_noise, "human");
    if (const auto* f = human.get("frame")) {
        const auto v = numbers(*f, "human.frame");
        if (v.size() != 3) invalid("human.frame: expected [rotation, tx, ty]");
        s.human_frame = {v[0], {v[1], v[2]}};
    }

    if (const auto* l = root.get("lidar")) {
        const auto& t = table(*l, "lidar");
        s.lidar.beam_count = static_cast<int>(number_or(t, "beams", s.lidar.beam_count, "lidar"));
        s.lidar.fov = number_or(t, "fov", s.lidar.fov, "lidar");
        s.lidar.max_range = number_or(t, "range", s.lidar.max_range, "lidar");
        s.lidar.range_noise_sigma = number_or(t, "noise", s.lidar.range_noise_sigma, "lidar");
    }

    if (const auto* script = root.get("script")) {
        const auto* arr = script->as_array();
        if (!arr) invalid("script: expected [[script]] entries");
        for (std::size_t i = 0; i < arr->size(); ++i)
            s.script.push_back(parse_item(table((*arr)[i], "script"), "script[" + std::to_string(i) + "]", base_dir));
    }
    if (const auto* asserts = root.get("assert")) {
        const auto* arr = asserts->as_array();
        if (!arr) invalid("assert: expected [[assert]] entries");
        for (std::size_t i = 0; i < arr->size(); ++i)
            s.assertions.push_back(parse_assertion(table((*arr)[i], "assert"), "assert[" + std::to_string(i) + "]"));
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioInvalid("cannot read scenario " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.parent_path());
}

std::vector<gesture::GloveFrame> synthesize_glove(std::string_view spec, double t0, double noise, std::uint64_t seed) {
    const gesture::TraceParams params{noise, 50.0, seed};
    const auto colon = spec.find(':');
    const std::string_view head = spec.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    auto count = [&](int lo, int hi) {
        int n = 0;
        const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
        if (ec != std::errc{} || ptr != arg.data() + arg.size() || n < lo || n > hi)
            invalid("bad glove spec '" + std::string(spec) + "'");
        return n;
    };
    if (head == "traverse") return gesture::generate_gesture_trace(gesture::Gesture::traverse(count(1, 3)), params, t0).frames;
    if (head == "explore") return gesture::generate_gesture_trace(gesture::Gesture::explore(count(1, 3)), params, t0).frames;
    if (!arg.empty() && head != "idle") invalid("bad glove spec '" + std::string(spec) + "'");
    if (head == "stop") return gesture::generate_gesture_trace(gesture::Gesture::stop(), params, t0).frames;
    if (head == "return") return gesture::generate_gesture_trace(gesture::Gesture::return_sign(), params, t0).frames;
    if (head == "unrecognized")
        return gesture::generate_gesture_trace(gesture::Gesture::unrecognized(), params, t0).frames;
    if (head == "idle") {
        double seconds = 0;
        const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), seconds);
        if (ec != std::errc{} || ptr != arg.data() + arg.size() || !(seconds > 0))
            invalid("bad glove spec '" + std::string(spec) + "'");
        return gesture::generate_idle_trace(seconds, params, t0).frames;
    }
    invalid("bad glove spec '" + std::string(spec) + "'");
}

}  // namespace teamsim::harness
