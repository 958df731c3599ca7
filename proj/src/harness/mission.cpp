#include "teamsim/harness/mission.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <memory>
#include <thread>

#include "teamsim/executive/markers.hpp"
#include "teamsim/gesture/recognizer.hpp"
#include "teamsim/protocol/alignment.hpp"
#include "teamsim/protocol/codec.hpp"
#include "teamsim/protocol/hub.hpp"
#include "teamsim/protocol/net.hpp"

namespace teamsim::harness {

const char* to_string(Transport t) { return t == Transport::Loopback ? "loopback" : "tcp"; }

std::optional<Transport> parse_transport(std::string_view s) {
    if (s == "loopback") return Transport::Loopback;
    if (s == "tcp") return Transport::Tcp;
    return std::nullopt;
}

namespace {

using namespace std::chrono_literals;

constexpr double kTimeEps = 1e-9;
constexpr auto kNetTimeout = 10s;

std::string strip_newline(std::string s) {
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

/// The human client's side of the connection.
class ClientLink {
public:
    virtual ~ClientLink() = default;
    virtual void send(const std::string& bytes) = 0;
    virtual std::vector<protocol::Envelope> receive() = 0;
    /// Returns once the robot side has seen every frame the client sent.
    virtual void sync_inbound(std::uint64_t frames_sent) = 0;
    /// Returns once everything queued for the client has reached it.
    virtual void finish() = 0;
};

class LoopbackLink : public ClientLink {
public:
    explicit LoopbackLink(protocol::Hub& hub) : hub_(hub), id_(hub.open("loopback")) {}

    void send(const std::string& bytes) override { hub_.receive(id_, bytes); }

    std::vector<protocol::Envelope> receive() override {
        std::vector<protocol::Envelope> out;
        for (const auto& f : hub_.pop_all(id_)) out.push_back(protocol::decode(strip_newline(f.bytes)));
        return out;
    }

    void sync_inbound(std::uint64_t) override {}
    void finish() override {}

private:
    protocol::Hub& hub_;
    protocol::ConnectionId id_;
};

class TcpLink : public ClientLink {
public:
    TcpLink(protocol::Hub& hub, protocol::ConnectionId recorder)
        : hub_(hub), server_(hub, server_config()) {
        server_.start();
        client_.connect("127.0.0.1", server_.tcp_port());
        const auto deadline = std::chrono::steady_clock::now() + kNetTimeout;
        while (!id_) {
            for (auto id : hub_.connections())
                if (id != recorder) id_ = id;
            if (id_) break;
            if (std::chrono::steady_clock::now() > deadline) throw std::runtime_error("tcp transport: no connection");
            std::this_thread::sleep_for(1ms);
        }
    }

    ~TcpLink() override {
        client_.close();
        server_.stop();
    }

    void send(const std::string& bytes) override { client_.send_raw(bytes); }

    std::vector<protocol::Envelope> receive() override { return client_.take_received(); }

    void sync_inbound(std::uint64_t frames_sent) override {
        if (!hub_.wait_for_frames(frames_sent, kNetTimeout)) throw std::runtime_error("tcp transport: inbound stalled");
    }

    void finish() override {
        const auto deadline = std::chrono::steady_clock::now() + kNetTimeout;
        while (hub_.pending(*id_) > 0) {
            if (std::chrono::steady_clock::now() > deadline) throw std::runtime_error("tcp transport: outbound stalled");
            std::this_thread::sleep_for(1ms);
        }
        if (!client_.wait_for_count(hub_.delivered(*id_), kNetTimeout))
            throw std::runtime_error("tcp transport: client did not receive every frame");
    }

private:
    static protocol::ServerConfig server_config() {
        protocol::ServerConfig c;
        c.tcp_port = 0;
        c.enable_ws = false;
        return c;
    }

    protocol::Hub& hub_;
    protocol::NetworkServer server_;
    protocol::TcpClient client_;
    std::optional<protocol::ConnectionId> id_;
};

/// Human teammate: follows the script, wears the glove, walks, and watches a
/// console fed by the robot.
class HumanClient {
public:
    HumanClient(const Scenario& s, std::vector<ScriptItem> script, std::uint64_t seed, ClientLink& link)
        : scenario_(s),
          script_(std::move(script)),
          seed_(seed),
          link_(link),
          to_device_(s.human_frame.inverse()),
          rng_(seed * 2654435761u + 17) {}

    void act(double now, const sim::AgentState& human) {
        while (cursor_ < script_.size() && script_[cursor_].t <= now + kTimeEps) {
            perform(script_[cursor_], now, human);
            ++cursor_;
        }
        while (!glove_.empty() && glove_.front().t <= now + kTimeEps) {
            const auto frame = glove_.front();
            glove_.pop_front();
            if (last_glove_t_ && frame.t <= *last_glove_t_) continue;
            last_glove_t_ = frame.t;
            const auto out = fsm_.step(frame);
            for (const auto& h : out.haptics) send(now, protocol::HapticMsg{h.pattern});
            if (out.gesture) {
                const auto cmd = executive::command_from_gesture(*out.gesture, device(human.true_pose), 0, "glove");
                if (cmd) send(now, protocol::CommandMsg{cmd->kind, cmd->tier, cmd->human_pose, std::nullopt, cmd->client});
            }
        }
    }

    void steer(sim::AgentState& human, double dt) const {
        human.commanded = {};
        if (!walk_) return;
        const Pose2D& p = human.true_pose;
        const Point2 to = walk_->target - p.position();
        if (!arrived_) {
            const double dist = to.norm();
            if (dist > 0.02) {
                const double err = normalize_angle(std::atan2(to.y, to.x) - p.theta);
                human.commanded.angular = std::clamp(err / dt, -human.max_angular, human.max_angular);
                if (std::abs(err) < 0.1) human.commanded.linear = std::min(scenario_.human_speed, dist / dt);
                return;
            }
        }
        if (walk_->heading) {
            const double err = normalize_angle(*walk_->heading - p.theta);
            human.commanded.angular = std::clamp(err / dt, -human.max_angular, human.max_angular);
        }
    }

    /// Latches arrival so the final turn does not restart the walk.
    void update_walk(const sim::AgentState& human) {
        if (walk_ && !arrived_ && distance(walk_->target, human.true_pose.position()) <= 0.02) arrived_ = true;
    }

    void receive(MissionTrace& trace) {
        for (const auto& env : link_.receive()) {
            trace.human_view.apply(env);
            if (const auto* tm = std::get_if<protocol::TelemetryMsg>(&env.payload))
                trace.human_telemetry_ticks.insert(tm->tick);
        }
    }

    std::uint64_t frames_sent() const { return frames_sent_; }

private:
    Pose2D device(const Pose2D& world) const { return to_device_.apply(world); }

    void send(double t, protocol::Payload payload) {
        link_.send(protocol::encode({protocol::kProtocolVersion, next_seq_++, t, std::move(payload)}));
        ++frames_sent_;
    }

    void perform(const ScriptItem& item, double now, const sim::AgentState& human) {
        std::visit(
            [&](const auto& a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, GloveAction>) {
                    auto frames = a.trace.empty()
                                      ? synthesize_glove(a.spec, item.t, scenario_.glove_noise, seed_ * 1000003 + cursor_)
                                      : a.trace;
                    std::deque<gesture::GloveFrame> merged;
                    std::merge(glove_.begin(), glove_.end(), frames.begin(), frames.end(), std::back_inserter(merged),
                               [](const auto& x, const auto& y) { return x.t < y.t; });
                    glove_ = std::move(merged);
                } else if constexpr (std::is_same_v<T, CommandAction>) {
                    protocol::CommandMsg m;
                    m.kind = a.kind;
                    m.tier = a.tier;
                    m.human_pose = device(a.human_pose.value_or(human.true_pose));
                    if (a.region) m.region = protocol::transform_region(*a.region, to_device_);
                    m.client = "console";
                    send(now, m);
                } else if constexpr (std::is_same_v<T, WalkAction>) {
                    walk_ = a;
                    arrived_ = false;
                } else if constexpr (std::is_same_v<T, MarkerAction>) {
                    executive::Marker m = a.marker;
                    m.position = to_device_.apply(m.position);
                    send(now, m);
                } else if constexpr (std::is_same_v<T, AlignAction>) {
                    protocol::AlignRequestMsg req;
                    for (const auto& p : a.landmarks) {
                        Point2 seen = to_device_.apply(p);
                        seen.x += rng_.gaussian(a.noise);
                        seen.y += rng_.gaussian(a.noise);
                        req.pairs.push_back({seen, p});
                    }
                    send(now, req);
                }
            },
            item.action);
    }

    const Scenario& scenario_;
    std::vector<ScriptItem> script_;
    std::uint64_t seed_;
    ClientLink& link_;
    Transform2D to_device_;
    RandomStream rng_;
    std::size_t cursor_{0};
    std::deque<gesture::GloveFrame> glove_;
    std::optional<double> last_glove_t_;
    gesture::ActivationFsm fsm_;
    std::optional<WalkAction> walk_;
    bool arrived_{false};
    std::int64_t next_seq_{1};
    std::uint64_t frames_sent_{0};
};

double coverage_of(std::span<const mapping::CellClass> classes, const GridGeometry& g,
                   const std::optional<KeepInRegion>& region) {
    std::size_t total = 0, known = 0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (region && !region->contains(g.cell_center(i))) continue;
        ++total;
        known += classes[i] != mapping::CellClass::Unknown;
    }
    return total == 0 ? 0.0 : static_cast<double>(known) / static_cast<double>(total);
}

bool occluded(const sim::WorldMap& world, const Pose2D& from, const Point2& to) {
    const Point2 d = to - from.position();
    const double dist = d.norm();
    if (dist < 1e-9) return false;
    const auto hit = sim::raycast(world, from, std::atan2(d.y, d.x), dist);
    return hit.hit && hit.range < dist;
}

std::int64_t every(double period, double dt) { return std::max<std::int64_t>(1, std::llround(period / dt)); }

}  // namespace

MissionResult run(const Scenario& scenario, const RunOptions& options) {
    scenario.validate();
    const std::uint64_t seed = options.seed.value_or(scenario.seed);
    const sim::WorldMap& world = *scenario.world;
    const GridGeometry& g = world.geometry();
    const double dt = scenario.dt;

    sim::DriftModel drift = scenario.robot_drift;
    if (options.seed) drift.seed = *options.seed;
    sim::Agents agents{sim::AgentState::robot(scenario.robot_pose, drift), sim::AgentState::human(scenario.human_pose)};
    agents.human.max_linear = scenario.human_speed;
    sim::AgentState& robot = agents.robot;

    mapping::OccupancyGrid grid(g);
    planning::InflatedCostmap costmap(grid);
    executive::Executive exec;
    executive::MarkerRegistry registry;
    Transform2D alignment = Transform2D::identity();
    RandomStream lidar_noise(seed * 7919 + 3);

    std::vector<ScriptItem> human_script, robot_script;
    for (const auto& item : scenario.script) {
        const auto* m = std::get_if<MarkerAction>(&item.action);
        (m && !m->from_human ? robot_script : human_script).push_back(item);
    }

    if (options.live && options.transport != Transport::Loopback)
        throw std::invalid_argument("live serving runs the scripted human over the loopback transport");
    if (options.live && !(options.live->speed > 0)) throw std::invalid_argument("live speed must be positive");

    protocol::Hub hub;
    const auto recorder = hub.open("recorder");
    std::unique_ptr<protocol::NetworkServer> server;
    if (options.live) {
        server = std::make_unique<protocol::NetworkServer>(hub, options.live->server);
        server->start();
        if (options.live->on_listening)
            options.live->on_listening(server->tcp_port(), options.live->server.enable_ws ? server->ws_port() : 0);
    }
    std::unique_ptr<ClientLink> link;
    if (options.transport == Transport::Tcp) link = std::make_unique<TcpLink>(hub, recorder);
    else link = std::make_unique<LoopbackLink>(hub);
    HumanClient human(scenario, std::move(human_script), seed, *link);

    MissionResult result;
    result.summary.scenario = scenario.name;
    result.summary.seed = seed;
    result.summary.transport = to_string(options.transport);
    MissionMetrics& metrics = result.summary.metrics;
    MissionTrace& trace = result.trace;

    std::optional<KeepInRegion> coverage_region = scenario.coverage_region;
    std::vector<std::pair<double, std::vector<mapping::CellClass>>> unresolved_samples;
    auto sample_coverage = [&](double t) {
        if (coverage_region) {
            metrics.coverage_curve.push_back({t, coverage_of(grid.classes(), g, coverage_region)});
        } else {
            unresolved_samples.emplace_back(t, std::vector<mapping::CellClass>(grid.classes().begin(), grid.classes().end()));
        }
    };
    auto resolve_coverage = [&](const std::optional<KeepInRegion>& region) {
        coverage_region = region;
        for (const auto& [t, classes] : unresolved_samples)
            metrics.coverage_curve.push_back({t, coverage_of(classes, g, region)});
        unresolved_samples.clear();
    };

    auto handle_inbound = [&](const protocol::InboundFrame& in, double t) {
        result.replay.push_back({t, true, in.raw});
        const auto& env = in.envelope;
        if (const auto* cmd = std::get_if<protocol::CommandMsg>(&env.payload)) {
            const auto command = protocol::to_command(*cmd, env.seq, in.peer, alignment);
            ++metrics.commands_issued[executive::to_string(command.kind)];
            const auto ack = exec.handle_command(command, costmap, robot);
            (ack.accepted ? metrics.acks_accepted : metrics.acks_rejected)++;
            trace.acks.push_back(ack);
            if (ack.accepted && command.kind == executive::CommandKind::Return && exec.active_goal()) {
                ReturnRecord r{t, robot.true_pose.position(), *exec.active_goal(), {}};
                if (const auto* path = exec.active_path()) r.path = path->waypoints;
                trace.last_return = std::move(r);
            }
            if (ack.accepted && command.kind == executive::CommandKind::Explore && !coverage_region)
                resolve_coverage(exec.active_region());
            hub.broadcast(t, ack);
        } else if (const auto* req = std::get_if<protocol::AlignRequestMsg>(&env.payload)) {
            protocol::AlignResultMsg res;
            try {
                const auto a = protocol::estimate_alignment(req->pairs);
                alignment = a.transform;
                res = {true, a.transform, a.residual, ""};
            } catch (const std::exception& e) {
                res = {false, Transform2D::identity(), 0.0, e.what()};
            }
            hub.broadcast(t, res);
        } else if (const auto* m = std::get_if<executive::Marker>(&env.payload)) {
            executive::Marker placed = *m;
            placed.position = alignment.apply(m->position);
            try {
                if (registry.add(placed)) hub.broadcast(t, placed);
            } catch (const std::exception&) {
                ++trace.inbound_rejected;
            }
        } else if (const auto* h = std::get_if<protocol::HapticMsg>(&env.payload)) {
            hub.broadcast(t, *h);
        } else {
            ++trace.inbound_rejected;
        }
    };

    const double duration = options.live && options.live->duration ? *options.live->duration : scenario.budget;
    const auto ticks = static_cast<std::uint64_t>(std::llround(duration / dt));
    const auto wall_start = std::chrono::steady_clock::now();
    const auto telemetry_every = every(scenario.telemetry_period, dt);
    const auto coverage_every = every(scenario.coverage_period, dt);
    std::size_t robot_cursor = 0;

    for (std::uint64_t k = 0; k < ticks; ++k) {
        const double t = static_cast<double>(k) * dt;
        const bool last = k + 1 == ticks;
        if (options.live)
            std::this_thread::sleep_until(wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                           std::chrono::duration<double>(t / options.live->speed)));

        human.act(t, agents.human);
        while (robot_cursor < robot_script.size() && robot_script[robot_cursor].t <= t + kTimeEps) {
            const auto& marker = std::get<MarkerAction>(robot_script[robot_cursor++].action).marker;
            if (registry.add(marker)) hub.broadcast(t, marker);
        }
        link->sync_inbound(human.frames_sent());
        const auto inbound = hub.drain();
        // Welcome new connections before their first commands are acknowledged.
        for (const auto& req : hub.take_snapshot_requests())
            if (req.fresh) hub.send(req.id, t, mapping::snapshot(grid, k == 0 ? 0 : k - 1));
        for (const auto& in : inbound) handle_inbound(in, t);

        const sim::CircleObstacle body{agents.human.true_pose.position(), agents.human.radius};
        const auto scan = sim::scan(world, robot.true_pose, scenario.lidar, lidar_noise, std::span(&body, 1));
        const auto diff = grid.integrate_scan(robot.estimated_pose, scan, k);
        costmap.apply_diff(diff);
        if (!diff.empty()) hub.broadcast(t, diff);
        for (const auto& req : hub.take_snapshot_requests()) hub.send(req.id, t, mapping::snapshot(grid, k));

        const auto out = exec.tick(grid, costmap, robot, diff, dt, t);
        robot.commanded = out.command;
        for (const auto& e : out.events) {
            ++metrics.events[executive::to_string(e.kind)];
            trace.events.push_back(e);
            if (e.kind == executive::EventKind::FrontierSelected && exec.selected_frontier() && exec.active_region()) {
                const auto& f = *exec.selected_frontier();
                const auto& region = *exec.active_region();
                ++metrics.keep_in_checks;
                const bool cells_inside = std::all_of(f.cells.begin(), f.cells.end(),
                                                      [&](std::size_t c) { return region.contains(g.cell_center(c)); });
                const bool goal_inside = !f.goal || region.contains(f.goal->position());
                if (!cells_inside || !goal_inside) ++metrics.keep_in_violations;
            }
            hub.broadcast(t, e);
        }
        if (out.path_changed) {
            protocol::PathMsg p;
            if (const auto* path = exec.active_path()) p.waypoints = path->waypoints;
            hub.broadcast(t, p);
        }
        if (out.frontiers_changed) hub.broadcast(t, protocol::summarize(exec.frontiers(), exec.selected_frontier()));

        human.steer(agents.human, dt);
        const Point2 before = robot.true_pose.position();
        const bool was_blocked = robot.blocked;
        sim::step(world, agents, dt);
        human.update_walk(agents.human);
        metrics.distance_traveled += distance(before, robot.true_pose.position());
        if (robot.blocked && !was_blocked) ++metrics.collisions;

        const bool hidden = occluded(world, agents.human.true_pose, robot.true_pose.position());
        if (hidden) ++trace.occluded_ticks;
        if (static_cast<std::int64_t>(k) % coverage_every == 0 || last) sample_coverage(t);
        if (static_cast<std::int64_t>(k) % telemetry_every == 0 || last) {
            protocol::TelemetryMsg tm;
            tm.tick = k;
            tm.robot_pose = robot.estimated_pose;
            tm.human_pose = agents.human.true_pose;
            tm.velocity = robot.commanded;
            tm.mode = exec.mode();
            tm.goal = exec.active_goal();
            tm.region = exec.active_region();
            if (tm.region) tm.coverage = coverage_of(grid.classes(), g, tm.region);
            hub.broadcast(t, tm);
            if (hidden) trace.occluded_telemetry_ticks.insert(k);
        }

        for (auto& f : hub.pop_all(recorder)) result.replay.push_back({t, false, strip_newline(std::move(f.bytes))});
        human.receive(trace);
    }
    link->finish();
    human.receive(trace);
    if (server) server->stop();
    if (!coverage_region) resolve_coverage(std::nullopt);

    metrics.ticks = ticks;
    metrics.sim_time = static_cast<double>(ticks) * dt;
    metrics.final_robot_pose = robot.true_pose;
    metrics.final_mode = executive::to_string(exec.mode());
    trace.final_command = robot.commanded;
    trace.final_estimate = robot.estimated_pose;
    trace.markers = registry.all();
    result.final_map = mapping::snapshot(grid, ticks == 0 ? 0 : ticks - 1);
    result.summary.assertions = evaluate(scenario, result);
    return result;
}

}  // namespace teamsim::harness
