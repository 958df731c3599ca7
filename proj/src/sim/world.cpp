#include "teamsim/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace teamsim::sim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

}  // namespace

WorldMap::WorldMap(GridGeometry geometry, std::vector<Terrain> cells)
    : geometry_(geometry), cells_(std::move(cells)) {
    if (!(geometry_.resolution > 0) || !std::isfinite(geometry_.resolution))
        throw WorldFormatError("resolution must be positive");
    if (geometry_.width < 1 || geometry_.height < 1) throw WorldFormatError("empty world");
    if (cells_.size() != geometry_.size()) throw WorldFormatError("cell count does not match geometry");
    for (int ix = 0; ix < geometry_.width; ++ix) {
        for (int iy = 0; iy < geometry_.height; ++iy) {
            const bool border = ix == 0 || iy == 0 || ix == geometry_.width - 1 || iy == geometry_.height - 1;
            if (border && at({ix, iy}) != Terrain::Wall)
                throw WorldFormatError("world is not closed: open boundary cell at (" + std::to_string(ix) + "," +
                                       std::to_string(iy) + ")");
        }
    }
}

WorldMap WorldMap::parse(std::string_view text, Point2 origin) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        lines.push_back(trim(text.substr(pos, end - pos)));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw WorldFormatError("missing header");

    std::istringstream header{std::string(lines.front())};
    std::string key;
    double resolution = 0;
    if (!(header >> key >> resolution) || key != "resolution")
        throw WorldFormatError("line 1 must be `resolution <float>`");

    const auto rows = std::span(lines).subspan(1);
    if (rows.empty()) throw WorldFormatError("no grid rows");
    const std::size_t width = rows.front().size();
    GridGeometry g{static_cast<int>(width), static_cast<int>(rows.size()), resolution, origin};
    std::vector<Terrain> cells(g.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw WorldFormatError("row " + std::to_string(r) + " has width " + std::to_string(rows[r].size()) +
                                   ", expected " + std::to_string(width));
        const int iy = g.height - 1 - static_cast<int>(r);
        for (std::size_t c = 0; c < width; ++c) {
            const char ch = rows[r][c];
            if (ch != '#' && ch != '.')
                throw WorldFormatError(std::string("unexpected character '") + ch + "' in row " + std::to_string(r));
            cells[g.index(static_cast<int>(c), iy)] = ch == '#' ? Terrain::Wall : Terrain::Open;
        }
    }
    return WorldMap(g, std::move(cells));
}

WorldMap WorldMap::load(const std::filesystem::path& path, Point2 origin) {
    std::ifstream in(path);
    if (!in) throw WorldFormatError("cannot open world file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), origin);
}

std::string WorldMap::to_text() const {
    std::ostringstream out;
    out << "resolution " << geometry_.resolution << '\n';
    for (int iy = geometry_.height - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < geometry_.width; ++ix) out << (at({ix, iy}) == Terrain::Wall ? '#' : '.');
        out << '\n';
    }
    return out.str();
}

void LidarConfig::validate() const {
    if (beam_count < 1) throw std::invalid_argument("beam_count must be >= 1");
    if (!(fov > 0 && fov <= kTwoPi)) throw std::invalid_argument("fov must be in (0, 2pi]");
    if (!(max_range > 0)) throw std::invalid_argument("max_range must be positive");
    if (!(range_noise_sigma >= 0)) throw std::invalid_argument("range_noise_sigma must be >= 0");
}

namespace {

/// True iff the cell center lies inside a body the origin is not inside.
bool covered(const GridGeometry& g, const Cell& c, const Point2& origin, std::span<const CircleObstacle> bodies) {
    const Point2 center = g.cell_center(c);
    for (const auto& body : bodies)
        if (distance(center, body.center) <= body.radius && distance(origin, body.center) > body.radius) return true;
    return false;
}

}  // namespace

RayHit raycast(const WorldMap& world, const Pose2D& origin, double angle, double max_range,
               std::span<const CircleObstacle> dynamic) {
    const GridGeometry& g = world.geometry();
    const auto start = g.locate(origin.position());
    if (!start) throw InvalidOrigin("ray origin outside world bounds");
    if (world.at(*start) == Terrain::Wall) throw InvalidOrigin("ray origin inside a wall");

    RayHit result{max_range, false};
    traverse_ray(g, origin.position(), angle, max_range, [&](const Cell& c, double t_enter, double) {
        if (world.at(c) == Terrain::Wall || (!dynamic.empty() && covered(g, c, origin.position(), dynamic))) {
            result = {std::min(t_enter, max_range), t_enter <= max_range};
            if (t_enter > max_range) result = {max_range, false};
            return false;
        }
        return true;
    });
    return result;
}

Scan scan(const WorldMap& world, const Pose2D& sensor_pose, const LidarConfig& config, RandomStream& noise,
          std::span<const CircleObstacle> dynamic) {
    config.validate();
    Scan s{sensor_pose, config.fov, config.max_range, {}};
    s.beams.reserve(static_cast<std::size_t>(config.beam_count));
    for (int i = 0; i < config.beam_count; ++i) {
        const double angle = sensor_pose.theta + i * config.fov / config.beam_count;
        RayHit h = raycast(world, sensor_pose, angle, config.max_range, dynamic);
        if (h.hit && config.range_noise_sigma > 0) {
            h.range = std::clamp(h.range + noise.gaussian(config.range_noise_sigma), 1e-6, config.max_range);
        }
        s.beams.push_back({h.range, h.hit});
    }
    return s;
}

AgentState AgentState::robot(Pose2D pose, DriftModel drift) {
    AgentState a;
    a.true_pose = pose;
    a.estimated_pose = pose;
    a.max_linear = 2.0;
    a.max_angular = 2.0;
    a.radius = 0.3;
    a.drift = drift;
    a.drift_rng = RandomStream(drift.seed);
    return a;
}

AgentState AgentState::human(Pose2D pose) {
    AgentState a;
    a.true_pose = pose;
    a.estimated_pose = pose;
    a.max_linear = 1.4;
    a.max_angular = 2.0;
    a.radius = 0.3;
    return a;
}

bool footprint_hits_wall(const WorldMap& world, const Point2& center, double radius) {
    const GridGeometry& g = world.geometry();
    const Cell lo = g.cell_containing({center.x - radius, center.y - radius});
    const Cell hi = g.cell_containing({center.x + radius, center.y + radius});
    for (int iy = lo.iy; iy <= hi.iy; ++iy) {
        for (int ix = lo.ix; ix <= hi.ix; ++ix) {
            if (!world.is_wall({ix, iy})) continue;
            const double x0 = g.origin.x + ix * g.resolution;
            const double y0 = g.origin.y + iy * g.resolution;
            const double nx = std::clamp(center.x, x0, x0 + g.resolution);
            const double ny = std::clamp(center.y, y0, y0 + g.resolution);
            if (std::hypot(center.x - nx, center.y - ny) < radius) return true;
        }
    }
    return false;
}

namespace {

Pose2D integrate(const Pose2D& p, const Velocity& v, double dt) {
    if (std::abs(v.angular) < 1e-12) {
        return make_pose(p.x + v.linear * dt * std::cos(p.theta), p.y + v.linear * dt * std::sin(p.theta), p.theta);
    }
    const double th1 = p.theta + v.angular * dt;
    const double r = v.linear / v.angular;
    return make_pose(p.x + r * (std::sin(th1) - std::sin(p.theta)), p.y - r * (std::cos(th1) - std::cos(p.theta)),
                     th1);
}

void advance(const WorldMap& world, AgentState& a, const AgentState& other, double dt) {
    a.commanded.linear = std::clamp(a.commanded.linear, -a.max_linear, a.max_linear);
    a.commanded.angular = std::clamp(a.commanded.angular, -a.max_angular, a.max_angular);

    const Pose2D next = integrate(a.true_pose, a.commanded, dt);
    const bool moved = next.x != a.true_pose.x || next.y != a.true_pose.y;
    const bool hits_agent = distance(next.position(), other.true_pose.position()) < a.radius + other.radius &&
                            distance(next.position(), other.true_pose.position()) <
                                distance(a.true_pose.position(), other.true_pose.position());
    a.blocked = moved && (footprint_hits_wall(world, next.position(), a.radius) || hits_agent);
    const Pose2D previous = a.true_pose;
    if (a.blocked) {
        ++a.block_count;
        a.true_pose = make_pose(previous.x, previous.y, next.theta);
    } else {
        a.true_pose = next;
    }

    if (a.drift.enabled()) {
        const double sq = std::sqrt(dt);
        const double dyaw = a.drift_rng.gaussian(a.drift.yaw_rate_bias_sigma * sq);
        const double ddx = a.drift_rng.gaussian(a.drift.translation_sigma * sq);
        const double ddy = a.drift_rng.gaussian(a.drift.translation_sigma * sq);
        // Rotate the accumulated error about the robot's current position so a
        // small yaw increment does not teleport the estimate.
        const Point2 here = a.drift_offset.apply(a.true_pose.position());
        const Transform2D to_origin{0, {-here.x, -here.y}};
        const Transform2D rot{dyaw, {0, 0}};
        const Transform2D back{0, {here.x + ddx, here.y + ddy}};
        a.drift_offset = back.compose(rot.compose(to_origin.compose(a.drift_offset)));
        a.estimated_pose = a.drift_offset.apply(a.true_pose);
    } else {
        a.estimated_pose = a.true_pose;
    }
}

}  // namespace

void step(const WorldMap& world, Agents& agents, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
    advance(world, agents.robot, agents.human, dt);
    advance(world, agents.human, agents.robot, dt);
}

}  // namespace teamsim::sim
