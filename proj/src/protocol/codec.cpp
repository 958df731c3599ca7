#include "teamsim/protocol/codec.hpp"

#include <cmath>
#include <json.hpp>

namespace teamsim::protocol {

namespace {

using json = nlohmann::ordered_json;

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- encoding ----

double finite(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite number in envelope");
    return v;
}

json point_json(const Point2& p) { return json::array({finite(p.x), finite(p.y)}); }
json pose_json(const Pose2D& p) { return json::array({finite(p.x), finite(p.y), finite(p.theta)}); }

json region_json(const KeepInRegion& r) {
    if (r.is_circle()) {
        const auto& c = r.as_circle();
        return {{"shape", "circle"}, {"center", point_json(c.center)}, {"radius", finite(c.radius)}};
    }
    json vertices = json::array();
    for (const auto& v : r.as_polygon().vertices) vertices.push_back(point_json(v));
    return {{"shape", "polygon"}, {"vertices", vertices}};
}

char class_letter(mapping::CellClass c) {
    switch (c) {
        case mapping::CellClass::Unknown: return 'U';
        case mapping::CellClass::Free: return 'F';
        case mapping::CellClass::Occupied: return 'O';
    }
    return '?';
}

struct PayloadEncoder {
    json operator()(const CommandMsg& m) const {
        json j{{"kind", executive::to_string(m.kind)}};
        if (m.kind == executive::CommandKind::Traverse || m.kind == executive::CommandKind::Explore)
            j["tier"] = executive::to_string(m.tier);
        j["human_pose"] = pose_json(m.human_pose);
        if (m.region) j["region"] = region_json(*m.region);
        if (!m.client.empty()) j["client"] = m.client;
        return j;
    }
    json operator()(const executive::Ack& m) const {
        return {{"seq", m.seq}, {"client", m.client}, {"accepted", m.accepted},
                {"reason", executive::to_string(m.reason)}, {"text", m.text}};
    }
    json operator()(const TelemetryMsg& m) const {
        json j{{"tick", m.tick},
               {"robot_pose", pose_json(m.robot_pose)},
               {"human_pose", pose_json(m.human_pose)},
               {"velocity", json::array({finite(m.velocity.linear), finite(m.velocity.angular)})},
               {"mode", executive::to_string(m.mode)}};
        if (m.goal) j["goal"] = pose_json(*m.goal);
        if (m.region) j["region"] = region_json(*m.region);
        if (m.coverage) j["coverage"] = finite(*m.coverage);
        return j;
    }
    json operator()(const mapping::MapDiff& m) const {
        json cells = json::array();
        for (const auto& c : m.changed) cells.push_back(json::array({c.index, std::string(1, class_letter(c.cls))}));
        return {{"tick", m.tick}, {"cells", cells}};
    }
    json operator()(const mapping::GridSnapshot& m) const {
        const auto& g = m.geometry;
        return {{"tick", m.tick},
                {"width", g.width},
                {"height", g.height},
                {"resolution", finite(g.resolution)},
                {"origin", point_json(g.origin)},
                {"rle", mapping::rle_encode(m.classes)}};
    }
    json operator()(const PathMsg& m) const {
        json w = json::array();
        for (const auto& p : m.waypoints) w.push_back(pose_json(p));
        return {{"waypoints", w}};
    }
    json operator()(const FrontiersMsg& m) const {
        json list = json::array();
        for (const auto& f : m.frontiers) {
            json j{{"centroid", point_json(f.centroid)}, {"size", f.size},          {"info_gain", finite(f.info_gain)},
                   {"effort", finite(f.effort)},         {"utility", finite(f.utility)}, {"feasible", f.feasible}};
            if (f.goal) j["goal"] = pose_json(*f.goal);
            list.push_back(std::move(j));
        }
        json j{{"frontiers", list}};
        if (m.selected) j["selected"] = *m.selected;
        return j;
    }
    json operator()(const executive::Marker& m) const {
        return {{"id", m.id}, {"position", point_json(m.position)}, {"label", m.label},
                {"source", executive::to_string(m.source)}};
    }
    json operator()(const executive::Event& m) const {
        json j{{"kind", executive::to_string(m.kind)}, {"t", finite(m.t)}, {"detail", m.detail}};
        if (m.pose) j["pose"] = pose_json(*m.pose);
        return j;
    }
    json operator()(const AlignRequestMsg& m) const {
        json pairs = json::array();
        for (const auto& c : m.pairs) pairs.push_back({{"human", point_json(c.human)}, {"robot", point_json(c.robot)}});
        return {{"pairs", pairs}};
    }
    json operator()(const AlignResultMsg& m) const {
        json j{{"accepted", m.accepted},
               {"rotation", finite(m.transform.rotation)},
               {"translation", point_json(m.transform.translation)},
               {"residual", finite(m.residual)}};
        if (!m.error.empty()) j["error"] = m.error;
        return j;
    }
    json operator()(const HapticMsg& m) const { return {{"pattern", gesture::to_string(m.pattern)}}; }
};

// ---- decoding ----

const json& field(const json& obj, const char* key) {
    if (!obj.is_object()) throw SchemaError("expected object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'");
    return *it;
}

const json* optional_field(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& j, const char* what) {
    if (!j.is_number()) throw SchemaError(std::string(what) + ": expected number");
    return j.get<double>();
}

std::int64_t integer(const json& j, const char* what) {
    if (!j.is_number_integer()) throw SchemaError(std::string(what) + ": expected integer");
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
        throw SchemaError(std::string(what) + ": integer out of range");
    return j.get<std::int64_t>();
}

std::uint64_t unsigned_integer(const json& j, const char* what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        throw SchemaError(std::string(what) + ": expected non-negative integer");
    return j.get<std::uint64_t>();
}

std::string text(const json& j, const char* what) {
    if (!j.is_string()) throw SchemaError(std::string(what) + ": expected string");
    return j.get<std::string>();
}

bool boolean(const json& j, const char* what) {
    if (!j.is_boolean()) throw SchemaError(std::string(what) + ": expected boolean");
    return j.get<bool>();
}

const json& array(const json& j, const char* what) {
    if (!j.is_array()) throw SchemaError(std::string(what) + ": expected array");
    return j;
}

Point2 point(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw SchemaError(std::string(what) + ": expected [x, y]");
    return {number(j[0], what), number(j[1], what)};
}

Pose2D pose(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw SchemaError(std::string(what) + ": expected [x, y, theta]");
    return {number(j[0], what), number(j[1], what), number(j[2], what)};
}

KeepInRegion region(const json& j) {
    const std::string shape = text(field(j, "shape"), "region.shape");
    try {
        if (shape == "circle") return KeepInRegion::circle(point(field(j, "center"), "region.center"),
                                                           number(field(j, "radius"), "region.radius"));
        if (shape == "polygon") {
            std::vector<Point2> vertices;
            for (const auto& v : array(field(j, "vertices"), "region.vertices"))
                vertices.push_back(point(v, "region.vertices"));
            return KeepInRegion::polygon(std::move(vertices));
        }
    } catch (const InvalidRegion& e) {
        throw SchemaError(std::string("region: ") + e.what());
    }
    throw SchemaError("region.shape: unknown shape '" + shape + "'");
}

template <typename T, typename Parse>
T parse_enum(const json& j, const char* what, Parse parse) {
    const auto v = parse(text(j, what));
    if (!v) throw SchemaError(std::string(what) + ": unknown value '" + j.get<std::string>() + "'");
    return *v;
}

mapping::CellClass class_of(const std::string& s) {
    if (s == "U") return mapping::CellClass::Unknown;
    if (s == "F") return mapping::CellClass::Free;
    if (s == "O") return mapping::CellClass::Occupied;
    throw SchemaError("cells: unknown class '" + s + "'");
}

Payload decode_payload(MessageType type, const json& p) {
    if (!p.is_object()) throw SchemaError("payload: expected object");
    switch (type) {
        case MessageType::Command: {
            CommandMsg m;
            m.kind = parse_enum<executive::CommandKind>(field(p, "kind"), "kind", executive::parse_command_kind);
            if (m.kind == executive::CommandKind::Traverse || m.kind == executive::CommandKind::Explore)
                m.tier = parse_enum<executive::Tier>(field(p, "tier"), "tier", executive::parse_tier);
            m.human_pose = pose(field(p, "human_pose"), "human_pose");
            if (const auto* r = optional_field(p, "region")) m.region = region(*r);
            if (const auto* c = optional_field(p, "client")) m.client = text(*c, "client");
            return m;
        }
        case MessageType::Ack: {
            executive::Ack m;
            m.seq = integer(field(p, "seq"), "seq");
            m.client = text(field(p, "client"), "client");
            m.accepted = boolean(field(p, "accepted"), "accepted");
            m.reason = parse_enum<executive::AckReason>(field(p, "reason"), "reason", executive::parse_ack_reason);
            m.text = text(field(p, "text"), "text");
            return m;
        }
        case MessageType::Telemetry: {
            TelemetryMsg m;
            m.tick = unsigned_integer(field(p, "tick"), "tick");
            m.robot_pose = pose(field(p, "robot_pose"), "robot_pose");
            m.human_pose = pose(field(p, "human_pose"), "human_pose");
            const Point2 v = point(field(p, "velocity"), "velocity");
            m.velocity = {v.x, v.y};
            m.mode = parse_enum<executive::Mode>(field(p, "mode"), "mode", executive::parse_mode);
            if (const auto* g = optional_field(p, "goal")) m.goal = pose(*g, "goal");
            if (const auto* r = optional_field(p, "region")) m.region = region(*r);
            if (const auto* c = optional_field(p, "coverage")) m.coverage = number(*c, "coverage");
            return m;
        }
        case MessageType::MapDiff: {
            mapping::MapDiff m;
            m.tick = unsigned_integer(field(p, "tick"), "tick");
            for (const auto& c : array(field(p, "cells"), "cells")) {
                if (!c.is_array() || c.size() != 2) throw SchemaError("cells: expected [index, class]");
                m.changed.push_back({unsigned_integer(c[0], "cells.index"), class_of(text(c[1], "cells.class"))});
            }
            return m;
        }
        case MessageType::MapSnapshot: {
            mapping::GridSnapshot m;
            m.tick = unsigned_integer(field(p, "tick"), "tick");
            const auto width = integer(field(p, "width"), "width");
            const auto height = integer(field(p, "height"), "height");
            if (width <= 0 || height <= 0 || width > (1 << 20) || height > (1 << 20))
                throw SchemaError("width/height out of range");
            m.geometry.width = static_cast<int>(width);
            m.geometry.height = static_cast<int>(height);
            m.geometry.resolution = number(field(p, "resolution"), "resolution");
            if (!(m.geometry.resolution > 0)) throw SchemaError("resolution: must be positive");
            m.geometry.origin = point(field(p, "origin"), "origin");
            try {
                m.classes = mapping::rle_decode(text(field(p, "rle"), "rle"), m.geometry.size());
            } catch (const std::invalid_argument& e) {
                throw SchemaError(std::string("rle: ") + e.what());
            }
            return m;
        }
        case MessageType::Path: {
            PathMsg m;
            for (const auto& w : array(field(p, "waypoints"), "waypoints")) m.waypoints.push_back(pose(w, "waypoints"));
            return m;
        }
        case MessageType::Frontiers: {
            FrontiersMsg m;
            for (const auto& f : array(field(p, "frontiers"), "frontiers")) {
                FrontierSummary s;
                s.centroid = point(field(f, "centroid"), "centroid");
                s.size = unsigned_integer(field(f, "size"), "size");
                s.info_gain = number(field(f, "info_gain"), "info_gain");
                s.effort = number(field(f, "effort"), "effort");
                s.utility = number(field(f, "utility"), "utility");
                s.feasible = boolean(field(f, "feasible"), "feasible");
                if (const auto* g = optional_field(f, "goal")) s.goal = pose(*g, "goal");
                m.frontiers.push_back(std::move(s));
            }
            if (const auto* s = optional_field(p, "selected")) {
                m.selected = unsigned_integer(*s, "selected");
                if (*m.selected >= m.frontiers.size()) throw SchemaError("selected: index out of range");
            }
            return m;
        }
        case MessageType::Marker: {
            executive::Marker m;
            m.id = text(field(p, "id"), "id");
            m.position = point(field(p, "position"), "position");
            m.label = text(field(p, "label"), "label");
            m.source = parse_enum<executive::MarkerSource>(field(p, "source"), "source", [](const std::string& s) {
                return executive::parse_marker_source(s);
            });
            return m;
        }
        case MessageType::Event: {
            executive::Event m;
            m.kind = parse_enum<executive::EventKind>(field(p, "kind"), "kind", executive::parse_event_kind);
            m.t = number(field(p, "t"), "t");
            m.detail = text(field(p, "detail"), "detail");
            if (const auto* q = optional_field(p, "pose")) m.pose = pose(*q, "pose");
            return m;
        }
        case MessageType::AlignRequest: {
            AlignRequestMsg m;
            for (const auto& c : array(field(p, "pairs"), "pairs"))
                m.pairs.push_back({point(field(c, "human"), "pairs.human"), point(field(c, "robot"), "pairs.robot")});
            return m;
        }
        case MessageType::AlignResult: {
            AlignResultMsg m;
            m.accepted = boolean(field(p, "accepted"), "accepted");
            m.transform.rotation = number(field(p, "rotation"), "rotation");
            m.transform.translation = point(field(p, "translation"), "translation");
            m.residual = number(field(p, "residual"), "residual");
            if (const auto* e = optional_field(p, "error")) m.error = text(*e, "error");
            return m;
        }
        case MessageType::Haptic: {
            HapticMsg m;
            m.pattern = parse_enum<gesture::HapticPattern>(field(p, "pattern"), "pattern", gesture::parse_haptic_pattern);
            return m;
        }
    }
    throw SchemaError("unhandled type");
}

}  // namespace

std::string encode(const Envelope& env) {
    json j{{"v", env.v},
           {"type", to_string(env.type())},
           {"seq", env.seq},
           {"t", finite(env.t)},
           {"payload", std::visit(PayloadEncoder{}, env.payload)}};
    std::string out = j.dump();
    out.push_back('\n');
    if (out.size() > kMaxFrameBytes)
        throw FrameTooLarge("encoded frame of " + std::to_string(out.size()) + " bytes exceeds the 1 MiB cap",
                            out.size());
    return out;
}

Envelope decode(std::string_view frame, std::size_t stream_offset) {
    if (!frame.empty() && frame.back() == '\n') frame.remove_suffix(1);
    if (!frame.empty() && frame.back() == '\r') frame.remove_suffix(1);
    json j;
    try {
        j = json::parse(frame);
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw DecodeError(std::string("malformed frame: ") + e.what(), stream_offset + std::min(at, frame.size()));
    }
    try {
        if (!j.is_object()) throw SchemaError("frame is not an object");
        const auto v = integer(field(j, "v"), "v");
        if (v != kProtocolVersion) throw SchemaError("unsupported protocol version " + std::to_string(v));
        const std::string type_name = text(field(j, "type"), "type");
        const auto type = parse_message_type(type_name);
        if (!type) throw UnknownMessageType("unknown message type '" + type_name + "'", stream_offset);
        Envelope env;
        env.v = static_cast<int>(v);
        env.seq = integer(field(j, "seq"), "seq");
        env.t = number(field(j, "t"), "t");
        env.payload = decode_payload(*type, field(j, "payload"));
        return env;
    } catch (const SchemaError& e) {
        throw DecodeError(std::string("invalid frame: ") + e.what(), stream_offset);
    } catch (const json::exception& e) {
        throw DecodeError(std::string("invalid frame: ") + e.what(), stream_offset);
    }
}

std::vector<DecodeResult> FrameDecoder::feed(std::string_view bytes, std::vector<std::string>* raw) {
    std::vector<DecodeResult> out;
    while (!bytes.empty()) {
        const auto nl = bytes.find('\n');
        const std::string_view chunk = bytes.substr(0, nl == std::string_view::npos ? bytes.size() : nl + 1);
        bytes.remove_prefix(chunk.size());
        consumed_ += chunk.size();
        const bool complete = nl != std::string_view::npos;

        if (discarding_) {
            if (complete) {
                discarding_ = false;
                buffer_offset_ = consumed_;
            }
            continue;
        }
        buffer_.append(chunk);
        if (buffer_.size() > max_frame_) {
            out.emplace_back(FrameTooLarge("frame at offset " + std::to_string(buffer_offset_) + " exceeds " +
                                               std::to_string(max_frame_) + " bytes",
                                           buffer_.size()));
            if (raw) raw->emplace_back();
            buffer_.clear();
            discarding_ = !complete;
            buffer_offset_ = consumed_;
            continue;
        }
        if (!complete) continue;
        const std::size_t start = buffer_offset_;
        buffer_offset_ = consumed_;
        std::string line = std::move(buffer_);
        buffer_.clear();
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        try {
            out.emplace_back(decode(line, start));
        } catch (const DecodeError& e) {
            out.emplace_back(e);
        }
        if (raw) {
            while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
            raw->push_back(std::move(line));
        }
    }
    return out;
}

std::vector<DecodeResult> FrameDecoder::finish() {
    std::vector<DecodeResult> out;
    if (!discarding_ && buffer_.find_first_not_of(" \t\r\n") != std::string::npos)
        out.emplace_back(DecodeError("truncated frame at end of stream", buffer_offset_ + buffer_.size()));
    buffer_.clear();
    discarding_ = false;
    buffer_offset_ = consumed_;
    return out;
}

}  // namespace teamsim::protocol
