#include "teamsim/protocol/hub.hpp"

namespace teamsim::protocol {

ConnectionId Hub::open(std::string peer, Notify on_ready) {
    std::lock_guard lock(mutex_);
    const ConnectionId id = next_id_++;
    auto c = std::make_unique<Connection>();
    c->peer = std::move(peer);
    c->on_ready = std::move(on_ready);
    c->queue = OutboundQueue(config_);
    connections_.emplace(id, std::move(c));
    return id;
}

void Hub::close(ConnectionId id) {
    std::lock_guard lock(mutex_);
    connections_.erase(id);
}

void Hub::accept_locked(ConnectionId id, const Connection& c, std::vector<DecodeResult> results,
                        std::vector<std::string> raws) {
    for (std::size_t i = 0; i < results.size(); ++i) {
        ++frames_seen_;
        if (auto* env = std::get_if<Envelope>(&results[i])) {
            ++stats_.frames_in;
            inbound_.push_back({id, c.peer, std::move(raws[i]), std::move(*env)});
        } else {
            ++stats_.decode_errors;
        }
    }
}

void Hub::receive(ConnectionId id, std::string_view bytes) {
    {
        std::lock_guard lock(mutex_);
        const auto it = connections_.find(id);
        if (it == connections_.end()) return;
        std::vector<std::string> raws;
        auto results = it->second->decoder.feed(bytes, &raws);
        accept_locked(id, *it->second, std::move(results), std::move(raws));
    }
    arrived_.notify_all();
}

void Hub::receive_frame(ConnectionId id, std::string_view frame) {
    {
        std::lock_guard lock(mutex_);
        const auto it = connections_.find(id);
        if (it == connections_.end()) return;
        std::vector<DecodeResult> results;
        std::vector<std::string> raws;
        while (!frame.empty() && (frame.back() == '\n' || frame.back() == '\r')) frame.remove_suffix(1);
        if (frame.size() > kMaxFrameBytes) {
            results.emplace_back(FrameTooLarge("message exceeds the frame cap", frame.size()));
            raws.emplace_back();
        } else {
            try {
                results.emplace_back(decode(frame));
            } catch (const DecodeError& e) {
                results.emplace_back(e);
            }
            raws.emplace_back(frame);
        }
        accept_locked(id, *it->second, std::move(results), std::move(raws));
    }
    arrived_.notify_all();
}

std::vector<InboundFrame> Hub::drain() {
    std::lock_guard lock(mutex_);
    std::vector<InboundFrame> out;
    out.swap(inbound_);
    return out;
}

bool Hub::wait_for_frames(std::uint64_t total, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    return arrived_.wait_for(lock, timeout, [&] { return frames_seen_ >= total; });
}

namespace {

constexpr std::string_view kSeqPlaceholder = "\"seq\":0,";

}  // namespace

// Frames are queued with seq 0 and numbered as they leave, so the seq a
// client sees is strictly increasing even though control frames overtake.
void Hub::push_locked(Connection& c, double t, const Payload& payload) {
    Envelope env{kProtocolVersion, 0, t, payload};
    c.queue.push(env.type(), encode(env));
    ++stats_.frames_out;
}

std::optional<OutboundFrame> Hub::pop_locked(Connection& c) {
    auto f = c.queue.pop();
    if (!f) return f;
    const auto at = f->bytes.find(kSeqPlaceholder);
    if (at != std::string::npos)
        f->bytes.replace(at, kSeqPlaceholder.size(), "\"seq\":" + std::to_string(c.next_seq++) + ",");
    return f;
}

void Hub::broadcast(double t, const Payload& payload) {
    std::vector<Notify> notify;
    {
        std::lock_guard lock(mutex_);
        for (auto& [id, c] : connections_) {
            if (!c->welcomed) continue;
            push_locked(*c, t, payload);
            if (c->on_ready) notify.push_back(c->on_ready);
        }
    }
    for (auto& n : notify) n();
}

void Hub::send(ConnectionId id, double t, const Payload& payload) {
    Notify notify;
    {
        std::lock_guard lock(mutex_);
        const auto it = connections_.find(id);
        if (it == connections_.end()) return;
        push_locked(*it->second, t, payload);
        if (std::holds_alternative<mapping::GridSnapshot>(payload)) it->second->welcomed = true;
        notify = it->second->on_ready;
    }
    if (notify) notify();
}

std::vector<SnapshotRequest> Hub::take_snapshot_requests() {
    std::lock_guard lock(mutex_);
    std::vector<SnapshotRequest> out;
    for (const auto& [id, c] : connections_) {
        if (!c->welcomed) out.push_back({id, true});
        else if (c->queue.needs_snapshot()) out.push_back({id, false});
    }
    return out;
}

std::optional<OutboundFrame> Hub::pop(ConnectionId id) {
    std::lock_guard lock(mutex_);
    const auto it = connections_.find(id);
    if (it == connections_.end()) return std::nullopt;
    return pop_locked(*it->second);
}

std::vector<OutboundFrame> Hub::pop_all(ConnectionId id) {
    std::lock_guard lock(mutex_);
    std::vector<OutboundFrame> out;
    const auto it = connections_.find(id);
    if (it == connections_.end()) return out;
    while (auto f = pop_locked(*it->second)) out.push_back(std::move(*f));
    return out;
}

std::uint64_t Hub::delivered(ConnectionId id) const {
    std::lock_guard lock(mutex_);
    const auto it = connections_.find(id);
    return it == connections_.end() ? 0 : static_cast<std::uint64_t>(it->second->next_seq - 1);
}

std::size_t Hub::pending(ConnectionId id) const {
    std::lock_guard lock(mutex_);
    const auto it = connections_.find(id);
    return it == connections_.end() ? 0 : it->second->queue.size();
}

std::size_t Hub::connection_count() const {
    std::lock_guard lock(mutex_);
    return connections_.size();
}

std::vector<ConnectionId> Hub::connections() const {
    std::lock_guard lock(mutex_);
    std::vector<ConnectionId> out;
    for (const auto& [id, c] : connections_) out.push_back(id);
    return out;
}

HubStats Hub::stats() const {
    std::lock_guard lock(mutex_);
    HubStats s = stats_;
    for (const auto& [id, c] : connections_) s.dropped_diffs += c->queue.dropped_diffs();
    return s;
}

}  // namespace teamsim::protocol
