#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "teamsim/protocol/codec.hpp"
#include "teamsim/protocol/messages.hpp"
#include "teamsim/protocol/outbound.hpp"

namespace teamsim::protocol {

using ConnectionId = std::uint64_t;

struct InboundFrame {
    ConnectionId from{0};
    std::string peer;   // connection name, e.g. "tcp:3"
    std::string raw;    // frame bytes as received, without the newline
    Envelope envelope;
};

struct HubStats {
    std::uint64_t frames_in{0};
    std::uint64_t decode_errors{0};
    std::uint64_t frames_out{0};
    std::uint64_t dropped_diffs{0};
};

/// Connections that need a full map before diffs make sense to them.
struct SnapshotRequest {
    ConnectionId id{0};
    bool fresh{false};  // newly opened, as opposed to resyncing after overflow
};

/// Transport-independent server side of the protocol. Transports feed raw
/// bytes in and pull encoded frames out (any thread); the simulation drains
/// inbound envelopes and publishes outbound ones (one thread). Each
/// connection gets its own outbound seq counter.
class Hub {
public:
    using Notify = std::function<void()>;

    explicit Hub(OutboundConfig config = {}) : config_(config) {}

    /// `on_ready` runs (without the hub lock) whenever frames are queued for
    /// the connection.
    ConnectionId open(std::string peer, Notify on_ready = {});
    void close(ConnectionId id);

    /// Appends stream bytes from a connection. Complete frames are decoded
    /// and queued in arrival order; bad frames are counted and skipped.
    void receive(ConnectionId id, std::string_view bytes);
    /// Same for a transport that already delimits messages (WebSocket).
    void receive_frame(ConnectionId id, std::string_view frame);

    std::vector<InboundFrame> drain();
    /// Blocks until `total` frames (good or bad) have arrived over the hub's
    /// lifetime, or the timeout passes.
    bool wait_for_frames(std::uint64_t total, std::chrono::milliseconds timeout);

    void broadcast(double t, const Payload& payload);
    void send(ConnectionId id, double t, const Payload& payload);
    std::vector<SnapshotRequest> take_snapshot_requests();

    std::optional<OutboundFrame> pop(ConnectionId id);
    std::vector<OutboundFrame> pop_all(ConnectionId id);

    /// Frames taken off the connection's queue so far (its last outbound seq).
    std::uint64_t delivered(ConnectionId id) const;
    /// Frames still queued for the connection.
    std::size_t pending(ConnectionId id) const;

    std::size_t connection_count() const;
    std::vector<ConnectionId> connections() const;
    HubStats stats() const;

private:
    struct Connection {
        std::string peer;
        Notify on_ready;
        FrameDecoder decoder;
        OutboundQueue queue;
        std::int64_t next_seq{1};
        bool welcomed{false};
    };

    void accept_locked(ConnectionId id, const Connection& c, std::vector<DecodeResult> results,
                       std::vector<std::string> raws);
    void push_locked(Connection& c, double t, const Payload& payload);
    std::optional<OutboundFrame> pop_locked(Connection& c);

    OutboundConfig config_;
    mutable std::mutex mutex_;
    std::condition_variable arrived_;
    std::map<ConnectionId, std::unique_ptr<Connection>> connections_;
    ConnectionId next_id_{1};
    std::vector<InboundFrame> inbound_;
    HubStats stats_;
    std::uint64_t frames_seen_{0};
};

}  // namespace teamsim::protocol
