#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "teamsim/protocol/messages.hpp"

namespace teamsim::protocol {

/// Frames that are never dropped and overtake bulk telemetry: COMMAND, ACK,
/// EVENT, HAPTIC, MARKER, MAP_SNAPSHOT and the alignment pair.
bool is_control(MessageType t);

struct OutboundFrame {
    MessageType type{MessageType::Telemetry};
    std::string bytes;
};

struct OutboundConfig {
    std::size_t bulk_capacity{4u << 20};  // bytes of queued non-control frames
    bool prioritize_control{true};
};

/// Per-subscriber send buffer. Control frames jump ahead of bulk telemetry.
/// When the bulk lane overflows, every queued MAP_DIFF is discarded and a
/// snapshot resync is flagged; diffs pushed before the resync are discarded
/// too, since the client could not apply them. Pushing a MAP_SNAPSHOT drops
/// the diffs it supersedes.
class OutboundQueue {
public:
    explicit OutboundQueue(OutboundConfig config = {}) : config_(config) {}

    void push(MessageType type, std::string bytes);
    std::optional<OutboundFrame> pop();

    bool empty() const { return control_.empty() && bulk_.empty(); }
    std::size_t size() const { return control_.size() + bulk_.size(); }
    std::size_t bulk_bytes() const { return bulk_bytes_; }
    /// True from an overflow until a MAP_SNAPSHOT is pushed.
    bool needs_snapshot() const { return needs_snapshot_; }
    std::uint64_t dropped_diffs() const { return dropped_diffs_; }

private:
    struct Entry {
        std::uint64_t order;
        OutboundFrame frame;
    };

    OutboundConfig config_;
    std::deque<Entry> control_;
    std::deque<Entry> bulk_;
    std::size_t bulk_bytes_{0};
    std::uint64_t next_order_{0};
    bool needs_snapshot_{false};
    std::uint64_t dropped_diffs_{0};
};

/// Deterministic bandwidth-limited link: moves at most `bytes_per_tick` bytes
/// per tick out of a queue. A frame already partly on the wire finishes before
/// the next one starts.
class LinkEmulator {
public:
    explicit LinkEmulator(std::size_t bytes_per_tick) : bytes_per_tick_(bytes_per_tick) {}

    using Source = std::function<std::optional<OutboundFrame>()>;

    /// Frames whose last byte crossed the link during this tick.
    std::vector<OutboundFrame> tick(const Source& next);
    std::vector<OutboundFrame> tick(OutboundQueue& queue) {
        return tick([&] { return queue.pop(); });
    }

private:
    std::size_t bytes_per_tick_;
    std::optional<OutboundFrame> in_flight_;
    std::size_t remaining_{0};
};

}  // namespace teamsim::protocol
