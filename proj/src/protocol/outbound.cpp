#include "teamsim/protocol/outbound.hpp"

#include <algorithm>

namespace teamsim::protocol {

bool is_control(MessageType t) {
    switch (t) {
        case MessageType::Command:
        case MessageType::Ack:
        case MessageType::Event:
        case MessageType::Haptic:
        case MessageType::Marker:
        case MessageType::MapSnapshot:
        case MessageType::AlignRequest:
        case MessageType::AlignResult: return true;
        default: return false;
    }
}

void OutboundQueue::push(MessageType type, std::string bytes) {
    Entry e{next_order_++, {type, std::move(bytes)}};
    if (type == MessageType::MapSnapshot) {
        // Queued diffs are already contained in the snapshot.
        bulk_.erase(std::remove_if(bulk_.begin(), bulk_.end(),
                                   [&](const Entry& q) {
                                       if (q.frame.type != MessageType::MapDiff) return false;
                                       bulk_bytes_ -= q.frame.bytes.size();
                                       return true;
                                   }),
                    bulk_.end());
        needs_snapshot_ = false;
    }
    if (is_control(type)) {
        control_.push_back(std::move(e));
        return;
    }
    if (type == MessageType::MapDiff && needs_snapshot_) {
        ++dropped_diffs_;
        return;
    }
    bulk_bytes_ += e.frame.bytes.size();
    bulk_.push_back(std::move(e));
    if (bulk_bytes_ <= config_.bulk_capacity) return;

    const auto before = bulk_.size();
    bulk_.erase(std::remove_if(bulk_.begin(), bulk_.end(),
                               [&](const Entry& q) {
                                   if (q.frame.type != MessageType::MapDiff) return false;
                                   bulk_bytes_ -= q.frame.bytes.size();
                                   return true;
                               }),
                bulk_.end());
    if (bulk_.size() != before) {
        dropped_diffs_ += before - bulk_.size();
        needs_snapshot_ = true;
    }
}

std::optional<OutboundFrame> OutboundQueue::pop() {
    std::deque<Entry>* lane = nullptr;
    if (!control_.empty() && (config_.prioritize_control || bulk_.empty() ||
                              control_.front().order < bulk_.front().order))
        lane = &control_;
    else if (!bulk_.empty())
        lane = &bulk_;
    if (!lane) return std::nullopt;
    OutboundFrame f = std::move(lane->front().frame);
    lane->pop_front();
    if (lane == &bulk_) bulk_bytes_ -= f.bytes.size();
    return f;
}

std::vector<OutboundFrame> LinkEmulator::tick(const Source& next) {
    std::vector<OutboundFrame> delivered;
    std::size_t credit = bytes_per_tick_;
    while (credit > 0) {
        if (!in_flight_) {
            in_flight_ = next();
            if (!in_flight_) break;
            remaining_ = in_flight_->bytes.size();
        }
        const std::size_t sent = std::min(credit, remaining_);
        credit -= sent;
        remaining_ -= sent;
        if (remaining_ == 0) {
            delivered.push_back(std::move(*in_flight_));
            in_flight_.reset();
        }
    }
    return delivered;
}

}  // namespace teamsim::protocol
