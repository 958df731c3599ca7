#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "teamsim/protocol/messages.hpp"

namespace teamsim::protocol {

inline constexpr std::size_t kMaxFrameBytes = 1u << 20;

/// Malformed or schema-invalid frame. `offset` is the byte position of the
/// problem in the stream the frame came from.
struct DecodeError : std::runtime_error {
    DecodeError(const std::string& what, std::size_t offset) : std::runtime_error(what), offset(offset) {}
    std::size_t offset;
};

struct UnknownMessageType : DecodeError {
    using DecodeError::DecodeError;
};

struct FrameTooLarge : std::runtime_error {
    FrameTooLarge(const std::string& what, std::size_t size) : std::runtime_error(what), size(size) {}
    std::size_t size;
};

/// One JSON object plus a trailing '\n'. Throws FrameTooLarge past the cap and
/// std::invalid_argument for non-finite numbers.
std::string encode(const Envelope& env);

/// Decodes one frame (trailing newline optional). Unknown keys are ignored.
/// `stream_offset` is added to reported error offsets.
Envelope decode(std::string_view frame, std::size_t stream_offset = 0);

using DecodeResult = std::variant<Envelope, DecodeError, FrameTooLarge>;

/// Incremental splitter for a newline-delimited byte stream. A bad frame
/// yields an error result and decoding resumes at the next newline.
class FrameDecoder {
public:
    explicit FrameDecoder(std::size_t max_frame = kMaxFrameBytes) : max_frame_(max_frame) {}

    /// `raw`, if given, receives each result's frame text (empty for oversize frames).
    std::vector<DecodeResult> feed(std::string_view bytes, std::vector<std::string>* raw = nullptr);
    /// End of stream: a pending partial frame is reported as truncated.
    std::vector<DecodeResult> finish();

    std::size_t consumed() const { return consumed_; }

private:
    std::size_t max_frame_;
    std::string buffer_;
    std::size_t buffer_offset_{0};  // stream offset of buffer_[0]
    std::size_t consumed_{0};
    bool discarding_{false};
};

}  // namespace teamsim::protocol
