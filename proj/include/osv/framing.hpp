#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "osv/message.hpp"

namespace osv {

enum class FramingMode { connection_per_message, length_prefixed, delimited };

const char* to_string(FramingMode m);
FramingMode framing_mode_from_string(const std::string& name);

struct FramingSpec {
    FramingMode mode = FramingMode::length_prefixed;
    std::vector<std::uint8_t> delimiter; // delimited mode only
    std::size_t max_message_bytes = 1 << 20;
    int response_timeout_ms = 1000;

    void validate() const;
};

// Encodes one message for the wire. length_prefixed: 4-byte big-endian
// unsigned length, then the payload. delimited: payload then delimiter;
// the payload must not contain the delimiter. connection_per_message:
// the payload as-is (the connection close marks the end).
std::vector<std::uint8_t> frame_encode(const Message& m, const FramingSpec& f);

// Incremental decoder for a live byte stream. feed() returns the messages
// completed by the new bytes; finish() flushes end-of-stream (in
// connection_per_message mode this is what yields the message). Both
// throw FramingError on truncated or oversized frames.
class FrameDecoder {
public:
    explicit FrameDecoder(FramingSpec f);

    std::vector<Message> feed(std::span<const std::uint8_t> data);
    std::vector<Message> finish();

private:
    std::vector<Message> drain();

    FramingSpec spec_;
    std::vector<std::uint8_t> buffer_;
    bool finished_ = false;
};

// Splits a complete stream into messages: feed + finish in one call.
std::vector<Message> frame_split(std::span<const std::uint8_t> stream,
                                 const FramingSpec& f);

} // namespace osv
