#include "osv/framing.hpp"

#include <algorithm>

#include "osv/errors.hpp"

namespace osv {

const char* to_string(FramingMode m) {
    switch (m) {
    case FramingMode::connection_per_message: return "conn";
    case FramingMode::length_prefixed: return "len";
    case FramingMode::delimited: return "delim";
    }
    return "?";
}

FramingMode framing_mode_from_string(const std::string& name) {
    if (name == "conn" || name == "connection_per_message")
        return FramingMode::connection_per_message;
    if (name == "len" || name == "length_prefixed")
        return FramingMode::length_prefixed;
    if (name == "delim" || name == "delimited")
        return FramingMode::delimited;
    throw ConfigError("unknown framing mode: " + name);
}

void FramingSpec::validate() const {
    if (mode == FramingMode::delimited && delimiter.empty())
        throw ConfigError("delimited framing requires a non-empty delimiter");
    if (max_message_bytes == 0)
        throw ConfigError("max_message_bytes must be > 0");
    if (response_timeout_ms <= 0)
        throw ConfigError("response_timeout_ms must be > 0");
}

std::vector<std::uint8_t> frame_encode(const Message& m, const FramingSpec& f) {
    f.validate();
    if (m.size() > f.max_message_bytes)
        throw FramingError("message of " + std::to_string(m.size()) +
                           " bytes exceeds max_message_bytes " +
                           std::to_string(f.max_message_bytes));
    std::vector<std::uint8_t> out;
    switch (f.mode) {
    case FramingMode::connection_per_message:
        out = m.bytes;
        break;
    case FramingMode::length_prefixed: {
        const std::uint32_t n = static_cast<std::uint32_t>(m.size());
        out.reserve(4 + m.size());
        out.push_back(static_cast<std::uint8_t>(n >> 24));
        out.push_back(static_cast<std::uint8_t>(n >> 16));
        out.push_back(static_cast<std::uint8_t>(n >> 8));
        out.push_back(static_cast<std::uint8_t>(n));
        out.insert(out.end(), m.bytes.begin(), m.bytes.end());
        break;
    }
    case FramingMode::delimited: {
        const auto hit = std::search(m.bytes.begin(), m.bytes.end(),
                                     f.delimiter.begin(), f.delimiter.end());
        if (hit != m.bytes.end())
            throw FramingError("message contains the frame delimiter");
        out.reserve(m.size() + f.delimiter.size());
        out = m.bytes;
        out.insert(out.end(), f.delimiter.begin(), f.delimiter.end());
        break;
    }
    }
    return out;
}

FrameDecoder::FrameDecoder(FramingSpec f) : spec_(std::move(f)) {
    spec_.validate();
}

std::vector<Message> FrameDecoder::feed(std::span<const std::uint8_t> data) {
    if (finished_)
        throw FramingError("decoder already finished");
    buffer_.insert(buffer_.end(), data.begin(), data.end());
    return drain();
}

std::vector<Message> FrameDecoder::drain() {
    std::vector<Message> out;
    switch (spec_.mode) {
    case FramingMode::connection_per_message:
        if (buffer_.size() > spec_.max_message_bytes)
            throw FramingError("message exceeds max_message_bytes");
        break; // completed only by end-of-stream
    case FramingMode::length_prefixed:
        while (buffer_.size() >= 4) {
            const std::size_t n = (static_cast<std::size_t>(buffer_[0]) << 24) |
                                  (static_cast<std::size_t>(buffer_[1]) << 16) |
                                  (static_cast<std::size_t>(buffer_[2]) << 8) |
                                  static_cast<std::size_t>(buffer_[3]);
            if (n > spec_.max_message_bytes)
                throw FramingError("declared length " + std::to_string(n) +
                                   " exceeds max_message_bytes");
            if (buffer_.size() < 4 + n)
                break;
            out.emplace_back(std::vector<std::uint8_t>(buffer_.begin() + 4,
                                                       buffer_.begin() + 4 + n));
            buffer_.erase(buffer_.begin(), buffer_.begin() + 4 + n);
        }
        break;
    case FramingMode::delimited: {
        const auto& d = spec_.delimiter;
        for (;;) {
            const auto hit = std::search(buffer_.begin(), buffer_.end(),
                                         d.begin(), d.end());
            if (hit == buffer_.end()) {
                // A partial delimiter can hide at most d.size()-1 tail bytes.
                if (buffer_.size() > spec_.max_message_bytes + d.size() - 1)
                    throw FramingError("message exceeds max_message_bytes");
                break;
            }
            const std::size_t n = static_cast<std::size_t>(hit - buffer_.begin());
            if (n > spec_.max_message_bytes)
                throw FramingError("message exceeds max_message_bytes");
            out.emplace_back(std::vector<std::uint8_t>(buffer_.begin(), hit));
            buffer_.erase(buffer_.begin(), hit + static_cast<std::ptrdiff_t>(d.size()));
        }
        break;
    }
    }
    return out;
}

std::vector<Message> FrameDecoder::finish() {
    if (finished_)
        throw FramingError("decoder already finished");
    finished_ = true;
    std::vector<Message> out;
    switch (spec_.mode) {
    case FramingMode::connection_per_message:
        if (!buffer_.empty()) {
            out.emplace_back(std::move(buffer_));
            buffer_.clear();
        }
        break;
    case FramingMode::length_prefixed:
    case FramingMode::delimited:
        if (!buffer_.empty())
            throw FramingError("stream truncated mid-message (" +
                               std::to_string(buffer_.size()) +
                               " undecoded bytes at end of stream)");
        break;
    }
    return out;
}

std::vector<Message> frame_split(std::span<const std::uint8_t> stream,
                                 const FramingSpec& f) {
    FrameDecoder dec(f);
    std::vector<Message> out = dec.feed(stream);
    std::vector<Message> tail = dec.finish();
    out.insert(out.end(), std::make_move_iterator(tail.begin()),
               std::make_move_iterator(tail.end()));
    return out;
}

} // namespace osv
