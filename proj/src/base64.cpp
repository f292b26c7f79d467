#include "osv/base64.hpp"

#include <array>

#include "osv/errors.hpp"

namespace osv::base64 {

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::array<std::int8_t, 256> make_reverse() {
    std::array<std::int8_t, 256> rev{};
    rev.fill(-1);
    for (int i = 0; i < 64; ++i)
        rev[static_cast<unsigned char>(kAlphabet[i])] = static_cast<std::int8_t>(i);
    return rev;
}

const std::array<std::int8_t, 256> kReverse = make_reverse();

} // namespace

std::string encode(const std::vector<std::uint8_t>& data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(kAlphabet[(v >> 18) & 0x3f]);
        out.push_back(kAlphabet[(v >> 12) & 0x3f]);
        out.push_back(kAlphabet[(v >> 6) & 0x3f]);
        out.push_back(kAlphabet[v & 0x3f]);
    }
    const std::size_t rest = data.size() - i;
    if (rest == 1) {
        std::uint32_t v = data[i] << 16;
        out.push_back(kAlphabet[(v >> 18) & 0x3f]);
        out.push_back(kAlphabet[(v >> 12) & 0x3f]);
        out.push_back('=');
        out.push_back('=');
    } else if (rest == 2) {
        std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(kAlphabet[(v >> 18) & 0x3f]);
        out.push_back(kAlphabet[(v >> 12) & 0x3f]);
        out.push_back(kAlphabet[(v >> 6) & 0x3f]);
        out.push_back('=');
    }
    return out;
}

std::vector<std::uint8_t> decode(std::string_view text) {
    if (text.size() % 4 != 0)
        throw LoadError("base64 length must be a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int pad = 0;
        std::uint32_t v = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=') {
                // Padding is only legal in the last two slots of the last group.
                if (i + 4 != text.size() || k < 2)
                    throw LoadError("base64 padding in illegal position");
                ++pad;
                v <<= 6;
                continue;
            }
            if (pad > 0)
                throw LoadError("base64 data after padding");
            const std::int8_t d = kReverse[static_cast<unsigned char>(c)];
            if (d < 0)
                throw LoadError(std::string("invalid base64 character '") + c + "'");
            v = (v << 6) | static_cast<std::uint32_t>(d);
        }
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    return out;
}

} // namespace osv::base64
