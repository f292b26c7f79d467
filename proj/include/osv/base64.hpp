#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace osv::base64 {

// Standard alphabet, always padded with '='.
std::string encode(const std::vector<std::uint8_t>& data);

// Strict decoder: rejects characters outside the alphabet, bad padding
// and lengths that are not a multiple of four. Throws osv::LoadError.
std::vector<std::uint8_t> decode(std::string_view text);

} // namespace osv::base64
