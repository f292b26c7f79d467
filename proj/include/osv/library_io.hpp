#pragma once

#include <iosfwd>
#include <string>

#include "osv/message.hpp"

namespace osv {

// Interaction-library file format: one JSON object per line, fields
//   "request"     base64 (standard, padded) of the raw request octets
//   "response"    base64 of the raw response octets ("" only with no_response)
//   "no_response" bool, optional, default false
// Lines are separated by a single 0x0A. Unknown fields are ignored on load
// and never emitted on save.

// Canonical one-line encoding of a single interaction, without the newline.
std::string encode_record(const Interaction& i);

// Parses one line. `line_no` is used in error messages (1-based).
Interaction decode_record(const std::string& line, std::size_t line_no);

InteractionLibrary library_load(std::istream& in);
InteractionLibrary library_load_file(const std::string& path);

void library_save(const InteractionLibrary& lib, std::ostream& out);
void library_save_file(const InteractionLibrary& lib, const std::string& path);

// Canonical serialized bytes of the library, as library_save would write.
std::string library_canonical_bytes(const InteractionLibrary& lib);

// FNV-1a 64-bit digest of the canonical serialization, as lowercase hex.
// Used to tie a weights file to the library it was derived from.
std::string library_fingerprint(const InteractionLibrary& lib);

} // namespace osv
