#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "osv/message.hpp"

namespace osv {

enum class ProtocolKind { directory_text, fixed_width_binary };

const char* to_string(ProtocolKind k);
ProtocolKind protocol_kind_from_string(const std::string& name);

// Desk-scale stand-ins for recorded enterprise traces: a delimited text
// directory protocol and a fixed-width binary protocol.
struct SyntheticProtocolSpec {
    ProtocolKind kind = ProtocolKind::directory_text;
    std::size_t n_interactions = 100;
    std::size_t n_operation_types = 2;
    std::uint64_t seed = 1;

    void validate() const;
};

// Deterministic under (kind, n, ops, seed): the same spec always yields a
// byte-identical library.
//
// directory_text requests: `{id:` 3 digits `,op:` opcode letter `,sn:` name `}`.
// Search responses carry gn/sn/mobile payload fields; every other
// operation answers `{id:NNN,op:<Name>Rsp,result:Ok}`.
//
// fixed_width_binary layout: byte 0 = op code (0x01-based); bytes 1-4 =
// big-endian correlation id; bytes 5-20 = space-padded payload field.
// Responses mirror the request with op code + 0x80.
InteractionLibrary generate_synthetic(const SyntheticProtocolSpec& spec);

struct ParsedMessage {
    std::string op_type;
    std::vector<std::pair<std::string, std::string>> fields;
};

// Structural decoder used by the evaluation classifier. Throws ParseError
// (with the failing byte offset) when the message does not conform.
ParsedMessage decode(const Message& msg, ProtocolKind kind);

// A response is valid iff it decodes and its operation type equals the
// expected response's operation type; payload content is free to differ.
// The expected response must decode (ValidationError otherwise). An empty
// emulated message (hash miss, no-response record) is invalid.
bool classify_response(const Message& emulated, const Message& expected,
                       ProtocolKind kind);

} // namespace osv
