#include "osv/synthetic.hpp"

#include <array>
#include <cstdio>
#include <random>

#include "osv/errors.hpp"

namespace osv {

namespace {

// Operation vocabulary; the request opcode is the first letter, so all
// first letters are distinct.
const std::array<const char*, 16> kOpNames = {
    "Search", "Add",    "Delete", "Modify", "Bind",  "Unbind", "Compare", "Query",
    "Rename", "Touch",  "Verify", "Watch",  "Yield", "Echo",   "Fetch",   "Get"};

const std::array<const char*, 48> kSurnames = {
    "Du",       "Versteeg", "Schneider", "Han",      "Grundy",   "Hine",
    "Will",     "Hossain",  "Nguyen",    "Garcia",   "Kim",      "Patel",
    "Mueller",  "Rossi",    "Tanaka",    "Kowalski", "Silva",    "Ivanov",
    "Chen",     "Okafor",   "Svensson",  "Dubois",   "Moreau",   "Fischer",
    "Ricci",    "Novak",    "Petrov",    "Santos",   "Lindgren", "Haddad",
    "Yamamoto", "OBrien",   "MacLeod",   "Vargas",   "Kaur",     "Ahmed",
    "Larsen",   "Costa",    "Weber",     "Romano",   "Dimitrov", "Sato",
    "Eriksson", "Fernandez","Horvat",    "Jansen",   "Keller",   "Lukic"};

const std::array<const char*, 24> kGivenNames = {
    "Miao", "Steve", "Jun",   "John",  "Menka", "Aiko",  "Lena",  "Omar",
    "Ines", "Pavel", "Ravi",  "Sofia", "Tomas", "Ulla",  "Viktor","Wei",
    "Yara", "Zane",  "Anna",  "Bruno", "Carla", "Dawit", "Elif",  "Femi"};

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    // Modulo pick: biased by < 2^-50 for our pool sizes, and identical on
    // every platform, unlike std::uniform_int_distribution.
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(gen() % n); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(gen()); }
};

std::string three_digits(std::size_t v) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%03zu", v % 1000);
    return buf;
}

Interaction make_directory_interaction(Rng& rng, std::size_t ops) {
    const std::string id = three_digits(rng.pick(1000));
    const std::size_t op = rng.pick(ops);
    const std::string surname = kSurnames[rng.pick(kSurnames.size())];

    Interaction i;
    i.request = Message::from_string("{id:" + id + ",op:" +
                                     std::string(1, kOpNames[op][0]) +
                                     ",sn:" + surname + "}");
    if (op == 0) { // Search carries a payload
        const std::string given = kGivenNames[rng.pick(kGivenNames.size())];
        const std::size_t digits = 7 + rng.pick(2);
        std::string mobile;
        for (std::size_t d = 0; d < digits; ++d)
            mobile += static_cast<char>('0' + rng.pick(10));
        i.response = Message::from_string("{id:" + id + ",op:SearchRsp,result:Ok,gn:" +
                                          given + ",sn:" + surname + ",mobile:" +
                                          mobile + "}");
    } else {
        i.response = Message::from_string("{id:" + id + ",op:" +
                                          std::string(kOpNames[op]) +
                                          "Rsp,result:Ok}");
    }
    return i;
}

constexpr std::size_t kBinaryLength = 21;
constexpr std::size_t kBinaryPayloadOffset = 5;
constexpr std::size_t kBinaryPayloadWidth = 16;

std::vector<std::uint8_t> binary_message(std::uint8_t op, std::uint32_t corr,
                                         const std::string& payload) {
    std::vector<std::uint8_t> b(kBinaryLength, 0x20);
    b[0] = op;
    b[1] = static_cast<std::uint8_t>(corr >> 24);
    b[2] = static_cast<std::uint8_t>(corr >> 16);
    b[3] = static_cast<std::uint8_t>(corr >> 8);
    b[4] = static_cast<std::uint8_t>(corr);
    for (std::size_t j = 0; j < kBinaryPayloadWidth && j < payload.size(); ++j)
        b[kBinaryPayloadOffset + j] = static_cast<std::uint8_t>(payload[j]);
    return b;
}

Interaction make_binary_interaction(Rng& rng, std::size_t ops) {
    const std::uint8_t op = static_cast<std::uint8_t>(1 + rng.pick(ops));
    const std::uint32_t corr = rng.u32();
    const std::string req_payload = kSurnames[rng.pick(kSurnames.size())];
    const std::string rsp_payload = kGivenNames[rng.pick(kGivenNames.size())];

    Interaction i;
    i.request = Message(binary_message(op, corr, req_payload));
    i.response = Message(binary_message(static_cast<std::uint8_t>(op + 0x80), corr,
                                        rsp_payload));
    return i;
}

} // namespace

const char* to_string(ProtocolKind k) {
    switch (k) {
    case ProtocolKind::directory_text: return "directory";
    case ProtocolKind::fixed_width_binary: return "fixed";
    }
    return "?";
}

ProtocolKind protocol_kind_from_string(const std::string& name) {
    if (name == "directory" || name == "directory_text")
        return ProtocolKind::directory_text;
    if (name == "fixed" || name == "fixed_width_binary")
        return ProtocolKind::fixed_width_binary;
    throw ConfigError("unknown protocol kind: " + name);
}

void SyntheticProtocolSpec::validate() const {
    if (n_interactions == 0)
        throw ConfigError("n_interactions must be > 0");
    if (n_operation_types < 2)
        throw ConfigError("n_operation_types must be >= 2");
    const std::size_t cap =
        kind == ProtocolKind::directory_text ? kOpNames.size() : 100;
    if (n_operation_types > cap)
        throw ConfigError("n_operation_types must be <= " + std::to_string(cap) +
                          " for " + to_string(kind));
}

InteractionLibrary generate_synthetic(const SyntheticProtocolSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    InteractionLibrary lib;
    lib.interactions.reserve(spec.n_interactions);
    for (std::size_t n = 0; n < spec.n_interactions; ++n) {
        lib.interactions.push_back(
            spec.kind == ProtocolKind::directory_text
                ? make_directory_interaction(rng, spec.n_operation_types)
                : make_binary_interaction(rng, spec.n_operation_types));
    }
    return lib;
}

namespace {

bool is_key_char(std::uint8_t c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_value_char(std::uint8_t c) {
    return c >= 0x20 && c <= 0x7e && c != '{' && c != '}' && c != ',' && c != ':';
}

ParsedMessage decode_directory(const Message& msg) {
    const auto& b = msg.bytes;
    std::size_t pos = 0;
    auto fail = [&](const std::string& what) -> ParseError {
        return ParseError("directory message: " + what + " at offset " +
                          std::to_string(pos), pos);
    };
    if (b.empty()) throw fail("empty message");
    if (b[pos] != '{') throw fail("expected '{'");
    ++pos;

    ParsedMessage out;
    for (;;) {
        std::string key;
        while (pos < b.size() && is_key_char(b[pos]))
            key += static_cast<char>(b[pos++]);
        if (key.empty()) throw fail("expected field name");
        if (pos >= b.size() || b[pos] != ':') throw fail("expected ':'");
        ++pos;
        std::string value;
        while (pos < b.size() && is_value_char(b[pos]))
            value += static_cast<char>(b[pos++]);
        if (value.empty()) throw fail("expected field value");
        out.fields.emplace_back(std::move(key), std::move(value));
        if (pos >= b.size()) throw fail("unterminated message");
        if (b[pos] == ',') {
            ++pos;
            continue;
        }
        if (b[pos] == '}') {
            ++pos;
            break;
        }
        throw fail("expected ',' or '}'");
    }
    if (pos != b.size()) throw fail("trailing bytes after '}'");
    for (const auto& [key, value] : out.fields)
        if (key == "op") {
            out.op_type = value;
            return out;
        }
    throw fail("missing op field");
}

ParsedMessage decode_binary(const Message& msg) {
    if (msg.size() != kBinaryLength)
        throw ParseError("fixed-width message must be exactly " +
                             std::to_string(kBinaryLength) + " bytes, got " +
                             std::to_string(msg.size()),
                         msg.size());
    char op[8];
    std::snprintf(op, sizeof(op), "0x%02x", msg.bytes[0]);
    std::uint32_t corr = 0;
    for (std::size_t j = 1; j <= 4; ++j)
        corr = (corr << 8) | msg.bytes[j];
    std::string payload(msg.bytes.begin() + kBinaryPayloadOffset, msg.bytes.end());
    while (!payload.empty() && payload.back() == ' ')
        payload.pop_back();

    ParsedMessage out;
    out.op_type = op;
    out.fields.emplace_back("id", std::to_string(corr));
    out.fields.emplace_back("payload", std::move(payload));
    return out;
}

} // namespace

ParsedMessage decode(const Message& msg, ProtocolKind kind) {
    return kind == ProtocolKind::directory_text ? decode_directory(msg)
                                                : decode_binary(msg);
}

bool classify_response(const Message& emulated, const Message& expected,
                       ProtocolKind kind) {
    ParsedMessage want;
    try {
        want = decode(expected, kind);
    } catch (const ParseError& e) {
        throw ValidationError(std::string("expected response does not decode: ") +
                              e.what());
    }
    try {
        return decode(emulated, kind).op_type == want.op_type;
    } catch (const ParseError&) {
        return false;
    }
}

} // namespace osv
