#include "osv/library_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "osv/base64.hpp"
#include "osv/errors.hpp"

namespace osv {

std::string encode_record(const Interaction& i) {
    std::string line = "{\"request\":\"" + base64::encode(i.request.bytes) +
                       "\",\"response\":\"" + base64::encode(i.response.bytes) + "\"";
    if (i.no_response) line += ",\"no_response\":true";
    line += "}";
    return line;
}

Interaction decode_record(const std::string& line, std::size_t line_no) {
    const std::string where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(where + "invalid JSON: " + e.what());
    }
    if (!j.is_object())
        throw LoadError(where + "record must be a JSON object");
    if (!j.contains("request") || !j["request"].is_string())
        throw LoadError(where + "missing string field \"request\"");
    if (!j.contains("response") || !j["response"].is_string())
        throw LoadError(where + "missing string field \"response\"");

    Interaction i;
    try {
        i.request = Message(base64::decode(j["request"].get<std::string>()));
        i.response = Message(base64::decode(j["response"].get<std::string>()));
    } catch (const LoadError& e) {
        throw LoadError(where + e.what());
    }
    if (j.contains("no_response")) {
        if (!j["no_response"].is_boolean())
            throw LoadError(where + "field \"no_response\" must be a boolean");
        i.no_response = j["no_response"].get<bool>();
    }
    i.validate(where);
    return i;
}

InteractionLibrary library_load(std::istream& in) {
    InteractionLibrary lib;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.peek() == std::char_traits<char>::eof())
            break; // tolerate a final empty segment from a trailing newline
        lib.interactions.push_back(decode_record(line, line_no));
    }
    if (lib.empty())
        throw LoadError("library must be non-empty");
    return lib;
}

InteractionLibrary library_load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open library file: " + path);
    return library_load(in);
}

void library_save(const InteractionLibrary& lib, std::ostream& out) {
    if (lib.empty())
        throw ValidationError("cannot save an empty library");
    for (const auto& i : lib.interactions) {
        i.validate();
        out << encode_record(i) << '\n';
    }
    if (!out)
        throw IoError("library write failed");
}

void library_save_file(const InteractionLibrary& lib, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open library file for writing: " + path);
    library_save(lib, out);
    out.flush();
    if (!out)
        throw IoError("library write failed: " + path);
}

std::string library_canonical_bytes(const InteractionLibrary& lib) {
    std::ostringstream out;
    library_save(lib, out);
    return out.str();
}

std::string library_fingerprint(const InteractionLibrary& lib) {
    const std::string bytes = library_canonical_bytes(lib);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

} // namespace osv
