#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "osv/errors.hpp"

namespace osv {

// A wire message: a finite sequence of octets. Equality is exact
// byte-for-byte equality. The empty message is representable; it is only
// ever stored as the response of a no-response interaction.
struct Message {
    std::vector<std::uint8_t> bytes;

    Message() = default;
    explicit Message(std::vector<std::uint8_t> b) : bytes(std::move(b)) {}

    static Message from_string(std::string_view s) {
        return Message(std::vector<std::uint8_t>(s.begin(), s.end()));
    }

    std::size_t size() const { return bytes.size(); }
    bool empty() const { return bytes.empty(); }
    std::uint8_t at1(std::size_t i) const { return bytes[i - 1]; } // 1-based

    std::string str() const { return std::string(bytes.begin(), bytes.end()); }

    bool operator==(const Message&) const = default;
};

// One recorded exchange. A request that elicited no reply within the
// capture timeout is stored with no_response=true and an empty response.
struct Interaction {
    Message request;
    Message response;
    bool no_response = false;

    // Throws ValidationError if the invariants do not hold. `where` is
    // prepended to the error text (e.g. "line 7: ").
    void validate(const std::string& where = "") const;

    bool operator==(const Interaction&) const = default;
};

// Ordered list of interactions; the matcher's search space. Indices are
// 1-based and stable: appending never renumbers existing entries.
// Immutable after load; safe for unrestricted concurrent reads.
struct InteractionLibrary {
    std::vector<Interaction> interactions;

    std::size_t size() const { return interactions.size(); }
    bool empty() const { return interactions.empty(); }

    const Interaction& at1(std::size_t index) const {
        if (index < 1 || index > interactions.size())
            throw ValidationError("library index " + std::to_string(index) +
                                  " out of range 1.." +
                                  std::to_string(interactions.size()));
        return interactions[index - 1];
    }

    // Returns a new library with `i` appended at index size()+1.
    InteractionLibrary append(Interaction i) const;

    bool operator==(const InteractionLibrary&) const = default;
};

inline void Interaction::validate(const std::string& where) const {
    if (request.empty())
        throw ValidationError(where + "interaction request must be non-empty");
    if (no_response && !response.empty())
        throw ValidationError(where +
                              "no-response interaction must have an empty response");
    if (!no_response && response.empty())
        throw ValidationError(where +
                              "interaction response must be non-empty unless no_response is set");
}

inline InteractionLibrary InteractionLibrary::append(Interaction i) const {
    i.validate();
    InteractionLibrary out = *this;
    out.interactions.push_back(std::move(i));
    return out;
}

} // namespace osv
