#include <doctest.h>

#include "fixtures.hpp"
#include "osv/errors.hpp"
#include "osv/framing.hpp"

using namespace osv;

namespace {

FramingSpec len_spec(std::size_t max = 1 << 20) {
    FramingSpec f;
    f.mode = FramingMode::length_prefixed;
    f.max_message_bytes = max;
    return f;
}

FramingSpec delim_spec(std::vector<std::uint8_t> d, std::size_t max = 1 << 20) {
    FramingSpec f;
    f.mode = FramingMode::delimited;
    f.delimiter = std::move(d);
    f.max_message_bytes = max;
    return f;
}

FramingSpec conn_spec(std::size_t max = 1 << 20) {
    FramingSpec f;
    f.mode = FramingMode::connection_per_message;
    f.max_message_bytes = max;
    return f;
}

std::vector<std::uint8_t> bytes(std::initializer_list<int> vs) {
    std::vector<std::uint8_t> out;
    for (int v : vs)
        out.push_back(static_cast<std::uint8_t>(v));
    return out;
}

} // namespace

TEST_CASE("length-prefixed decoding") {
    SUBCASE("a four-byte big-endian header frames each message") {
        const auto msgs = frame_split(bytes({0, 0, 0, 2, 'a', 'b'}), len_spec());
        REQUIRE(msgs.size() == 1);
        CHECK(msgs[0].str() == "ab");
    }
    SUBCASE("back-to-back frames split cleanly") {
        const auto msgs =
            frame_split(bytes({0, 0, 0, 1, 'x', 0, 0, 0, 0, 0, 0, 0, 2, 'y', 'z'}),
                        len_spec());
        REQUIRE(msgs.size() == 3);
        CHECK(msgs[0].str() == "x");
        CHECK(msgs[1].empty());
        CHECK(msgs[2].str() == "yz");
    }
    SUBCASE("truncated payload is a framing error") {
        CHECK_THROWS_AS(frame_split(bytes({0, 0, 0, 5, 'a'}), len_spec()),
                        FramingError);
    }
    SUBCASE("truncated header is a framing error") {
        CHECK_THROWS_AS(frame_split(bytes({0, 0, 1}), len_spec()), FramingError);
    }
    SUBCASE("oversized declaration fails before the payload arrives") {
        FrameDecoder dec(len_spec(4));
        CHECK_THROWS_AS(dec.feed(bytes({0, 0, 0, 9})), FramingError);
    }
}

TEST_CASE("delimited decoding") {
    SUBCASE("terminator-separated messages, delimiter excluded") {
        const auto msgs = frame_split(bytes({'a', ';', 'b', ';'}), delim_spec({';'}));
        REQUIRE(msgs.size() == 2);
        CHECK(msgs[0].str() == "a");
        CHECK(msgs[1].str() == "b");
    }
    SUBCASE("unterminated tail is a framing error") {
        CHECK_THROWS_AS(frame_split(bytes({'a', ';', 'b'}), delim_spec({';'})),
                        FramingError);
    }
    SUBCASE("oversized message is a framing error") {
        CHECK_THROWS_AS(frame_split(bytes({'a', 'b', 'c', ';'}), delim_spec({';'}, 2)),
                        FramingError);
    }
    SUBCASE("multi-byte delimiter split across feeds") {
        FrameDecoder dec(delim_spec({'\r', '\n'}));
        auto got = dec.feed(bytes({'h', 'i', '\r'}));
        CHECK(got.empty());
        got = dec.feed(bytes({'\n', 'y', 'o', '\r', '\n'}));
        REQUIRE(got.size() == 2);
        CHECK(got[0].str() == "hi");
        CHECK(got[1].str() == "yo");
        CHECK(dec.finish().empty());
    }
}

TEST_CASE("connection-per-message decoding") {
    SUBCASE("the whole stream is one message, completed at end-of-stream") {
        FrameDecoder dec(conn_spec());
        CHECK(dec.feed(bytes({'h', 'e', 'l'})).empty());
        CHECK(dec.feed(bytes({'l', 'o'})).empty());
        const auto got = dec.finish();
        REQUIRE(got.size() == 1);
        CHECK(got[0].str() == "hello");
    }
    SUBCASE("an empty stream carries no message") {
        CHECK(frame_split({}, conn_spec()).empty());
    }
    SUBCASE("size cap still applies") {
        FrameDecoder dec(conn_spec(3));
        CHECK_THROWS_AS(dec.feed(bytes({'a', 'b', 'c', 'd'})), FramingError);
    }
}

TEST_CASE("encoding guards") {
    CHECK(frame_encode(Message::from_string("ab"), len_spec()) ==
          bytes({0, 0, 0, 2, 'a', 'b'}));
    CHECK(frame_encode(Message::from_string("ab"), delim_spec({';'})) ==
          bytes({'a', 'b', ';'}));
    CHECK(frame_encode(Message::from_string("ab"), conn_spec()) == bytes({'a', 'b'}));

    CHECK_THROWS_AS(frame_encode(Message::from_string("a;b"), delim_spec({';'})),
                    FramingError);
    CHECK_THROWS_AS(frame_encode(Message::from_string("abc"), len_spec(2)),
                    FramingError);
}

TEST_CASE("specs validate their own invariants") {
    CHECK_THROWS_AS(delim_spec({}).validate(), ConfigError);
    FramingSpec f = len_spec();
    f.max_message_bytes = 0;
    CHECK_THROWS_AS(f.validate(), ConfigError);
    f = len_spec();
    f.response_timeout_ms = 0;
    CHECK_THROWS_AS(f.validate(), ConfigError);
}

TEST_CASE("codec round trip under arbitrary chunking") {
    testing::Rand rng(47);
    const std::vector<std::uint8_t> delim = {0x00, 0xff};
    for (int iter = 0; iter < 1000; ++iter) {
        // random batch of messages, one of the two framed modes
        const bool use_len = rng.pick(2) == 0;
        const FramingSpec spec = use_len ? len_spec(64) : delim_spec(delim, 64);

        std::vector<Message> batch;
        std::vector<std::uint8_t> wire;
        const std::size_t count = 1 + rng.pick(4);
        for (std::size_t i = 0; i < count; ++i) {
            Message m = rng.message(48);
            if (!use_len) {
                // delimited payloads must not contain the delimiter
                for (std::size_t b = 0; b + 1 < m.bytes.size(); ++b)
                    if (m.bytes[b] == 0x00 && m.bytes[b + 1] == 0xff)
                        m.bytes[b] = 0x01;
            }
            const auto framed = frame_encode(m, spec);
            wire.insert(wire.end(), framed.begin(), framed.end());
            batch.push_back(std::move(m));
        }

        // whole-stream split
        CHECK(frame_split(wire, spec) == batch);

        // incremental split with random chunk boundaries
        FrameDecoder dec(spec);
        std::vector<Message> got;
        std::size_t pos = 0;
        while (pos < wire.size()) {
            const std::size_t n = 1 + rng.pick(wire.size() - pos);
            auto part = dec.feed(std::span(wire.data() + pos, n));
            got.insert(got.end(), part.begin(), part.end());
            pos += n;
        }
        auto tail = dec.finish();
        got.insert(got.end(), tail.begin(), tail.end());
        CHECK(got == batch);
    }
}
