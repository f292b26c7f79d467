#include <doctest.h>

#include <cstdio>

#include "fixtures.hpp"
#include "net_helpers.hpp"
#include "osv/framing.hpp"
#include "osv/library_io.hpp"
#include "osv/net.hpp"

using namespace osv;
using testing::Client;
using testing::ScriptedUpstream;

namespace {

FramingSpec len_framing(int timeout_ms = 400) {
    FramingSpec f;
    f.mode = FramingMode::length_prefixed;
    f.response_timeout_ms = timeout_ms;
    return f;
}

FramingSpec conn_framing(int timeout_ms = 400) {
    FramingSpec f;
    f.mode = FramingMode::connection_per_message;
    f.response_timeout_ms = timeout_ms;
    return f;
}

} // namespace

TEST_CASE("proxy captures exchanges in arrival order") {
    const auto f = len_framing();
    ScriptedUpstream upstream(f, {{"q1", {"r1"}}, {"q2", {"r2"}}, {"q3", {"r3"}}});
    upstream.start();
    const auto path = testing::temp_path("order");
    RecordProxy proxy("127.0.0.1", 0, "127.0.0.1", upstream.port(), f, path);
    proxy.start();

    {
        Client c(proxy.port());
        for (const char* q : {"q1", "q2", "q3"}) {
            c.send(Message::from_string(q), f);
            const auto rsp = c.recv_frame(f);
            REQUIRE(rsp.has_value());
            CHECK(rsp->str() == std::string("r") + q[1]);
        }
    }
    CHECK(testing::wait_for_records(proxy, 3));
    proxy.stop();
    upstream.stop();

    const auto lib = library_load_file(path);
    REQUIRE(lib.size() == 3);
    for (std::size_t i = 1; i <= 3; ++i) {
        CHECK(lib.at1(i).request.str() == "q" + std::to_string(i));
        CHECK(lib.at1(i).response.str() == "r" + std::to_string(i));
        CHECK_FALSE(lib.at1(i).no_response);
    }
    std::remove(path.c_str());
}

TEST_CASE("multiple upstream replies are concatenated into one response") {
    const auto f = len_framing();
    ScriptedUpstream upstream(f,
                              {{"multi", {"part1|", "part2"}}, {"single", {"done"}}});
    upstream.start();
    const auto path = testing::temp_path("concat");
    RecordProxy proxy("127.0.0.1", 0, "127.0.0.1", upstream.port(), f, path);
    proxy.start();

    {
        Client c(proxy.port());
        c.send(Message::from_string("multi"), f);
        auto r1 = c.recv_frame(f);
        auto r2 = c.recv_frame(f);
        REQUIRE(r1.has_value());
        REQUIRE(r2.has_value());
        CHECK(r1->str() == "part1|");
        CHECK(r2->str() == "part2");
        c.send(Message::from_string("single"), f);
        auto r3 = c.recv_frame(f);
        REQUIRE(r3.has_value());
        CHECK(r3->str() == "done");
    }
    CHECK(testing::wait_for_records(proxy, 2));
    proxy.stop();
    upstream.stop();

    const auto lib = library_load_file(path);
    REQUIRE(lib.size() == 2);
    CHECK(lib.at1(1).request.str() == "multi");
    CHECK(lib.at1(1).response.str() == "part1|part2");
    CHECK(lib.at1(2).response.str() == "done");
    std::remove(path.c_str());
}

TEST_CASE("a silent upstream produces a no-response record after the timeout") {
    const auto f = len_framing(/*timeout_ms=*/300);
    ScriptedUpstream upstream(f, {});
    upstream.start();
    const auto path = testing::temp_path("silent");
    RecordProxy proxy("127.0.0.1", 0, "127.0.0.1", upstream.port(), f, path);
    proxy.start();

    {
        Client c(proxy.port());
        c.send(Message::from_string("anyone-there"), f);
        CHECK(c.drain(600).empty());
    }
    CHECK(testing::wait_for_records(proxy, 1));
    proxy.stop();
    upstream.stop();

    const auto lib = library_load_file(path);
    REQUIRE(lib.size() == 1);
    CHECK(lib.at1(1).request.str() == "anyone-there");
    CHECK(lib.at1(1).no_response);
    CHECK(lib.at1(1).response.empty());
    std::remove(path.c_str());
}

TEST_CASE("connection-per-message proxying records one exchange per connection") {
    const auto f = conn_framing();
    ScriptedUpstream upstream(f, {{"one-shot", {"one-reply"}}});
    upstream.start();
    const auto path = testing::temp_path("conn");
    RecordProxy proxy("127.0.0.1", 0, "127.0.0.1", upstream.port(), f, path);
    proxy.start();

    {
        Client c(proxy.port());
        c.send(Message::from_string("one-shot"), f);
        c.shutdown_write();
        const auto rsp = c.drain(1500);
        CHECK(std::string(rsp.begin(), rsp.end()) == "one-reply");
    }
    CHECK(testing::wait_for_records(proxy, 1));
    proxy.stop();
    upstream.stop();

    const auto lib = library_load_file(path);
    REQUIRE(lib.size() == 1);
    CHECK(lib.at1(1).request.str() == "one-shot");
    CHECK(lib.at1(1).response.str() == "one-reply");
    std::remove(path.c_str());
}

TEST_CASE("emulator answers from the library over the wire") {
    const auto f = len_framing();
    const auto lib = testing::table1();

    SUBCASE("hash strategy replays a recorded exchange verbatim") {
        MatcherConfig cfg;
        cfg.strategy = Strategy::hash_lookup;
        EmulatorServer server("127.0.0.1", 0, lib, cfg, f);
        server.start();
        Client c(server.port());
        c.send(Message::from_string("{id:001,op:S,sn:Du}"), f);
        const auto rsp = c.recv_frame(f);
        REQUIRE(rsp.has_value());
        CHECK(rsp->str() ==
              "{id:001,op:SearchRsp,result:Ok,gn:Miao,sn:Du,mobile:5362634}");
        server.stop();
    }

    SUBCASE("alignment strategy answers fresh requests") {
        MatcherConfig cfg;
        cfg.strategy = Strategy::nw_plain;
        EmulatorServer server("127.0.0.1", 0, lib, cfg, f);
        server.start();
        Client c(server.port());
        c.send(Message::from_string(testing::kProbeHossain), f);
        const auto rsp = c.recv_frame(f);
        REQUIRE(rsp.has_value());
        CHECK(rsp->str() ==
              "{id:275,op:SearchRsp,result:Ok,gn:Jun,sn:Han,mobile:33333333}");
        server.stop();
    }

    SUBCASE("hash miss and no-response records stay silent on the wire") {
        auto lib9 = lib.append(
            Interaction{Message::from_string("quiet-please"), Message{}, true});
        MatcherConfig cfg;
        cfg.strategy = Strategy::hash_lookup;
        EmulatorServer server("127.0.0.1", 0, lib9, cfg, f);
        server.start();
        Client c(server.port());
        c.send(Message::from_string("quiet-please"), f); // matched, no_response
        CHECK(c.drain(400).empty());
        c.send(Message::from_string("never-recorded"), f); // NO_MATCH
        CHECK(c.drain(400).empty());
        server.stop();
    }

    SUBCASE("connection-per-message round trip") {
        const auto cf = conn_framing();
        MatcherConfig cfg;
        cfg.strategy = Strategy::nw_plain;
        EmulatorServer server("127.0.0.1", 0, lib, cfg, cf);
        server.start();
        Client c(server.port());
        c.send(Message::from_string(testing::kProbeSchneider), cf);
        c.shutdown_write();
        const auto rsp = c.drain(1500);
        CHECK(std::string(rsp.begin(), rsp.end()) == "{id:024,op:AddRsp,result:Ok}");
        server.stop();
    }
}

TEST_CASE("a framing error closes only the offending connection") {
    FramingSpec f = len_framing();
    f.max_message_bytes = 64;
    MatcherConfig cfg;
    cfg.strategy = Strategy::hash_lookup;
    EmulatorServer server("127.0.0.1", 0, testing::table1(), cfg, f);
    server.start();

    {
        Client bad(server.port());
        const std::vector<std::uint8_t> huge = {0xff, 0xff, 0xff, 0xff};
        bad.send_raw(huge); // declares a 4 GiB frame
        CHECK(bad.drain(500).empty());
    }
    {
        Client good(server.port());
        good.send(Message::from_string("{id:906,op:A,sn:Hine}"), f);
        const auto rsp = good.recv_frame(f);
        REQUIRE(rsp.has_value());
        CHECK(rsp->str() == "{id:906,op:AddRsp,result:Ok}");
    }
    server.stop();
}
