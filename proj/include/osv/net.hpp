#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "osv/framing.hpp"
#include "osv/matcher.hpp"
#include "osv/message.hpp"

namespace osv {

namespace net {

// Thin POSIX socket helpers, also used by the socket tests.
int tcp_listen(const std::string& host, std::uint16_t port, int backlog = 16);
int tcp_connect(const std::string& host, std::uint16_t port);
std::uint16_t local_port(int fd);
void send_all(int fd, std::span<const std::uint8_t> data);
// Waits up to timeout_ms (-1 blocks): bytes read, 0 on EOF, -1 on timeout.
long recv_some(int fd, std::uint8_t* buf, std::size_t cap, int timeout_ms);
void shutdown_write(int fd);
void close_fd(int fd);

} // namespace net

// Accept loop plus one thread per connection. stop() is idempotent and
// unblocks every open connection.
class TcpServer {
public:
    virtual ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    void start();
    void stop();
    std::uint16_t port() const { return port_; }
    // Set when the server shut itself down (e.g. sink write failure).
    std::optional<std::string> fatal_error() const;

protected:
    TcpServer(std::string host, std::uint16_t port);
    virtual void handle(int client_fd) = 0;
    void fail(const std::string& reason); // record error and initiate stop
    bool stopping() const { return stopping_.load(); }

private:
    void accept_loop();

    std::string host_;
    std::uint16_t port_;
    int listen_fd_ = -1;
    std::thread accept_thread_;
    std::atomic<bool> stopping_{false};
    std::atomic<bool> started_{false};

    mutable std::mutex mutex_;
    std::vector<std::thread> workers_;
    std::vector<int> active_fds_;
    std::optional<std::string> fatal_;
};

// Transparent TCP proxy that frames both directions and appends one
// library record per client request. Responses are credited to the most
// recent request on the connection; the record closes at the next request
// arrival, the response timeout, or upstream close, whichever comes
// first. A request with no response by then is recorded with
// no_response=true.
class RecordProxy : public TcpServer {
public:
    RecordProxy(std::string listen_host, std::uint16_t listen_port,
                std::string upstream_host, std::uint16_t upstream_port,
                FramingSpec framing, std::string out_path);

    std::size_t records_written() const { return records_.load(); }

protected:
    void handle(int client_fd) override;

private:
    void append_record(const Interaction& rec);

    std::string upstream_host_;
    std::uint16_t upstream_port_;
    FramingSpec framing_;
    std::string out_path_;
    std::mutex sink_mutex_;
    std::ofstream sink_;
    std::atomic<std::size_t> records_{0};
};

// Answers live requests from an immutable interaction library. No-response
// selections and hash misses put no bytes on the wire. A framing error
// closes only the offending connection.
class EmulatorServer : public TcpServer {
public:
    EmulatorServer(std::string listen_host, std::uint16_t listen_port,
                   InteractionLibrary lib, MatcherConfig cfg, FramingSpec framing);

protected:
    void handle(int client_fd) override;

private:
    InteractionLibrary lib_;
    MatcherConfig cfg_;
    FramingSpec framing_;
};

} // namespace osv
