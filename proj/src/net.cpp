#include "osv/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <optional>

#include "osv/errors.hpp"
#include "osv/library_io.hpp"

namespace osv {

namespace net {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw IoError(what + ": " + std::strerror(errno));
}

struct AddrInfo {
    addrinfo* res = nullptr;
    ~AddrInfo() {
        if (res) ::freeaddrinfo(res);
    }
};

} // namespace

int tcp_listen(const std::string& host, std::uint16_t port, int backlog) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    AddrInfo ai;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &ai.res); rc != 0)
        throw IoError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    for (addrinfo* p = ai.res; p; p = p->ai_next) {
        const int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
        if (fd < 0) continue;
        const int yes = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        if (::bind(fd, p->ai_addr, p->ai_addrlen) == 0 && ::listen(fd, backlog) == 0)
            return fd;
        ::close(fd);
    }
    throw IoError("cannot listen on " + host + ":" + service);
}

int tcp_connect(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    AddrInfo ai;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &ai.res); rc != 0)
        throw IoError("cannot resolve " + host + ": " + ::gai_strerror(rc));
    for (addrinfo* p = ai.res; p; p = p->ai_next) {
        const int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0)
            return fd;
        ::close(fd);
    }
    throw IoError("cannot connect to " + host + ":" + service);
}

std::uint16_t local_port(int fd) {
    sockaddr_storage ss{};
    socklen_t len = sizeof(ss);
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&ss), &len) != 0)
        throw_errno("getsockname");
    if (ss.ss_family == AF_INET)
        return ntohs(reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
    return ntohs(reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port);
}

void send_all(int fd, std::span<const std::uint8_t> data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n =
            ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("send");
        }
        sent += static_cast<std::size_t>(n);
    }
}

long recv_some(int fd, std::uint8_t* buf, std::size_t cap, int timeout_ms) {
    pollfd pfd{fd, POLLIN, 0};
    for (;;) {
        const int rc = ::poll(&pfd, 1, timeout_ms);
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw_errno("poll");
        }
        if (rc == 0) return -1; // timeout
        break;
    }
    for (;;) {
        const ssize_t n = ::recv(fd, buf, cap, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("recv");
        }
        return static_cast<long>(n);
    }
}

void shutdown_write(int fd) {
    ::shutdown(fd, SHUT_WR);
}

void close_fd(int fd) {
    if (fd >= 0) ::close(fd);
}

} // namespace net

// ---------------------------------------------------------------------------
// TcpServer

TcpServer::TcpServer(std::string host, std::uint16_t port)
    : host_(std::move(host)), port_(port) {}

TcpServer::~TcpServer() {
    stop();
}

void TcpServer::start() {
    if (started_.exchange(true))
        throw ConfigError("server already started");
    listen_fd_ = net::tcp_listen(host_, port_);
    port_ = net::local_port(listen_fd_);
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void TcpServer::stop() {
    if (!started_.load() || stopping_.exchange(true)) {
        if (accept_thread_.joinable()) accept_thread_.join();
        return;
    }
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    {
        std::lock_guard lock(mutex_);
        for (int fd : active_fds_)
            ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(mutex_);
        workers.swap(workers_);
    }
    for (auto& t : workers)
        if (t.joinable()) t.join();
}

std::optional<std::string> TcpServer::fatal_error() const {
    std::lock_guard lock(mutex_);
    return fatal_;
}

void TcpServer::fail(const std::string& reason) {
    {
        std::lock_guard lock(mutex_);
        if (!fatal_) fatal_ = reason;
    }
    std::fprintf(stderr, "server error: %s\n", reason.c_str());
    stopping_.store(true);
    if (listen_fd_ >= 0)
        ::shutdown(listen_fd_, SHUT_RDWR); // unblocks accept()
}

void TcpServer::accept_loop() {
    while (!stopping_.load()) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            break; // listener closed
        }
        if (stopping_.load()) {
            ::close(fd);
            break;
        }
        std::lock_guard lock(mutex_);
        active_fds_.push_back(fd);
        workers_.emplace_back([this, fd] {
            try {
                handle(fd);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "connection error: %s\n", e.what());
            }
            ::close(fd);
            std::lock_guard inner(mutex_);
            std::erase(active_fds_, fd);
        });
    }
}

// ---------------------------------------------------------------------------
// RecordProxy

RecordProxy::RecordProxy(std::string listen_host, std::uint16_t listen_port,
                         std::string upstream_host, std::uint16_t upstream_port,
                         FramingSpec framing, std::string out_path)
    : TcpServer(std::move(listen_host), listen_port),
      upstream_host_(std::move(upstream_host)),
      upstream_port_(upstream_port),
      framing_(std::move(framing)),
      out_path_(std::move(out_path)) {
    framing_.validate();
    sink_.open(out_path_, std::ios::binary | std::ios::app);
    if (!sink_)
        throw IoError("cannot open capture file for append: " + out_path_);
}

void RecordProxy::append_record(const Interaction& rec) {
    rec.validate();
    std::lock_guard lock(sink_mutex_);
    sink_ << encode_record(rec) << '\n';
    sink_.flush();
    if (!sink_)
        throw IoError("capture write failed: " + out_path_);
    records_.fetch_add(1);
}

void RecordProxy::handle(int client_fd) {
    int up_fd = -1;
    try {
        up_fd = net::tcp_connect(upstream_host_, upstream_port_);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "session error: %s\n", e.what());
        return;
    }

    FrameDecoder req_dec(framing_);
    FrameDecoder rsp_dec(framing_);
    std::optional<Message> pending;
    std::vector<std::uint8_t> rsp_accum;
    bool have_rsp = false;
    std::chrono::steady_clock::time_point deadline{};
    bool client_open = true;
    bool upstream_open = true;

    auto flush_pending = [&] {
        if (!pending) return;
        Interaction rec;
        rec.request = std::move(*pending);
        rec.response = Message(std::move(rsp_accum));
        rec.no_response = !have_rsp;
        pending.reset();
        rsp_accum = {};
        have_rsp = false;
        append_record(rec);
    };
    auto on_request = [&](Message&& m) {
        flush_pending();
        if (m.empty())
            throw FramingError("captured an empty request frame");
        pending = std::move(m);
        deadline = std::chrono::steady_clock::now() +
                   std::chrono::milliseconds(framing_.response_timeout_ms);
    };
    auto on_response = [&](Message&& m) {
        if (!pending) return; // late reply, forwarded but not recorded
        rsp_accum.insert(rsp_accum.end(), m.bytes.begin(), m.bytes.end());
        have_rsp = true;
    };

    std::uint8_t buf[16384];
    try {
        while ((client_open || upstream_open || pending) && !stopping()) {
            if (pending && std::chrono::steady_clock::now() >= deadline) {
                flush_pending();
                continue;
            }
            int wait_ms = 200;
            if (pending) {
                const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                                      deadline - std::chrono::steady_clock::now())
                                      .count();
                wait_ms = static_cast<int>(std::max<long long>(
                    0, std::min<long long>(left, wait_ms)));
            } else if (!client_open && !upstream_open) {
                break;
            }

            pollfd fds[2];
            nfds_t nfds = 0;
            int client_slot = -1;
            int upstream_slot = -1;
            if (client_open) {
                client_slot = static_cast<int>(nfds);
                fds[nfds++] = {client_fd, POLLIN, 0};
            }
            if (upstream_open) {
                upstream_slot = static_cast<int>(nfds);
                fds[nfds++] = {up_fd, POLLIN, 0};
            }
            if (nfds == 0) {
                // Only the pending-record deadline is left to wait out.
                std::this_thread::sleep_for(std::chrono::milliseconds(wait_ms));
                continue;
            }
            const int rc = ::poll(fds, nfds, wait_ms);
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw IoError(std::string("poll: ") + std::strerror(errno));
            }
            if (rc == 0) continue;

            if (client_slot >= 0 && (fds[client_slot].revents & (POLLIN | POLLHUP | POLLERR))) {
                const ssize_t n = ::recv(client_fd, buf, sizeof(buf), 0);
                if (n < 0) {
                    if (errno != EINTR)
                        throw IoError(std::string("recv: ") + std::strerror(errno));
                } else if (n == 0) {
                    client_open = false;
                    if (upstream_open) net::shutdown_write(up_fd);
                    for (auto& m : req_dec.finish())
                        on_request(std::move(m));
                } else {
                    if (upstream_open)
                        net::send_all(up_fd, std::span(buf, static_cast<std::size_t>(n)));
                    for (auto& m : req_dec.feed(std::span(buf, static_cast<std::size_t>(n))))
                        on_request(std::move(m));
                }
            }
            if (upstream_slot >= 0 && (fds[upstream_slot].revents & (POLLIN | POLLHUP | POLLERR))) {
                const ssize_t n = ::recv(up_fd, buf, sizeof(buf), 0);
                if (n < 0) {
                    if (errno != EINTR)
                        throw IoError(std::string("recv: ") + std::strerror(errno));
                } else if (n == 0) {
                    upstream_open = false;
                    net::shutdown_write(client_fd);
                    for (auto& m : rsp_dec.finish())
                        on_response(std::move(m));
                    flush_pending(); // upstream is gone; nothing more can arrive
                } else {
                    net::send_all(client_fd, std::span(buf, static_cast<std::size_t>(n)));
                    for (auto& m : rsp_dec.feed(std::span(buf, static_cast<std::size_t>(n))))
                        on_response(std::move(m));
                }
            }
        }
        flush_pending();
    } catch (const FramingError& e) {
        std::fprintf(stderr, "session framing error: %s\n", e.what());
    } catch (const IoError& e) {
        // A capture-sink failure must stop the whole proxy; wire errors
        // only end this session.
        if (std::string(e.what()).find("capture write failed") != std::string::npos)
            fail(e.what());
        else
            std::fprintf(stderr, "session error: %s\n", e.what());
    }
    net::close_fd(up_fd);
}

// ---------------------------------------------------------------------------
// EmulatorServer

EmulatorServer::EmulatorServer(std::string listen_host, std::uint16_t listen_port,
                               InteractionLibrary lib, MatcherConfig cfg,
                               FramingSpec framing)
    : TcpServer(std::move(listen_host), listen_port),
      lib_(std::move(lib)),
      cfg_(std::move(cfg)),
      framing_(std::move(framing)) {
    framing_.validate();
    if (lib_.empty())
        throw ValidationError("emulator requires a non-empty library");
    if (const auto warning = cfg_.check(lib_))
        std::fprintf(stderr, "warning: %s\n", warning->c_str());
}

void EmulatorServer::handle(int client_fd) {
    FrameDecoder dec(framing_);
    std::uint8_t buf[16384];

    auto answer = [&](const Message& request) {
        const MatchResult r = select_response(lib_, request, cfg_);
        if (r.report.matched() && !r.no_response && !r.response.empty())
            net::send_all(client_fd, frame_encode(r.response, framing_));
        // no-response records and hash misses stay silent
    };

    try {
        for (;;) {
            if (stopping()) return;
            const long n = net::recv_some(client_fd, buf, sizeof(buf), 200);
            if (n < 0) continue; // timeout slice; re-check stopping
            if (n == 0) {
                for (const auto& m : dec.finish())
                    answer(m);
                return;
            }
            for (const auto& m : dec.feed(std::span(buf, static_cast<std::size_t>(n))))
                answer(m);
        }
    } catch (const FramingError& e) {
        std::fprintf(stderr, "connection framing error: %s\n", e.what());
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "connection dropped: %s\n", e.what());
    }
}

} // namespace osv
