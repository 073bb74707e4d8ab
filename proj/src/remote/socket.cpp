#include "diffuseslide/remote/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/remote/protocol.hpp"

namespace dslide::remote {
namespace {

[[noreturn]] void transport_fail(const std::string& what) {
    fail(ErrorKind::TransportError, what + ": " + std::strerror(errno));
}

// Waits for `events` on fd. False on timeout.
bool wait_for(int fd, short events, int timeout_ms) {
    pollfd p{fd, events, 0};
    for (;;) {
        const int rc = ::poll(&p, 1, timeout_ms);
        if (rc > 0) return true;
        if (rc == 0) return false;
        if (errno != EINTR) transport_fail("poll");
    }
}

}  // namespace

Endpoint parse_endpoint(const std::string& address) {
    std::string rest = address;
    if (rest.rfind("tcp://", 0) == 0) rest = rest.substr(6);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) fail(ErrorKind::InvalidArgument, "address must be host:port, got '" + address + "'");
    Endpoint ep;
    if (colon > 0) ep.host = rest.substr(0, colon);
    const std::string port = rest.substr(colon + 1);
    try {
        std::size_t used = 0;
        const int p = std::stoi(port, &used);
        if (used != port.size() || p < 0 || p > 65535) throw std::out_of_range("port");
        ep.port = static_cast<std::uint16_t>(p);
    } catch (const std::exception&) {
        fail(ErrorKind::InvalidArgument, "invalid port in address '" + address + "'");
    }
    return ep;
}

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

Socket::~Socket() { close(); }

void Socket::close() noexcept {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Socket::shutdown_write() noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

Socket Socket::connect(const Endpoint& endpoint, int timeout_ms) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(endpoint.port);
    if (const int rc = ::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        fail(ErrorKind::TransportError, "cannot resolve " + endpoint.host + ": " + ::gai_strerror(rc));
    }
    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!s.valid()) continue;
        const int flags = ::fcntl(s.fd_, F_GETFL, 0);
        ::fcntl(s.fd_, F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(s.fd_, ai->ai_addr, ai->ai_addrlen);
        if (rc != 0 && errno == EINPROGRESS) {
            if (!wait_for(s.fd_, POLLOUT, timeout_ms)) {
                last_error = "connect timed out after " + std::to_string(timeout_ms) + " ms";
                continue;
            }
            int err = 0;
            socklen_t len = sizeof(err);
            ::getsockopt(s.fd_, SOL_SOCKET, SO_ERROR, &err, &len);
            rc = err == 0 ? 0 : -1;
            errno = err;
        }
        if (rc != 0) {
            last_error = std::strerror(errno);
            continue;
        }
        ::fcntl(s.fd_, F_SETFL, flags);
        int one = 1;
        ::setsockopt(s.fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        ::freeaddrinfo(res);
        return s;
    }
    ::freeaddrinfo(res);
    fail(ErrorKind::TransportError,
         "cannot connect to " + endpoint.host + ":" + std::to_string(endpoint.port) + ": " + last_error);
}

std::pair<Socket, Socket> Socket::pair() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) transport_fail("socketpair");
    return {Socket(fds[0]), Socket(fds[1])};
}

void Socket::send_all(std::span<const std::uint8_t> bytes) {
    if (!valid()) fail(ErrorKind::TransportError, "send on closed socket");
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            transport_fail("send");
        }
        sent += static_cast<std::size_t>(n);
    }
}

bool Socket::wait_readable(int timeout_ms) {
    if (!valid()) fail(ErrorKind::TransportError, "wait on closed socket");
    return wait_for(fd_, POLLIN, timeout_ms);
}

std::size_t Socket::recv_some_exact(std::span<std::uint8_t> out, int timeout_ms) {
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    std::size_t got = 0;
    while (got < out.size()) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0 || !wait_for(fd_, POLLIN, static_cast<int>(left))) {
            fail(ErrorKind::TransportError, "receive timed out after " + std::to_string(timeout_ms) + " ms");
        }
        const ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
        if (n == 0) break;
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            transport_fail("recv");
        }
        got += static_cast<std::size_t>(n);
    }
    return got;
}

std::optional<std::vector<std::uint8_t>> Socket::recv_frame(int timeout_ms) {
    if (!valid()) fail(ErrorKind::TransportError, "receive on closed socket");
    std::uint8_t header[4];
    const std::size_t h = recv_some_exact(header, timeout_ms);
    if (h == 0) return std::nullopt;
    if (h < 4) fail(ErrorKind::ProtocolError, "connection closed inside frame header");
    const std::uint32_t len = static_cast<std::uint32_t>(header[0]) | (static_cast<std::uint32_t>(header[1]) << 8) |
                              (static_cast<std::uint32_t>(header[2]) << 16) |
                              (static_cast<std::uint32_t>(header[3]) << 24);
    if (len == 0) fail(ErrorKind::ProtocolError, "empty frame");
    if (len > kMaxFrameBytes) fail(ErrorKind::ProtocolError, "frame length " + std::to_string(len) + " exceeds limit");
    std::vector<std::uint8_t> payload(len);
    if (recv_some_exact(payload, timeout_ms) < len) {
        fail(ErrorKind::ProtocolError, "connection closed inside frame body");
    }
    return payload;
}

Listener::Listener(const Endpoint& endpoint) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(endpoint.port);
    const char* host = endpoint.host.empty() ? nullptr : endpoint.host.c_str();
    if (const int rc = ::getaddrinfo(host, port.c_str(), &hints, &res); rc != 0) {
        fail(ErrorKind::TransportError, std::string("cannot resolve listen address: ") + ::gai_strerror(rc));
    }
    for (addrinfo* ai = res; ai && !socket_.valid(); ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!s.valid()) continue;
        int one = 1;
        ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(s.fd(), 64) != 0) continue;
        socket_ = std::move(s);
    }
    ::freeaddrinfo(res);
    if (!socket_.valid()) transport_fail("cannot listen on " + endpoint.host + ":" + port);

    sockaddr_storage addr{};
    socklen_t len = sizeof(addr);
    ::getsockname(socket_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    if (addr.ss_family == AF_INET) {
        port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    } else {
        port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    }
}

std::optional<Socket> Listener::accept(int timeout_ms) {
    if (!wait_for(socket_.fd(), POLLIN, timeout_ms)) return std::nullopt;
    const int fd = ::accept4(socket_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) return std::nullopt;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return Socket(fd);
}

}  // namespace dslide::remote
