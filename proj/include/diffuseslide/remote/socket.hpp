#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dslide::remote {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

// Accepts "host:port", ":port" and "tcp://host:port".
Endpoint parse_endpoint(const std::string& address);

/// Owning TCP stream socket. Failures raise transport-error; a peer that
/// closes partway through a frame raises protocol-error.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket();

    static Socket connect(const Endpoint& endpoint, int timeout_ms);
    static std::pair<Socket, Socket> pair();

    bool valid() const noexcept { return fd_ >= 0; }
    int fd() const noexcept { return fd_; }
    void close() noexcept;
    void shutdown_write() noexcept;

    void send_all(std::span<const std::uint8_t> bytes);
    // True when data (or EOF) is ready within timeout_ms.
    bool wait_readable(int timeout_ms);
    // Reads one length-prefixed frame and returns its payload. Returns
    // nullopt on a clean close before the first byte.
    std::optional<std::vector<std::uint8_t>> recv_frame(int timeout_ms);

private:
    // Returns bytes read; fewer than requested only when the peer closed.
    std::size_t recv_some_exact(std::span<std::uint8_t> out, int timeout_ms);

    int fd_ = -1;
};

/// Listening socket bound to host:port (port 0 picks an ephemeral port).
class Listener {
public:
    explicit Listener(const Endpoint& endpoint);

    std::uint16_t port() const noexcept { return port_; }
    // Waits up to timeout_ms for a connection.
    std::optional<Socket> accept(int timeout_ms);

private:
    Socket socket_;
    std::uint16_t port_ = 0;
};

}  // namespace dslide::remote
