#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "diffuseslide/denoiser.hpp"
#include "diffuseslide/remote/protocol.hpp"
#include "diffuseslide/remote/socket.hpp"

namespace dslide::remote {

struct ClientOptions {
    int timeout_ms = 5000;
    std::size_t pool = 1;
};

/// One handshaken connection; at most one request in flight.
class Connection {
public:
    // Performs the HELLO exchange. Version mismatch raises protocol-error.
    static Connection open(const Endpoint& endpoint, int timeout_ms);
    // Wraps an already-connected socket whose peer has advertised `hello`.
    Connection(Socket socket, HelloResponse hello, int timeout_ms);

    const HelloResponse& hello() const noexcept { return hello_; }
    bool healthy() const noexcept { return socket_.valid(); }

    // Sends the request and waits for the matching response. Any protocol
    // violation closes the connection before the error propagates.
    Tensor denoise(const DenoiseRequest& request);

private:
    Tensor receive_result(const DenoiseRequest& request);

    Socket socket_;
    HelloResponse hello_;
    int timeout_ms_;
};

/// Denoiser served by a remote process over the wire protocol. Concurrent
/// step() calls are spread over a fixed pool of connections.
class RemoteDenoiser final : public Denoiser {
public:
    static std::unique_ptr<RemoteDenoiser> connect(const std::string& address, const ClientOptions& options = {});

    std::size_t capability() const override { return hello_.max_window_frames; }
    Dims frame_shape() const override { return Dims{hello_.channels, 1, hello_.height, hello_.width}; }
    DenoiserKind kind() const override { return DenoiserKind::Remote; }
    LatentVideo step(const LatentVideo& window, double sigma_from, double sigma_to,
                     const ConditionSpec& cond) const override;

    std::size_t pool_size() const noexcept { return pool_.size(); }

private:
    RemoteDenoiser(Endpoint endpoint, ClientOptions options, std::vector<std::unique_ptr<Connection>> pool);

    std::unique_ptr<Connection> acquire() const;
    void release(std::unique_ptr<Connection> conn) const;

    Endpoint endpoint_;
    ClientOptions options_;
    HelloResponse hello_;
    mutable std::mutex mutex_;
    mutable std::condition_variable available_;
    mutable std::vector<std::unique_ptr<Connection>> pool_;
    mutable std::atomic<std::uint64_t> next_request_id_{1};
};

DenoiseRequest make_request(std::uint64_t request_id, const LatentVideo& window, double sigma_from, double sigma_to,
                            const ConditionSpec& cond);

}  // namespace dslide::remote
