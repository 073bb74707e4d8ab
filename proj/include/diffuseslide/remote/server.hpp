#pragma once

#include <atomic>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <thread>

#include "diffuseslide/denoiser.hpp"
#include "diffuseslide/remote/protocol.hpp"
#include "diffuseslide/remote/socket.hpp"

namespace dslide::remote {

// Produces the stepped window for one request; throw dslide::Error to report failure.
using DenoiseHandler = std::function<Tensor(const DenoiseRequest&)>;

struct ServerOptions {
    Endpoint listen{"127.0.0.1", 0};
    HelloResponse hello;
    int idle_poll_ms = 50;
    // Limit for receiving the rest of a frame once its first byte arrived.
    int request_timeout_ms = 30000;
};

/// Threaded server speaking the denoiser wire protocol: one thread per
/// connection, requests on a connection handled strictly in order. Malformed
/// frames are answered with ERROR and the connection is dropped; the
/// listener keeps running.
class DenoiseServer {
public:
    DenoiseServer(ServerOptions options, DenoiseHandler handler);
    ~DenoiseServer();
    DenoiseServer(const DenoiseServer&) = delete;
    DenoiseServer& operator=(const DenoiseServer&) = delete;

    std::uint16_t port() const noexcept { return listener_.port(); }
    std::string address() const;
    void stop();
    // Blocks until stop() is called from another thread.
    void wait();

    std::size_t requests_served() const noexcept { return served_.load(); }

private:
    void accept_loop();
    void serve_connection(Socket socket);
    void reply(Socket& socket, const Message& msg);

    ServerOptions options_;
    DenoiseHandler handler_;
    Listener listener_;
    std::atomic<bool> stopping_{false};
    std::atomic<std::size_t> served_{0};
    std::mutex mutex_;
    struct Worker {
        std::shared_ptr<std::atomic<bool>> done;
        std::jthread thread;
    };
    void reap_finished();

    std::list<Worker> connections_;
    std::jthread acceptor_;
};

// Server exposing a local denoiser (e.g. the analytic one) over the protocol.
std::unique_ptr<DenoiseServer> serve_denoiser(std::shared_ptr<const Denoiser> denoiser, const Endpoint& listen);

}  // namespace dslide::remote
