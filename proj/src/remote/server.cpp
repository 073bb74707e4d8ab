#include "diffuseslide/remote/server.hpp"

#include <spdlog/spdlog.h>

#include <limits>
#include <string>
#include <variant>

#include "diffuseslide/errors.hpp"

namespace dslide::remote {

DenoiseServer::DenoiseServer(ServerOptions options, DenoiseHandler handler)
    : options_(std::move(options)), handler_(std::move(handler)), listener_(options_.listen) {
    acceptor_ = std::jthread([this] { accept_loop(); });
}

DenoiseServer::~DenoiseServer() { stop(); }

std::string DenoiseServer::address() const { return options_.listen.host + ":" + std::to_string(port()); }

void DenoiseServer::stop() {
    stopping_ = true;
    if (acceptor_.joinable()) acceptor_.join();
    std::list<Worker> conns;
    {
        std::lock_guard lock(mutex_);
        conns.swap(connections_);
    }
    for (auto& w : conns) {
        if (w.thread.joinable()) w.thread.join();
    }
}

void DenoiseServer::wait() {
    while (!stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(options_.idle_poll_ms));
}

void DenoiseServer::accept_loop() {
    while (!stopping_) {
        reap_finished();
        auto sock = listener_.accept(options_.idle_poll_ms);
        if (!sock) continue;
        auto done = std::make_shared<std::atomic<bool>>(false);
        std::lock_guard lock(mutex_);
        connections_.push_back(Worker{done, std::jthread([this, done, s = std::move(*sock)]() mutable {
                                          serve_connection(std::move(s));
                                          *done = true;
                                      })});
    }
}

void DenoiseServer::reap_finished() {
    std::lock_guard lock(mutex_);
    connections_.remove_if([](Worker& w) {
        if (!*w.done) return false;
        w.thread.join();
        return true;
    });
}

void DenoiseServer::reply(Socket& socket, const Message& msg) { socket.send_all(encode_frame(msg)); }

void DenoiseServer::serve_connection(Socket socket) {
    try {
        while (!stopping_) {
            if (!socket.wait_readable(options_.idle_poll_ms)) continue;
            std::optional<std::vector<std::uint8_t>> payload;
            try {
                payload = socket.recv_frame(options_.request_timeout_ms);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::ProtocolError) {
                    reply(socket, ErrorMessage{0, static_cast<std::uint16_t>(ErrorCode::BadRequest), e.what()});
                }
                return;
            }
            if (!payload) return;

            Message msg;
            try {
                msg = decode_payload(*payload);
            } catch (const Error& e) {
                reply(socket, ErrorMessage{0, static_cast<std::uint16_t>(ErrorCode::BadRequest), e.what()});
                return;
            }

            if (const auto* hello = std::get_if<HelloRequest>(&msg)) {
                if (hello->version != kProtocolVersion) {
                    reply(socket, ErrorMessage{0, static_cast<std::uint16_t>(ErrorCode::UnsupportedVersion),
                                               "unsupported protocol version " + std::to_string(hello->version)});
                    return;
                }
                reply(socket, options_.hello);
            } else if (const auto* req = std::get_if<DenoiseRequest>(&msg)) {
                Message response;
                try {
                    Tensor result = handler_(*req);
                    if (result.dims != req->window.dims) {
                        fail(ErrorKind::InvalidState, "handler changed the window shape");
                    }
                    response = DenoiseResponse{req->request_id, 0, std::move(result)};
                    ++served_;
                } catch (const Error& e) {
                    const auto code = e.kind() == ErrorKind::WindowTooLong ? ErrorCode::WindowTooLong
                                      : e.kind() == ErrorKind::InvalidArgument ? ErrorCode::BadRequest
                                                                              : ErrorCode::BackendFailure;
                    std::string text = e.what();
                    if (text.size() > 1024) text.resize(1024);
                    response = ErrorMessage{req->request_id, static_cast<std::uint16_t>(code), text};
                } catch (const std::exception& e) {
                    response = ErrorMessage{req->request_id, static_cast<std::uint16_t>(ErrorCode::BackendFailure),
                                            e.what()};
                }
                reply(socket, response);
            } else {
                reply(socket, ErrorMessage{0, static_cast<std::uint16_t>(ErrorCode::BadRequest),
                                           "unexpected message type from client"});
                return;
            }
        }
    } catch (const std::exception& e) {
        spdlog::debug("connection dropped: {}", e.what());
    }
}

std::unique_ptr<DenoiseServer> serve_denoiser(std::shared_ptr<const Denoiser> denoiser, const Endpoint& listen) {
    if (!denoiser) fail(ErrorKind::InvalidArgument, "server needs a denoiser");
    const Dims shape = denoiser->frame_shape();
    constexpr auto u16max = std::numeric_limits<std::uint16_t>::max();
    if (denoiser->capability() > u16max || shape.channels > u16max || shape.height > u16max || shape.width > u16max) {
        fail(ErrorKind::InvalidArgument, "denoiser shape does not fit the wire format");
    }
    ServerOptions opts;
    opts.listen = listen;
    opts.hello = HelloResponse{kProtocolVersion, static_cast<std::uint16_t>(denoiser->capability()),
                               static_cast<std::uint16_t>(shape.channels), static_cast<std::uint16_t>(shape.height),
                               static_cast<std::uint16_t>(shape.width)};
    auto handler = [denoiser](const DenoiseRequest& req) {
        ConditionSpec cond;
        cond.window_start = req.window_start;
        cond.offset_in_window = req.cond_offset;
        if (req.cond) cond.keyframe = to_latent(*req.cond);
        const LatentVideo window = to_latent(req.window);
        return to_tensor(euler_step(*denoiser, window, req.sigma_from, req.sigma_to, cond));
    };
    return std::make_unique<DenoiseServer>(std::move(opts), std::move(handler));
}

}  // namespace dslide::remote
