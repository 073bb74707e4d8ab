#include "diffuseslide/remote/client.hpp"

#include <limits>
#include <string>
#include <variant>

#include "diffuseslide/errors.hpp"

namespace dslide::remote {

Connection::Connection(Socket socket, HelloResponse hello, int timeout_ms)
    : socket_(std::move(socket)), hello_(hello), timeout_ms_(timeout_ms) {}

Connection Connection::open(const Endpoint& endpoint, int timeout_ms) {
    Socket s = Socket::connect(endpoint, timeout_ms);
    s.send_all(encode_frame(HelloRequest{kProtocolVersion}));
    auto payload = s.recv_frame(timeout_ms);
    if (!payload) fail(ErrorKind::TransportError, "server closed the connection during handshake");
    const Message msg = decode_payload(*payload);
    if (const auto* err = std::get_if<ErrorMessage>(&msg)) {
        fail(ErrorKind::ProtocolError, "handshake rejected: " + err->message);
    }
    const auto* hello = std::get_if<HelloResponse>(&msg);
    if (!hello) fail(ErrorKind::ProtocolError, "expected HELLO response");
    if (hello->version != kProtocolVersion) {
        fail(ErrorKind::ProtocolError, "server speaks protocol version " + std::to_string(hello->version) +
                                           ", client speaks " + std::to_string(kProtocolVersion));
    }
    if (hello->max_window_frames == 0 || hello->channels == 0 || hello->height == 0 || hello->width == 0) {
        fail(ErrorKind::ProtocolError, "server advertised an empty capability");
    }
    return Connection(std::move(s), *hello, timeout_ms);
}

Tensor Connection::denoise(const DenoiseRequest& request) {
    if (!healthy()) fail(ErrorKind::TransportError, "connection is closed");
    try {
        socket_.send_all(encode_frame(request));
        return receive_result(request);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::RemoteDenoiserError) socket_.close();
        throw;
    }
}

Tensor Connection::receive_result(const DenoiseRequest& request) {
    auto payload = socket_.recv_frame(timeout_ms_);
    if (!payload) fail(ErrorKind::TransportError, "server closed the connection");
    Message msg = decode_payload(*payload);
    if (auto* err = std::get_if<ErrorMessage>(&msg)) {
        if (err->request_id != 0 && err->request_id != request.request_id) {
            fail(ErrorKind::ProtocolError, "error response for unknown request id");
        }
        fail(ErrorKind::RemoteDenoiserError,
             "server error " + std::to_string(err->code) + ": " + err->message);
    }
    auto* resp = std::get_if<DenoiseResponse>(&msg);
    if (!resp) fail(ErrorKind::ProtocolError, "unexpected message type in reply to DENOISE");
    if (resp->request_id != request.request_id) fail(ErrorKind::ProtocolError, "response request id mismatch");
    if (resp->status != 0) {
        fail(ErrorKind::RemoteDenoiserError, "server returned status " + std::to_string(resp->status));
    }
    if (resp->result->dims != request.window.dims) {
        fail(ErrorKind::ProtocolError, "response tensor dims differ from request window");
    }
    return std::move(*resp->result);
}

DenoiseRequest make_request(std::uint64_t request_id, const LatentVideo& window, double sigma_from, double sigma_to,
                            const ConditionSpec& cond) {
    if (cond.window_start > std::numeric_limits<std::uint32_t>::max() ||
        cond.offset_in_window > std::numeric_limits<std::uint16_t>::max()) {
        fail(ErrorKind::InvalidArgument, "window position does not fit the wire format");
    }
    DenoiseRequest req;
    req.request_id = request_id;
    req.sigma_from = sigma_from;
    req.sigma_to = sigma_to;
    req.window_start = static_cast<std::uint32_t>(cond.window_start);
    req.cond_offset = static_cast<std::uint16_t>(cond.offset_in_window);
    if (cond.keyframe) req.cond = to_tensor(*cond.keyframe);
    req.window = to_tensor(window);
    return req;
}

RemoteDenoiser::RemoteDenoiser(Endpoint endpoint, ClientOptions options, std::vector<std::unique_ptr<Connection>> pool)
    : endpoint_(std::move(endpoint)), options_(options), hello_(pool.front()->hello()), pool_(std::move(pool)) {}

std::unique_ptr<RemoteDenoiser> RemoteDenoiser::connect(const std::string& address, const ClientOptions& options) {
    if (options.pool == 0) fail(ErrorKind::InvalidArgument, "connection pool must hold at least one connection");
    const Endpoint ep = parse_endpoint(address);
    std::vector<std::unique_ptr<Connection>> pool;
    for (std::size_t i = 0; i < options.pool; ++i) {
        pool.push_back(std::make_unique<Connection>(Connection::open(ep, options.timeout_ms)));
        if (!(pool.back()->hello() == pool.front()->hello())) {
            fail(ErrorKind::ProtocolError, "pooled connections advertised different capabilities");
        }
    }
    return std::unique_ptr<RemoteDenoiser>(new RemoteDenoiser(ep, options, std::move(pool)));
}

std::unique_ptr<Connection> RemoteDenoiser::acquire() const {
    std::unique_lock lock(mutex_);
    available_.wait(lock, [&] { return !pool_.empty(); });
    auto conn = std::move(pool_.back());
    pool_.pop_back();
    return conn;
}

void RemoteDenoiser::release(std::unique_ptr<Connection> conn) const {
    {
        std::lock_guard lock(mutex_);
        pool_.push_back(std::move(conn));
    }
    available_.notify_one();
}

LatentVideo RemoteDenoiser::step(const LatentVideo& window, double sigma_from, double sigma_to,
                                 const ConditionSpec& cond) const {
    const DenoiseRequest req = make_request(next_request_id_.fetch_add(1), window, sigma_from, sigma_to, cond);
    auto conn = acquire();
    struct Return {
        const RemoteDenoiser* self;
        std::unique_ptr<Connection>& conn;
        ~Return() { self->release(std::move(conn)); }
    } give_back{this, conn};

    if (!conn->healthy()) {
        // Broken by an earlier protocol failure; reconnect lazily.
        auto fresh = Connection::open(endpoint_, options_.timeout_ms);
        if (!(fresh.hello() == hello_)) fail(ErrorKind::ProtocolError, "server capability changed on reconnect");
        *conn = std::move(fresh);
    }
    Tensor result = conn->denoise(req);
    return to_latent(result);
}

}  // namespace dslide::remote
