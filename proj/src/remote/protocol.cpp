#include "diffuseslide/remote/protocol.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "diffuseslide/errors.hpp"

namespace dslide::remote {
namespace {

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

    void tensor(const std::optional<Tensor>& t) {
        if (!t) {
            u8(0);
            return;
        }
        if (t->dims.empty() || t->dims.size() > 255 || t->data.size() != t->element_count()) {
            fail(ErrorKind::InvalidArgument, "cannot encode malformed tensor");
        }
        u8(static_cast<std::uint8_t>(t->dims.size()));
        for (auto d : t->dims) u32(d);
        for (float v : t->data) f32(v);
    }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    float f32() { return std::bit_cast<float>(u32()); }

    std::optional<Tensor> tensor() {
        const std::size_t ndim = u8();
        if (ndim == 0) return std::nullopt;
        Tensor t;
        std::size_t count = 1;
        for (std::size_t i = 0; i < ndim; ++i) {
            const std::uint32_t d = u32();
            if (d == 0) fail(ErrorKind::ProtocolError, "wire tensor has a zero dim");
            count *= d;
            if (count > remaining() / 4) fail(ErrorKind::ProtocolError, "wire tensor larger than frame");
            t.dims.push_back(d);
        }
        t.data.resize(count);
        for (auto& v : t.data) {
            v = f32();
            if (!std::isfinite(v)) fail(ErrorKind::ProtocolError, "wire tensor holds non-finite value");
        }
        return t;
    }

    std::string text(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const noexcept { return in_.size() - pos_; }

    void finish() const {
        if (remaining() != 0) fail(ErrorKind::ProtocolError, "trailing bytes after message body");
    }

private:
    void need(std::size_t n) const {
        if (remaining() < n) fail(ErrorKind::ProtocolError, "message body truncated");
    }
    std::uint64_t get(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

std::vector<std::uint8_t> encode_payload(const Message& msg) {
    Writer w;
    std::visit(Overloaded{
                   [&](const HelloRequest& m) {
                       w.u8(static_cast<std::uint8_t>(MsgType::HelloRequest));
                       w.u16(m.version);
                   },
                   [&](const HelloResponse& m) {
                       w.u8(static_cast<std::uint8_t>(MsgType::HelloResponse));
                       w.u16(m.version);
                       w.u16(m.max_window_frames);
                       w.u16(m.channels);
                       w.u16(m.height);
                       w.u16(m.width);
                   },
                   [&](const DenoiseRequest& m) {
                       w.u8(static_cast<std::uint8_t>(MsgType::DenoiseRequest));
                       w.u64(m.request_id);
                       w.f64(m.sigma_from);
                       w.f64(m.sigma_to);
                       w.u32(m.window_start);
                       w.u16(m.cond_offset);
                       w.tensor(m.cond);
                       w.tensor(m.window);
                   },
                   [&](const DenoiseResponse& m) {
                       w.u8(static_cast<std::uint8_t>(MsgType::DenoiseResponse));
                       w.u64(m.request_id);
                       w.u8(m.status);
                       w.tensor(m.status == 0 ? m.result : std::nullopt);
                   },
                   [&](const ErrorMessage& m) {
                       if (m.message.size() > 0xffff) fail(ErrorKind::InvalidArgument, "error message too long");
                       w.u8(static_cast<std::uint8_t>(MsgType::Error));
                       w.u64(m.request_id);
                       w.u16(m.code);
                       w.u16(static_cast<std::uint16_t>(m.message.size()));
                       w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(m.message.data()), m.message.size()));
                   },
               },
               msg);
    return w.take();
}

std::vector<std::uint8_t> encode_frame(const Message& msg) {
    const auto payload = encode_payload(msg);
    if (payload.size() > kMaxFrameBytes) fail(ErrorKind::InvalidArgument, "message exceeds maximum frame size");
    std::vector<std::uint8_t> out;
    out.reserve(4 + payload.size());
    const auto n = static_cast<std::uint32_t>(payload.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Message decode_payload(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto type = r.u8();
    Message out;
    switch (static_cast<MsgType>(type)) {
        case MsgType::HelloRequest: {
            out = HelloRequest{r.u16()};
            break;
        }
        case MsgType::HelloResponse: {
            HelloResponse m;
            m.version = r.u16();
            m.max_window_frames = r.u16();
            m.channels = r.u16();
            m.height = r.u16();
            m.width = r.u16();
            out = m;
            break;
        }
        case MsgType::DenoiseRequest: {
            DenoiseRequest m;
            m.request_id = r.u64();
            m.sigma_from = r.f64();
            m.sigma_to = r.f64();
            m.window_start = r.u32();
            m.cond_offset = r.u16();
            m.cond = r.tensor();
            auto window = r.tensor();
            if (!window) fail(ErrorKind::ProtocolError, "denoise request without window tensor");
            m.window = std::move(*window);
            out = std::move(m);
            break;
        }
        case MsgType::DenoiseResponse: {
            DenoiseResponse m;
            m.request_id = r.u64();
            m.status = r.u8();
            m.result = r.tensor();
            if (m.status == 0 && !m.result) fail(ErrorKind::ProtocolError, "successful response without result");
            if (m.status != 0 && m.result) fail(ErrorKind::ProtocolError, "failed response carries a result tensor");
            out = std::move(m);
            break;
        }
        case MsgType::Error: {
            ErrorMessage m;
            m.request_id = r.u64();
            m.code = r.u16();
            const std::size_t len = r.u16();
            m.message = r.text(len);
            out = std::move(m);
            break;
        }
        default:
            fail(ErrorKind::ProtocolError, "unknown message type " + std::to_string(type));
    }
    r.finish();
    return out;
}

}  // namespace dslide::remote
