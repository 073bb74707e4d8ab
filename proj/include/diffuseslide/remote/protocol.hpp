#pragma once

// Length-prefixed binary protocol between the engine and an out-of-process
// denoiser. See docs/protocol.md for the byte layout.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "diffuseslide/tensor_io.hpp"

namespace dslide::remote {

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::uint32_t kMaxFrameBytes = 1u << 28;

enum class MsgType : std::uint8_t {
    HelloRequest = 0x01,
    DenoiseRequest = 0x02,
    Error = 0x7F,
    HelloResponse = 0x81,
    DenoiseResponse = 0x82,
};

enum class ErrorCode : std::uint16_t {
    BadRequest = 1,
    UnsupportedVersion = 2,
    BackendFailure = 3,
    WindowTooLong = 4,
};

struct HelloRequest {
    std::uint16_t version = kProtocolVersion;
    friend bool operator==(const HelloRequest&, const HelloRequest&) = default;
};

struct HelloResponse {
    std::uint16_t version = kProtocolVersion;
    std::uint16_t max_window_frames = 0;
    std::uint16_t channels = 0;
    std::uint16_t height = 0;
    std::uint16_t width = 0;
    friend bool operator==(const HelloResponse&, const HelloResponse&) = default;
};

// An absent condition travels as a rank-0 wire tensor.
struct DenoiseRequest {
    std::uint64_t request_id = 0;
    double sigma_from = 0.0;
    double sigma_to = 0.0;
    std::uint32_t window_start = 0;
    std::uint16_t cond_offset = 0;
    std::optional<Tensor> cond;
    Tensor window;
    friend bool operator==(const DenoiseRequest&, const DenoiseRequest&) = default;
};

// status 0 carries the result; any other status carries a rank-0 tensor.
struct DenoiseResponse {
    std::uint64_t request_id = 0;
    std::uint8_t status = 0;
    std::optional<Tensor> result;
    friend bool operator==(const DenoiseResponse&, const DenoiseResponse&) = default;
};

struct ErrorMessage {
    std::uint64_t request_id = 0;
    std::uint16_t code = 0;
    std::string message;
    friend bool operator==(const ErrorMessage&, const ErrorMessage&) = default;
};

using Message = std::variant<HelloRequest, HelloResponse, DenoiseRequest, DenoiseResponse, ErrorMessage>;

// Payload (type byte + body) without the length prefix.
std::vector<std::uint8_t> encode_payload(const Message& msg);
// u32 little-endian payload length followed by the payload.
std::vector<std::uint8_t> encode_frame(const Message& msg);
// Throws protocol-error on any malformation, including trailing bytes.
Message decode_payload(std::span<const std::uint8_t> payload);

}  // namespace dslide::remote
