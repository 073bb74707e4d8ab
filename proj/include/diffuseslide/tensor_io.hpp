#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "diffuseslide/latent.hpp"

namespace dslide {

/// Dense float32 tensor as stored on disk and on the wire.
///
/// File layout (all little-endian):
///   "LVT1" | u8 version = 1 | u8 dtype = 0 (f32) | u8 ndim | ndim x u32 dims | f32 payload
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t element_count() const noexcept;
    friend bool operator==(const Tensor&, const Tensor&) = default;
};

inline constexpr std::uint8_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 0;

std::vector<std::uint8_t> encode_tensor_file(const Tensor& t);
Tensor decode_tensor_file(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

// 4-d (c, F, h, w) conversions. to_tensor rounds to float32.
Tensor to_tensor(const LatentVideo& z);
LatentVideo to_latent(const Tensor& t);

void write_latent(const std::filesystem::path& path, const LatentVideo& z);
LatentVideo read_latent(const std::filesystem::path& path);

// One binary PGM (P5, maxval 255) per frame, named frame_%04d.pgm; single channel only.
void export_frames(const LatentVideo& z, const std::filesystem::path& dir);

// Value clamped to [0, 1] and quantized with round-half-up.
std::uint8_t quantize_pixel(double v);

}  // namespace dslide
