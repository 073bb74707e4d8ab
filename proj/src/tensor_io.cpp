#include "diffuseslide/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "diffuseslide/errors.hpp"

namespace dslide {
namespace {

constexpr char kMagic[4] = {'L', 'V', 'T', '1'};
constexpr std::size_t kHeaderBytes = 7;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::size_t Tensor::element_count() const noexcept {
    std::size_t n = dims.empty() ? 0 : 1;
    for (auto d : dims) n *= d;
    return n;
}

std::vector<std::uint8_t> encode_tensor_file(const Tensor& t) {
    if (t.dims.empty() || t.dims.size() > 255) fail(ErrorKind::InvalidArgument, "tensor rank must be in [1, 255]");
    if (std::ranges::any_of(t.dims, [](std::uint32_t d) { return d == 0; })) {
        fail(ErrorKind::InvalidArgument, "tensor dims must be nonzero");
    }
    if (t.data.size() != t.element_count()) fail(ErrorKind::InvalidArgument, "tensor data does not match dims");
    if (!std::ranges::all_of(t.data, [](float v) { return std::isfinite(v); })) {
        fail(ErrorKind::InvalidArgument, "tensor contains non-finite values");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + 4 * t.dims.size() + 4 * t.data.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    out.push_back(kTensorVersion);
    out.push_back(kDtypeF32);
    out.push_back(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) put_u32(out, d);
    for (float v : t.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

Tensor decode_tensor_file(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes) fail(ErrorKind::FormatError, "tensor file shorter than header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) fail(ErrorKind::FormatError, "bad tensor magic");
    if (bytes[4] != kTensorVersion) fail(ErrorKind::FormatError, "unsupported tensor version " + std::to_string(bytes[4]));
    if (bytes[5] != kDtypeF32) fail(ErrorKind::FormatError, "unsupported tensor dtype " + std::to_string(bytes[5]));
    const std::size_t ndim = bytes[6];
    if (ndim == 0) fail(ErrorKind::FormatError, "tensor rank must be positive");
    if (bytes.size() < kHeaderBytes + 4 * ndim) fail(ErrorKind::FormatError, "truncated tensor dims");

    Tensor t;
    std::size_t count = 1;
    for (std::size_t i = 0; i < ndim; ++i) {
        const std::uint32_t d = get_u32(bytes.data() + kHeaderBytes + 4 * i);
        if (d == 0) fail(ErrorKind::FormatError, "tensor dim is zero");
        t.dims.push_back(d);
        count *= d;
        if (count > bytes.size()) fail(ErrorKind::FormatError, "truncated tensor payload");
    }
    const std::size_t payload_at = kHeaderBytes + 4 * ndim;
    if (bytes.size() - payload_at != 4 * count) {
        fail(ErrorKind::FormatError, bytes.size() - payload_at < 4 * count ? "truncated tensor payload"
                                                                          : "trailing bytes after tensor payload");
    }
    t.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        t.data[i] = std::bit_cast<float>(get_u32(bytes.data() + payload_at + 4 * i));
        if (!std::isfinite(t.data[i])) fail(ErrorKind::FormatError, "tensor payload holds non-finite value");
    }
    return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
    const auto bytes = encode_tensor_file(t);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidArgument, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::InvalidArgument, "failed writing " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::InvalidArgument, "cannot open " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_tensor_file(bytes);
    } catch (const Error& e) {
        throw e.with_context(path.string());
    }
}

Tensor to_tensor(const LatentVideo& z) {
    const Dims& d = z.dims();
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(d.channels), static_cast<std::uint32_t>(d.frames),
              static_cast<std::uint32_t>(d.height), static_cast<std::uint32_t>(d.width)};
    t.data.reserve(d.count());
    for (double v : z.data()) t.data.push_back(static_cast<float>(v));
    return t;
}

LatentVideo to_latent(const Tensor& t) {
    if (t.dims.size() != 4) fail(ErrorKind::FormatError, "latent tensors must be 4-d (c, F, h, w)");
    const Dims d{t.dims[0], t.dims[1], t.dims[2], t.dims[3]};
    return LatentVideo(d, std::vector<double>(t.data.begin(), t.data.end()));
}

void write_latent(const std::filesystem::path& path, const LatentVideo& z) { write_tensor(path, to_tensor(z)); }

LatentVideo read_latent(const std::filesystem::path& path) { return to_latent(read_tensor(path)); }

std::uint8_t quantize_pixel(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

void export_frames(const LatentVideo& z, const std::filesystem::path& dir) {
    const Dims& d = z.dims();
    if (d.channels != 1) fail(ErrorKind::Unsupported, "frame export supports single-channel latents only");
    std::filesystem::create_directories(dir);
    const std::string header = "P5\n" + std::to_string(d.width) + " " + std::to_string(d.height) + "\n255\n";
    for (std::size_t t = 0; t < d.frames; ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04zu.pgm", t);
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + (dir / name).string());
        out << header;
        std::vector<char> row(d.plane());
        const auto plane = z.plane(0, t);
        std::ranges::transform(plane, row.begin(), [](double v) { return static_cast<char>(quantize_pixel(v)); });
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

}  // namespace dslide
