#include "diffuseslide/latent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/simd/kernels.hpp"

namespace dslide {

LatentVideo::LatentVideo(Dims dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
    if (dims_.channels == 0 || dims_.frames == 0 || dims_.height == 0 || dims_.width == 0) {
        fail(ErrorKind::InvalidArgument, "latent dimensions must be positive");
    }
    if (data_.size() != dims_.count()) {
        fail(ErrorKind::InvalidArgument, "latent element count " + std::to_string(data_.size()) +
                                             " does not match dims (" + std::to_string(dims_.count()) + ")");
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
        fail(ErrorKind::InvalidArgument, "latent contains non-finite values");
    }
}

LatentVideo LatentVideo::zeros(Dims dims) { return filled(dims, 0.0); }

LatentVideo LatentVideo::filled(Dims dims, double value) {
    return LatentVideo(dims, std::vector<double>(dims.count(), value));
}

std::span<const double> LatentVideo::plane(std::size_t ch, std::size_t t) const {
    const std::size_t p = dims_.plane();
    return std::span<const double>(data_).subspan((ch * dims_.frames + t) * p, p);
}

std::span<double> LatentVideo::plane(std::size_t ch, std::size_t t) {
    const std::size_t p = dims_.plane();
    return std::span<double>(data_).subspan((ch * dims_.frames + t) * p, p);
}

LatentVideo LatentVideo::slice_frames(std::size_t start, std::size_t count) const {
    if (count == 0 || start + count > dims_.frames) {
        fail(ErrorKind::InvalidArgument, "frame slice [" + std::to_string(start) + ", " +
                                             std::to_string(start + count) + ") out of range");
    }
    const Dims out_dims = dims_.with_frames(count);
    std::vector<double> out(out_dims.count());
    const std::size_t block = count * dims_.plane();
    for (std::size_t ch = 0; ch < dims_.channels; ++ch) {
        const auto src = plane(ch, start);
        std::copy_n(src.data(), block, out.data() + ch * block);
    }
    return LatentVideo(out_dims, std::move(out));
}

void KeyframePlan::validate() const {
    if (factor < 1) fail(ErrorKind::InvalidArgument, "interpolation factor must be >= 1");
    if (n_keyframes < 1) fail(ErrorKind::InvalidArgument, "plan needs at least one keyframe");
}

std::vector<std::size_t> keyframe_indices(const KeyframePlan& plan) {
    std::vector<std::size_t> out(plan.n_keyframes);
    for (std::size_t i = 0; i < plan.n_keyframes; ++i) out[i] = plan.keyframe_index(i);
    return out;
}

LatentVideo interpolate(const LatentVideo& low, std::size_t factor) {
    if (factor < 1) fail(ErrorKind::InvalidArgument, "interpolation factor must be >= 1");
    const Dims& in = low.dims();
    if (in.frames < 2) fail(ErrorKind::InvalidArgument, "interpolation needs at least 2 keyframes");

    const KeyframePlan plan{factor, in.frames};
    LatentVideo out = LatentVideo::zeros(in.with_frames(plan.total_frames()));
    const std::size_t last = in.frames - 1;

    for (std::size_t ch = 0; ch < in.channels; ++ch) {
        for (std::size_t k = 0; k < in.frames; ++k) {
            const auto key = low.plane(ch, k);
            const std::size_t base = plan.keyframe_index(k);
            std::ranges::copy(key, out.plane(ch, base).begin());
            for (std::size_t t = 1; t < factor; ++t) {
                auto dst = out.plane(ch, base + t);
                if (k == last) {
                    std::ranges::copy(key, dst.begin());
                } else {
                    const double alpha = static_cast<double>(t) / static_cast<double>(factor);
                    simd::lerp(key, low.plane(ch, k + 1), alpha, dst);
                }
            }
        }
    }
    return out;
}

LatentVideo inject_noise(const LatentVideo& z, double sigma, const NoiseSeed& seed) {
    if (!std::isfinite(sigma) || sigma < 0.0) {
        fail(ErrorKind::InvalidArgument, "noise level must be finite and non-negative");
    }
    if (sigma == 0.0) return z;
    std::vector<double> eps(z.dims().count());
    fill_standard_normal(seed, eps);
    std::vector<double> out(eps.size());
    simd::axpy(z.data(), sigma, eps, out);
    return LatentVideo(z.dims(), std::move(out));
}

}  // namespace dslide
