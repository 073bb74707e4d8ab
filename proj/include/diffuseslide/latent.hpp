#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diffuseslide/noise.hpp"

namespace dslide {

/// Shape of a latent video tensor laid out row-major as (channels, frames, height, width).
struct Dims {
    std::size_t channels = 1;
    std::size_t frames = 1;
    std::size_t height = 1;
    std::size_t width = 1;

    std::size_t plane() const noexcept { return height * width; }
    std::size_t count() const noexcept { return channels * frames * height * width; }
    Dims with_frames(std::size_t f) const noexcept { return Dims{channels, f, height, width}; }
    // True when channels/height/width agree (frame counts may differ).
    bool same_frame_shape(const Dims& other) const noexcept {
        return channels == other.channels && height == other.height && width == other.width;
    }

    friend bool operator==(const Dims&, const Dims&) = default;
};

/// Real-valued latent video. All elements are finite; construction checks it.
class LatentVideo {
public:
    LatentVideo() = default;
    LatentVideo(Dims dims, std::vector<double> data);

    static LatentVideo zeros(Dims dims);
    static LatentVideo filled(Dims dims, double value);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t frames() const noexcept { return dims_.frames; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    // One (height x width) plane of channel `ch` at frame `t`.
    std::span<const double> plane(std::size_t ch, std::size_t t) const;
    std::span<double> plane(std::size_t ch, std::size_t t);

    // Frames [start, start + count) as a new video.
    LatentVideo slice_frames(std::size_t start, std::size_t count) const;
    LatentVideo frame(std::size_t t) const { return slice_frames(t, 1); }

    friend bool operator==(const LatentVideo&, const LatentVideo&) = default;

private:
    Dims dims_{};
    std::vector<double> data_;
};

/// Layout of keyframes inside the interpolated video: keyframe i (0-based)
/// sits at frame i * factor, and the last keyframe is repeated factor - 1 times.
struct KeyframePlan {
    std::size_t factor = 1;
    std::size_t n_keyframes = 1;

    std::size_t total_frames() const noexcept { return factor * n_keyframes; }
    std::size_t tail_dups() const noexcept { return factor - 1; }
    std::size_t keyframe_index(std::size_t i) const noexcept { return i * factor; }

    void validate() const;
};

std::vector<std::size_t> keyframe_indices(const KeyframePlan& plan);

// Latent-space linear interpolation by an integer frame-rate factor.
LatentVideo interpolate(const LatentVideo& low, std::size_t factor);

// z + sigma * eps, eps ~ N(0, I) from the seeded substream.
LatentVideo inject_noise(const LatentVideo& z, double sigma, const NoiseSeed& seed);

}  // namespace dslide
