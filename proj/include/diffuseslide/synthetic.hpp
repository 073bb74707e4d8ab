#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "diffuseslide/latent.hpp"
#include "diffuseslide/prior.hpp"

namespace dslide {

/// Toy corpus parameters. Ground-truth videos have F = factor * keyframes frames.
struct CorpusSpec {
    std::size_t n_videos = 20;
    std::size_t channels = 1;
    std::size_t height = 8;
    std::size_t width = 8;
    std::size_t keyframes = 14;
    std::size_t factor = 4;
    std::size_t rank = 6;
    std::uint64_t seed = 0;
    double amplitude = 0.15;
    // Temporal frequencies (radians per frame) are drawn uniformly from this range.
    double omega_min = 0.25;
    double omega_max = 0.75;

    std::size_t total_frames() const noexcept { return factor * keyframes; }
    Dims full_dims() const noexcept { return Dims{channels, total_frames(), height, width}; }
    void validate() const;
};

struct Grating {
    int p = 0;  // cycles across the width
    int q = 0;  // cycles across the height
    double omega = 0.0;
    double phase = 0.0;
};

// Spatio-temporal grating parameters for each basis video.
std::vector<Grating> grating_parameters(const CorpusSpec& spec);

// Prior whose columns are amplitude * cos(2 pi (p x / w + q y / h) + omega t + phase),
// mean the constant 0.5 video.
LinearGaussianPrior build_prior(const CorpusSpec& spec);

struct CorpusPair {
    LatentVideo truth_high;
    LatentVideo low;
    std::vector<double> coefficients;
};

// truth = mean + basis * u with u ~ N(0, I) from substream `index`; low keeps every factor-th frame.
CorpusPair sample_pair(const LinearGaussianPrior& prior, const CorpusSpec& spec, std::size_t index);

// Every factor-th frame.
LatentVideo subsample(const LatentVideo& high, std::size_t factor);

// Prior over the keyframes alone: every column and the mean keep every factor-th frame.
LinearGaussianPrior subsample_prior(const LinearGaussianPrior& prior, std::size_t factor);

}  // namespace dslide
