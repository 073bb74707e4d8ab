#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "diffuseslide/latent.hpp"
#include "diffuseslide/prior.hpp"

namespace dslide {

inline constexpr double kPsnrCap = 99.0;
inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

struct Image {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> pixels;
};

// 10 log10(1 / MSE) for signals in [0, 1]; identical inputs give the 99 dB cap.
double psnr(std::span<const double> a, std::span<const double> b);

// Mean SSIM over valid 11x11 Gaussian (std 1.5) windows, L = 1.
double ssim(const Image& a, const Image& b);

// Pixel rendering of one latent plane: clamp to [0, 1], then replicate pixels
// by the smallest integer factor that makes both sides >= min_side.
Image render_plane(std::span<const double> plane, std::size_t height, std::size_t width,
                   std::size_t min_side = kSsimWindow);

struct KeyframeMetrics {
    double psnr = 0.0;
    double ssim = 0.0;
    std::vector<double> per_frame_psnr;
    std::vector<double> per_frame_ssim;
};

// Low keyframe i against high frame i * factor, after clamping to [0, 1].
KeyframeMetrics keyframe_metrics(const LatentVideo& low, const LatentVideo& high, const KeyframePlan& plan);

struct TruthMetrics {
    double psnr = 0.0;
    std::vector<double> per_frame_psnr;
};

TruthMetrics truth_metrics(const LatentVideo& high, const LatentVideo& truth);

// RMS of the component of (z - mean) orthogonal to the prior's basis.
double manifold_residual(const LatentVideo& z, const LinearGaussianPrior& prior);

struct MetricReport {
    double psnr_keyframes = 0.0;
    double ssim_keyframes = 0.0;
    std::optional<double> psnr_vs_truth;
    double manifold_residual = 0.0;
    std::vector<double> per_frame_psnr_keyframes;
    std::vector<double> per_frame_ssim_keyframes;
    std::vector<double> per_frame_psnr_vs_truth;
};

MetricReport evaluate(const LatentVideo& low, const LatentVideo& high, std::size_t factor,
                      const LinearGaussianPrior& prior, const LatentVideo* truth = nullptr);

}  // namespace dslide
