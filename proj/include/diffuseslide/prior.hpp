#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "diffuseslide/denoiser.hpp"
#include "diffuseslide/latent.hpp"

namespace dslide {

/// Linear-Gaussian video prior: x = mean + basis * u with u ~ N(0, I_k).
///
/// The basis is stored column-major, each column a flattened (c, F, h, w)
/// video, so a window's rows for one channel are one contiguous run inside
/// every column. Per-frame Gram blocks are precomputed so windowed posterior
/// solves cost O(window elements * k) plus a k x k factorization.
class LinearGaussianPrior {
public:
    // Throws construction-failure when the columns are not linearly independent.
    LinearGaussianPrior(Dims dims, std::vector<double> basis_columns, std::vector<double> mean);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t rank() const noexcept { return rank_; }
    std::size_t size() const noexcept { return dims_.count(); }

    std::span<const double> column(std::size_t j) const;
    std::span<const double> mean() const noexcept { return mean_; }

    // Rows of column j / of the mean for channel `ch`, frames [t, t + count).
    std::span<const double> column_block(std::size_t j, std::size_t ch, std::size_t t, std::size_t count = 1) const;
    std::span<const double> mean_block(std::size_t ch, std::size_t t, std::size_t count = 1) const;

    // k x k row-major Gram of the rows belonging to frame t (all channels).
    std::span<const double> frame_gram(std::size_t t) const;
    std::span<const double> gram() const noexcept { return gram_; }
    double gram_condition_number() const noexcept { return condition_number_; }

    // mean + basis * u.
    LatentVideo compose(std::span<const double> u) const;
    // Component of (z - mean) orthogonal to the basis column space.
    std::vector<double> off_manifold(const LatentVideo& z) const;

private:
    Dims dims_;
    std::size_t rank_;
    std::vector<double> basis_;
    std::vector<double> mean_;
    std::vector<double> frame_grams_;
    std::vector<double> gram_;
    double condition_number_ = 0.0;
};

/// Exact posterior mean E[x_window | noisy window at level sigma, condition].
///
/// The condition keyframe, when present and cond_precision > 0, is treated as
/// a Gaussian observation of frame window_start + offset_in_window with the
/// given precision.
LatentVideo posterior_mean(const LinearGaussianPrior& prior, const LatentVideo& window, std::size_t window_start,
                           double sigma, const ConditionSpec& cond, double cond_precision);

/// Denoiser backed by the exact posterior mean of a LinearGaussianPrior.
class AnalyticDenoiser final : public Denoiser {
public:
    AnalyticDenoiser(std::shared_ptr<const LinearGaussianPrior> prior, std::size_t capability,
                     double cond_precision);

    std::size_t capability() const override { return capability_; }
    Dims frame_shape() const override { return prior_->dims().with_frames(1); }
    DenoiserKind kind() const override { return DenoiserKind::Analytic; }
    LatentVideo step(const LatentVideo& window, double sigma_from, double sigma_to,
                     const ConditionSpec& cond) const override;

    LatentVideo denoise(const LatentVideo& window, double sigma, const ConditionSpec& cond) const;

    const LinearGaussianPrior& prior() const noexcept { return *prior_; }
    std::shared_ptr<const LinearGaussianPrior> shared_prior() const noexcept { return prior_; }
    double cond_precision() const noexcept { return cond_precision_; }

private:
    std::shared_ptr<const LinearGaussianPrior> prior_;
    std::size_t capability_;
    double cond_precision_;
};

}  // namespace dslide
