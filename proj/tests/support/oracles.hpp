#pragma once

// Independent reference implementations used only by tests. They share no
// code path with the library beyond its public data types.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "diffuseslide/denoiser.hpp"
#include "diffuseslide/prior.hpp"
#include "diffuseslide/sliding_window.hpp"

namespace dslide::testing {

// d x k basis matrix of a prior.
Eigen::MatrixXd dense_basis(const LinearGaussianPrior& prior);

// Row indices (into the flattened full video) of frames [start, start + count), all channels.
std::vector<Eigen::Index> frame_rows(const Dims& dims, std::size_t start, std::size_t count);

// Posterior mean computed in observation space: E[u | obs] = H^T (H H^T + R)^-1 (obs - mean).
std::vector<double> observation_space_posterior(const LinearGaussianPrior& prior, const LatentVideo& window,
                                                std::size_t window_start, double sigma, const ConditionSpec& cond,
                                                double cond_precision);

// log N(z; mean, A A^T + sigma^2 I) over a full-length video.
double marginal_log_density(const LinearGaussianPrior& prior, const Eigen::VectorXd& z, double sigma);

// Norm of the component of (z - mean) outside the basis span, via a QR projection.
double off_manifold_norm(const LinearGaussianPrior& prior, std::span<const double> z);

// Materializes every window's stepped output into full-length buffers and
// averages them frame by frame.
LatentVideo brute_force_round(const WindowLayout& layout, const LatentVideo& z, const Denoiser& denoiser,
                              double sigma_from, double sigma_to);

// x = u with u ~ N(0, 1): one frame of one pixel, basis [1], mean 0.
std::shared_ptr<const LinearGaussianPrior> scalar_prior(std::size_t frames = 1);

// Gaussian random basis columns scaled by `scale`, mean `mean_value`.
std::shared_ptr<const LinearGaussianPrior> random_prior(const Dims& dims, std::size_t rank, std::uint64_t seed,
                                                        double scale = 0.3, double mean_value = 0.5);

// Denoiser whose step is an arbitrary function; for exercising plumbing.
class LambdaDenoiser final : public Denoiser {
public:
    using StepFn = std::function<LatentVideo(const LatentVideo&, double, double, const ConditionSpec&)>;

    LambdaDenoiser(Dims frame_shape, std::size_t capability, StepFn fn)
        : shape_(frame_shape), capability_(capability), fn_(std::move(fn)) {}

    std::size_t capability() const override { return capability_; }
    Dims frame_shape() const override { return shape_; }
    DenoiserKind kind() const override { return DenoiserKind::Analytic; }
    LatentVideo step(const LatentVideo& w, double from, double to, const ConditionSpec& c) const override {
        return fn_(w, from, to, c);
    }

private:
    Dims shape_;
    std::size_t capability_;
    StepFn fn_;
};

LatentVideo random_latent(const Dims& dims, std::uint64_t seed, double scale = 1.0);

}  // namespace dslide::testing
