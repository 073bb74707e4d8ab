#include "diffuseslide/prior.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/simd/kernels.hpp"

namespace dslide {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> as_matrix(std::span<const double> v, std::size_t k) {
    return Eigen::Map<const RowMat>(v.data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
}

}  // namespace

LinearGaussianPrior::LinearGaussianPrior(Dims dims, std::vector<double> basis_columns, std::vector<double> mean)
    : dims_(dims), rank_(0), basis_(std::move(basis_columns)), mean_(std::move(mean)) {
    const std::size_t d = dims_.count();
    if (d == 0) fail(ErrorKind::ConstructionFailure, "prior dimensions must be positive");
    if (mean_.size() != d) fail(ErrorKind::ConstructionFailure, "prior mean length does not match dims");
    if (basis_.empty() || basis_.size() % d != 0) {
        fail(ErrorKind::ConstructionFailure, "prior basis must hold a whole number of columns");
    }
    rank_ = basis_.size() / d;
    if (rank_ > d) fail(ErrorKind::ConstructionFailure, "prior rank exceeds dimension");
    for (double v : basis_) {
        if (!std::isfinite(v)) fail(ErrorKind::ConstructionFailure, "prior basis contains non-finite values");
    }

    const std::size_t k = rank_;
    frame_grams_.assign(dims_.frames * k * k, 0.0);
    for (std::size_t t = 0; t < dims_.frames; ++t) {
        double* g = frame_grams_.data() + t * k * k;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = 0.0;
                for (std::size_t ch = 0; ch < dims_.channels; ++ch) {
                    s += simd::dot(column_block(i, ch, t), column_block(j, ch, t));
                }
                g[i * k + j] = s;
                g[j * k + i] = s;
            }
        }
    }
    gram_.assign(k * k, 0.0);
    for (std::size_t t = 0; t < dims_.frames; ++t) {
        simd::accumulate(gram_, frame_gram(t));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(as_matrix(gram_, k));
    if (eig.info() != Eigen::Success) fail(ErrorKind::ConstructionFailure, "Gram eigen-decomposition failed");
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > hi * 1e-13)) {
        fail(ErrorKind::ConstructionFailure, "prior basis is rank deficient (Gram eigenvalue " + std::to_string(lo) + ")");
    }
    condition_number_ = hi / lo;
}

std::span<const double> LinearGaussianPrior::column(std::size_t j) const {
    const std::size_t d = size();
    return std::span<const double>(basis_).subspan(j * d, d);
}

std::span<const double> LinearGaussianPrior::column_block(std::size_t j, std::size_t ch, std::size_t t,
                                                          std::size_t count) const {
    const std::size_t p = dims_.plane();
    return column(j).subspan((ch * dims_.frames + t) * p, count * p);
}

std::span<const double> LinearGaussianPrior::mean_block(std::size_t ch, std::size_t t, std::size_t count) const {
    const std::size_t p = dims_.plane();
    return std::span<const double>(mean_).subspan((ch * dims_.frames + t) * p, count * p);
}

std::span<const double> LinearGaussianPrior::frame_gram(std::size_t t) const {
    const std::size_t kk = rank_ * rank_;
    return std::span<const double>(frame_grams_).subspan(t * kk, kk);
}

LatentVideo LinearGaussianPrior::compose(std::span<const double> u) const {
    if (u.size() != rank_) fail(ErrorKind::InvalidArgument, "coefficient vector length must equal prior rank");
    std::vector<double> out(mean_);
    for (std::size_t j = 0; j < rank_; ++j) simd::axpy(out, u[j], column(j), out);
    return LatentVideo(dims_, std::move(out));
}

std::vector<double> LinearGaussianPrior::off_manifold(const LatentVideo& z) const {
    if (z.dims() != dims_) fail(ErrorKind::InvalidArgument, "video shape does not match prior");
    const std::size_t k = rank_;
    std::vector<double> centered(size());
    simd::axpy(z.data(), -1.0, mean_, centered);

    Eigen::VectorXd proj(k);
    for (std::size_t j = 0; j < k; ++j) proj[static_cast<Eigen::Index>(j)] = simd::dot(column(j), centered);
    Eigen::LLT<Eigen::MatrixXd> llt(as_matrix(gram_, k));
    if (llt.info() != Eigen::Success) fail(ErrorKind::NumericalFailure, "Gram factorization failed");
    const Eigen::VectorXd coef = llt.solve(proj);
    for (std::size_t j = 0; j < k; ++j) {
        simd::axpy(centered, -coef[static_cast<Eigen::Index>(j)], column(j), centered);
    }
    return centered;
}

LatentVideo posterior_mean(const LinearGaussianPrior& prior, const LatentVideo& window, std::size_t window_start,
                           double sigma, const ConditionSpec& cond, double cond_precision) {
    if (!(std::isfinite(sigma) && sigma > 0.0)) fail(ErrorKind::InvalidArgument, "posterior mean needs sigma > 0");
    if (!(std::isfinite(cond_precision) && cond_precision >= 0.0)) {
        fail(ErrorKind::InvalidArgument, "condition precision must be finite and non-negative");
    }
    const Dims& wd = window.dims();
    const Dims& pd = prior.dims();
    if (!wd.same_frame_shape(pd)) fail(ErrorKind::InvalidArgument, "window shape does not match prior");
    if (window_start + wd.frames > pd.frames) {
        fail(ErrorKind::InvalidArgument, "window [" + std::to_string(window_start) + ", " +
                                             std::to_string(window_start + wd.frames) + ") exceeds prior length " +
                                             std::to_string(pd.frames));
    }
    cond.validate(wd);

    const std::size_t k = prior.rank();
    const std::size_t block = wd.frames * wd.plane();
    const double obs_precision = 1.0 / (sigma * sigma);

    Eigen::MatrixXd lambda = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));

    std::vector<double> window_gram(k * k, 0.0);
    for (std::size_t t = window_start; t < window_start + wd.frames; ++t) {
        simd::accumulate(window_gram, prior.frame_gram(t));
    }
    lambda += obs_precision * as_matrix(window_gram, k);

    std::vector<double> centered(block);
    for (std::size_t ch = 0; ch < wd.channels; ++ch) {
        const auto z_block = window.data().subspan(ch * block, block);
        simd::axpy(z_block, -1.0, prior.mean_block(ch, window_start, wd.frames), centered);
        for (std::size_t j = 0; j < k; ++j) {
            rhs[static_cast<Eigen::Index>(j)] +=
                obs_precision * simd::dot(prior.column_block(j, ch, window_start, wd.frames), centered);
        }
    }

    if (cond.keyframe && cond_precision > 0.0) {
        const std::size_t ct = window_start + cond.offset_in_window;
        lambda += cond_precision * as_matrix(prior.frame_gram(ct), k);
        std::vector<double> y_centered(wd.plane());
        for (std::size_t ch = 0; ch < wd.channels; ++ch) {
            simd::axpy(cond.keyframe->plane(ch, 0), -1.0, prior.mean_block(ch, ct), y_centered);
            for (std::size_t j = 0; j < k; ++j) {
                rhs[static_cast<Eigen::Index>(j)] +=
                    cond_precision * simd::dot(prior.column_block(j, ch, ct), y_centered);
            }
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(lambda);
    if (llt.info() != Eigen::Success) fail(ErrorKind::NumericalFailure, "posterior precision not positive definite");
    const Eigen::VectorXd u = llt.solve(rhs);
    if (!u.allFinite()) fail(ErrorKind::NumericalFailure, "posterior solve produced non-finite coefficients");

    std::vector<double> out(wd.count());
    for (std::size_t ch = 0; ch < wd.channels; ++ch) {
        std::span<double> dst(out.data() + ch * block, block);
        const auto mean = prior.mean_block(ch, window_start, wd.frames);
        std::copy(mean.begin(), mean.end(), dst.begin());
        for (std::size_t j = 0; j < k; ++j) {
            simd::axpy(dst, u[static_cast<Eigen::Index>(j)], prior.column_block(j, ch, window_start, wd.frames), dst);
        }
    }
    return LatentVideo(wd, std::move(out));
}

AnalyticDenoiser::AnalyticDenoiser(std::shared_ptr<const LinearGaussianPrior> prior, std::size_t capability,
                                   double cond_precision)
    : prior_(std::move(prior)), capability_(capability), cond_precision_(cond_precision) {
    if (!prior_) fail(ErrorKind::InvalidArgument, "analytic denoiser needs a prior");
    if (capability_ == 0) fail(ErrorKind::InvalidArgument, "denoiser capability must be positive");
    if (!(std::isfinite(cond_precision_) && cond_precision_ >= 0.0)) {
        fail(ErrorKind::InvalidArgument, "condition precision must be finite and non-negative");
    }
}

LatentVideo AnalyticDenoiser::denoise(const LatentVideo& window, double sigma, const ConditionSpec& cond) const {
    return posterior_mean(*prior_, window, cond.window_start, sigma, cond, cond_precision_);
}

LatentVideo AnalyticDenoiser::step(const LatentVideo& window, double sigma_from, double sigma_to,
                                   const ConditionSpec& cond) const {
    return euler_update(window, denoise(window, sigma_from, cond), sigma_from, sigma_to);
}

}  // namespace dslide
