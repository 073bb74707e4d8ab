#include "diffuseslide/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/simd/kernels.hpp"

namespace dslide {
namespace {

std::vector<double> gaussian_kernel() {
    std::vector<double> k(kSsimWindow);
    const double center = static_cast<double>(kSsimWindow / 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < kSsimWindow; ++i) {
        const double x = static_cast<double>(i) - center;
        k[i] = std::exp(-(x * x) / (2.0 * kSsimSigma * kSsimSigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

std::vector<double> clamped(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x = std::clamp(x, 0.0, 1.0);
    return out;
}

// Clamped pixels of frame t (all channels).
std::vector<double> frame_pixels(const LatentVideo& v, std::size_t t) {
    std::vector<double> out;
    out.reserve(v.dims().channels * v.dims().plane());
    for (std::size_t ch = 0; ch < v.dims().channels; ++ch) {
        const auto p = clamped(v.plane(ch, t));
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

double psnr(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) fail(ErrorKind::InvalidArgument, "psnr inputs must have equal, non-zero size");
    const double mse = simd::sq_dist(a, b) / static_cast<double>(a.size());
    if (!std::isfinite(mse)) fail(ErrorKind::InvalidArgument, "psnr inputs must be finite");
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b) {
    if (a.height != b.height || a.width != b.width) fail(ErrorKind::InvalidArgument, "ssim images differ in shape");
    if (a.height < kSsimWindow || a.width < kSsimWindow) {
        fail(ErrorKind::InvalidArgument, "ssim needs images of at least 11x11 pixels");
    }
    if (a.pixels.size() != a.height * a.width || b.pixels.size() != a.pixels.size()) {
        fail(ErrorKind::InvalidArgument, "ssim pixel buffer does not match shape");
    }
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    static const std::vector<double> kernel = gaussian_kernel();

    const std::size_t out_h = a.height - kSsimWindow + 1;
    const std::size_t out_w = a.width - kSsimWindow + 1;
    double total = 0.0;
    for (std::size_t oy = 0; oy < out_h; ++oy) {
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (std::size_t ky = 0; ky < kSsimWindow; ++ky) {
                for (std::size_t kx = 0; kx < kSsimWindow; ++kx) {
                    const double w = kernel[ky] * kernel[kx];
                    const std::size_t idx = (oy + ky) * a.width + ox + kx;
                    const double pa = a.pixels[idx];
                    const double pb = b.pixels[idx];
                    mu_a += w * pa;
                    mu_b += w * pb;
                    aa += w * pa * pa;
                    bb += w * pb * pb;
                    ab += w * (pa * pb);
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        }
    }
    return total / static_cast<double>(out_h * out_w);
}

Image render_plane(std::span<const double> plane, std::size_t height, std::size_t width, std::size_t min_side) {
    if (plane.size() != height * width) fail(ErrorKind::InvalidArgument, "plane size does not match shape");
    const std::size_t side = std::min(height, width);
    const std::size_t scale = side >= min_side ? 1 : (min_side + side - 1) / side;
    Image img{height * scale, width * scale, {}};
    img.pixels.resize(img.height * img.width);
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            img.pixels[y * img.width + x] = std::clamp(plane[(y / scale) * width + x / scale], 0.0, 1.0);
        }
    }
    return img;
}

KeyframeMetrics keyframe_metrics(const LatentVideo& low, const LatentVideo& high, const KeyframePlan& plan) {
    plan.validate();
    if (low.frames() != plan.n_keyframes || high.frames() != plan.total_frames() ||
        !low.dims().same_frame_shape(high.dims())) {
        fail(ErrorKind::InvalidArgument, "keyframe metrics need f keyframes and r*f high frame-rate frames of equal shape");
    }
    const Dims& d = low.dims();
    KeyframeMetrics m;
    for (std::size_t i = 0; i < plan.n_keyframes; ++i) {
        const std::size_t t = plan.keyframe_index(i);
        m.per_frame_psnr.push_back(psnr(frame_pixels(low, i), frame_pixels(high, t)));
        double s = 0.0;
        for (std::size_t ch = 0; ch < d.channels; ++ch) {
            s += ssim(render_plane(low.plane(ch, i), d.height, d.width),
                      render_plane(high.plane(ch, t), d.height, d.width));
        }
        m.per_frame_ssim.push_back(s / static_cast<double>(d.channels));
    }
    m.psnr = mean_of(m.per_frame_psnr);
    m.ssim = mean_of(m.per_frame_ssim);
    return m;
}

TruthMetrics truth_metrics(const LatentVideo& high, const LatentVideo& truth) {
    if (high.dims() != truth.dims()) fail(ErrorKind::InvalidArgument, "ground truth shape mismatch");
    TruthMetrics m;
    std::vector<double> all_high, all_truth;
    for (std::size_t t = 0; t < high.frames(); ++t) {
        const auto ph = frame_pixels(high, t);
        const auto pt = frame_pixels(truth, t);
        m.per_frame_psnr.push_back(psnr(ph, pt));
        all_high.insert(all_high.end(), ph.begin(), ph.end());
        all_truth.insert(all_truth.end(), pt.begin(), pt.end());
    }
    m.psnr = psnr(all_high, all_truth);
    return m;
}

double manifold_residual(const LatentVideo& z, const LinearGaussianPrior& prior) {
    const auto off = prior.off_manifold(z);
    return std::sqrt(simd::dot(off, off) / static_cast<double>(off.size()));
}

MetricReport evaluate(const LatentVideo& low, const LatentVideo& high, std::size_t factor,
                      const LinearGaussianPrior& prior, const LatentVideo* truth) {
    const KeyframeMetrics km = keyframe_metrics(low, high, KeyframePlan{factor, low.frames()});
    MetricReport r;
    r.psnr_keyframes = km.psnr;
    r.ssim_keyframes = km.ssim;
    r.per_frame_psnr_keyframes = km.per_frame_psnr;
    r.per_frame_ssim_keyframes = km.per_frame_ssim;
    r.manifold_residual = manifold_residual(high, prior);
    if (truth) {
        const TruthMetrics tm = truth_metrics(high, *truth);
        r.psnr_vs_truth = tm.psnr;
        r.per_frame_psnr_vs_truth = tm.per_frame_psnr;
    }
    return r;
}

}  // namespace dslide
