#include "diffuseslide/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "diffuseslide/errors.hpp"

namespace dslide {
namespace {

// Distinct spatial frequencies strictly below Nyquist, one per (p, q) / (-p, -q) pair,
// ordered from coarse to fine.
std::vector<std::pair<int, int>> spatial_frequencies(std::size_t height, std::size_t width) {
    const int pmax = static_cast<int>((width - 1) / 2);
    const int qmax = static_cast<int>((height - 1) / 2);
    std::vector<std::pair<int, int>> out;
    for (int p = 0; p <= pmax; ++p) {
        for (int q = -qmax; q <= qmax; ++q) {
            if (p == 0 && q <= 0) continue;
            out.emplace_back(p, q);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::abs(a.first) + std::abs(a.second) < std::abs(b.first) + std::abs(b.second);
    });
    return out;
}

}  // namespace

void CorpusSpec::validate() const {
    if (n_videos == 0 || channels == 0 || height == 0 || width == 0 || keyframes == 0 || factor == 0 || rank == 0) {
        fail(ErrorKind::InvalidArgument, "corpus dimensions must be positive");
    }
    if (!(amplitude > 0.0 && std::isfinite(amplitude))) fail(ErrorKind::InvalidArgument, "amplitude must be positive");
    if (!(omega_min <= omega_max)) fail(ErrorKind::InvalidArgument, "omega_min must not exceed omega_max");
}

std::vector<Grating> grating_parameters(const CorpusSpec& spec) {
    spec.validate();
    const auto freqs = spatial_frequencies(spec.height, spec.width);
    if (spec.rank > freqs.size()) {
        fail(ErrorKind::ConstructionFailure, "rank " + std::to_string(spec.rank) + " exceeds the " +
                                                 std::to_string(freqs.size()) +
                                                 " spatial frequencies representable on the grid");
    }
    std::vector<double> omegas(spec.rank);
    std::vector<double> phases(spec.rank);
    const NoiseSeed base{spec.seed};
    fill_uniform(base.with(0, 0, NoisePurpose::BasisParameters), spec.omega_min, spec.omega_max, omegas);
    fill_uniform(base.with(1, 0, NoisePurpose::BasisParameters), 0.0, 2.0 * std::numbers::pi, phases);

    std::vector<Grating> out(spec.rank);
    for (std::size_t j = 0; j < spec.rank; ++j) {
        out[j] = Grating{freqs[j].first, freqs[j].second, omegas[j], phases[j]};
    }
    return out;
}

LinearGaussianPrior build_prior(const CorpusSpec& spec) {
    const auto gratings = grating_parameters(spec);
    const Dims dims = spec.full_dims();
    const std::size_t d = dims.count();
    std::vector<double> basis(spec.rank * d);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t j = 0; j < spec.rank; ++j) {
        const Grating& g = gratings[j];
        double* col = basis.data() + j * d;
        for (std::size_t ch = 0; ch < dims.channels; ++ch) {
            // Channels share the grating with a fixed phase offset.
            const double channel_phase = static_cast<double>(ch) * std::numbers::pi / 3.0;
            for (std::size_t t = 0; t < dims.frames; ++t) {
                for (std::size_t y = 0; y < dims.height; ++y) {
                    for (std::size_t x = 0; x < dims.width; ++x) {
                        const double arg = two_pi * (g.p * static_cast<double>(x) / static_cast<double>(dims.width) +
                                                     g.q * static_cast<double>(y) / static_cast<double>(dims.height)) +
                                           g.omega * static_cast<double>(t) + g.phase + channel_phase;
                        col[((ch * dims.frames + t) * dims.height + y) * dims.width + x] =
                            spec.amplitude * std::cos(arg);
                    }
                }
            }
        }
    }
    return LinearGaussianPrior(dims, std::move(basis), std::vector<double>(d, 0.5));
}

LatentVideo subsample(const LatentVideo& high, std::size_t factor) {
    if (factor == 0 || high.frames() % factor != 0) {
        fail(ErrorKind::InvalidArgument, "frame count must be a multiple of the factor");
    }
    const std::size_t f = high.frames() / factor;
    LatentVideo low = LatentVideo::zeros(high.dims().with_frames(f));
    for (std::size_t ch = 0; ch < high.dims().channels; ++ch) {
        for (std::size_t i = 0; i < f; ++i) {
            std::ranges::copy(high.plane(ch, i * factor), low.plane(ch, i).begin());
        }
    }
    return low;
}

LinearGaussianPrior subsample_prior(const LinearGaussianPrior& prior, std::size_t factor) {
    const Dims dims = prior.dims();
    const LatentVideo mean(dims, std::vector<double>(prior.mean().begin(), prior.mean().end()));
    const LatentVideo low_mean = subsample(mean, factor);
    const std::size_t d = low_mean.dims().count();
    std::vector<double> basis(prior.rank() * d);
    for (std::size_t j = 0; j < prior.rank(); ++j) {
        const auto col = prior.column(j);
        const LatentVideo low = subsample(LatentVideo(dims, {col.begin(), col.end()}), factor);
        std::ranges::copy(low.data(), basis.begin() + static_cast<std::ptrdiff_t>(j * d));
    }
    return LinearGaussianPrior(low_mean.dims(), std::move(basis),
                               std::vector<double>(low_mean.data().begin(), low_mean.data().end()));
}

CorpusPair sample_pair(const LinearGaussianPrior& prior, const CorpusSpec& spec, std::size_t index) {
    if (index >= spec.n_videos) {
        fail(ErrorKind::InvalidArgument, "corpus index " + std::to_string(index) + " out of range");
    }
    if (prior.dims() != spec.full_dims()) fail(ErrorKind::InvalidArgument, "prior does not match corpus spec");
    CorpusPair pair;
    pair.coefficients.resize(prior.rank());
    fill_standard_normal(NoiseSeed{spec.seed}.with(index, 0, NoisePurpose::CorpusCoefficients), pair.coefficients);
    pair.truth_high = prior.compose(pair.coefficients);
    pair.low = subsample(pair.truth_high, spec.factor);
    return pair;
}

}  // namespace dslide
