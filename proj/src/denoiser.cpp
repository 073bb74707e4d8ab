#include "diffuseslide/denoiser.hpp"

#include <cmath>
#include <string>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/simd/kernels.hpp"

namespace dslide {

void ConditionSpec::validate(const Dims& window) const {
    if (offset_in_window >= window.frames) {
        fail(ErrorKind::InvalidArgument, "condition offset " + std::to_string(offset_in_window) +
                                             " outside window of " + std::to_string(window.frames) + " frames");
    }
    if (keyframe) {
        const Dims& k = keyframe->dims();
        if (k.frames != 1 || !k.same_frame_shape(window)) {
            fail(ErrorKind::InvalidArgument, "condition keyframe shape does not match window");
        }
    }
}

LatentVideo euler_update(const LatentVideo& z, const LatentVideo& denoised, double sigma_from, double sigma_to) {
    if (z.dims() != denoised.dims()) fail(ErrorKind::InvalidArgument, "denoised estimate shape mismatch");
    if (sigma_to == 0.0) return denoised;
    const double c = (sigma_to - sigma_from) / sigma_from;
    std::vector<double> out(z.dims().count());
    simd::euler(z.data(), denoised.data(), c, out);
    return LatentVideo(z.dims(), std::move(out));
}

LatentVideo euler_step(const Denoiser& denoiser, const LatentVideo& window, double sigma_from, double sigma_to,
                       const ConditionSpec& cond) {
    if (!(std::isfinite(sigma_from) && std::isfinite(sigma_to) && sigma_from > sigma_to && sigma_to >= 0.0)) {
        fail(ErrorKind::InvalidArgument, "euler step requires sigma_from > sigma_to >= 0");
    }
    if (window.frames() > denoiser.capability()) {
        fail(ErrorKind::WindowTooLong, "window of " + std::to_string(window.frames()) +
                                           " frames exceeds denoiser capability " +
                                           std::to_string(denoiser.capability()));
    }
    if (!window.dims().same_frame_shape(denoiser.frame_shape())) {
        fail(ErrorKind::InvalidArgument, "window shape does not match denoiser latent shape");
    }
    cond.validate(window.dims());
    LatentVideo out = denoiser.step(window, sigma_from, sigma_to, cond);
    if (out.dims() != window.dims()) fail(ErrorKind::InvalidState, "denoiser returned a different shape");
    return out;
}

LatentVideo sample_clean(const Denoiser& denoiser, const SigmaSchedule& schedule, std::size_t frames,
                         const ConditionSpec& cond, const NoiseSeed& seed) {
    if (frames == 0) fail(ErrorKind::InvalidArgument, "cannot sample an empty video");
    if (frames > denoiser.capability()) {
        fail(ErrorKind::WindowTooLong, "requested " + std::to_string(frames) + " frames, capability is " +
                                           std::to_string(denoiser.capability()));
    }
    const Dims dims = denoiser.frame_shape().with_frames(frames);
    LatentVideo z = inject_noise(LatentVideo::zeros(dims), schedule.sigma_max(),
                                 seed.with(seed.step, seed.iteration, NoisePurpose::Sampling));
    const auto sigmas = schedule.sigmas();
    for (std::size_t i = 0; i + 1 < sigmas.size(); ++i) {
        z = euler_step(denoiser, z, sigmas[i], sigmas[i + 1], cond);
    }
    return z;
}

}  // namespace dslide
