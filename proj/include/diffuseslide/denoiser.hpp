#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "diffuseslide/latent.hpp"
#include "diffuseslide/schedule.hpp"

namespace dslide {

/// Keyframe condition attached to one window.
///
/// `keyframe` is a single-frame latent (c x 1 x h x w); when empty the window
/// is denoised unconditionally. `offset_in_window` is the frame inside the
/// window the keyframe is tied to, and `window_start` the window's absolute
/// first frame (analytic denoisers need it to pick prior rows; model-backed
/// ones may ignore it). `metadata` is passed through opaquely.
struct ConditionSpec {
    std::optional<LatentVideo> keyframe;
    std::size_t keyframe_ordinal = 0;
    std::size_t offset_in_window = 0;
    std::size_t window_start = 0;
    std::map<std::string, std::string> metadata;

    void validate(const Dims& window) const;
};

enum class DenoiserKind { Analytic, Remote };

/// A denoiser advances a noisy window by one solver step.
///
/// Implementations are immutable after construction and must tolerate
/// concurrent `step` calls on distinct windows.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    // Longest window (in frames) accepted.
    virtual std::size_t capability() const = 0;
    // Channels/height/width of accepted latents; `frames` is 1.
    virtual Dims frame_shape() const = 0;
    virtual DenoiserKind kind() const = 0;

    // Window moved from level sigma_from to sigma_to. Callers go through
    // euler_step(), which validates arguments first.
    virtual LatentVideo step(const LatentVideo& window, double sigma_from, double sigma_to,
                             const ConditionSpec& cond) const = 0;
};

// First-order VE probability-flow update z + (to - from) * (z - denoised) / from.
// Returns `denoised` itself when sigma_to == 0.
LatentVideo euler_update(const LatentVideo& z, const LatentVideo& denoised, double sigma_from, double sigma_to);

LatentVideo euler_step(const Denoiser& denoiser, const LatentVideo& window, double sigma_from, double sigma_to,
                       const ConditionSpec& cond);

// Full reverse diffusion from sigma_max * eps down to level 0.
LatentVideo sample_clean(const Denoiser& denoiser, const SigmaSchedule& schedule, std::size_t frames,
                         const ConditionSpec& cond, const NoiseSeed& seed);

}  // namespace dslide
