#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "diffuseslide/denoiser.hpp"
#include "diffuseslide/latent.hpp"
#include "diffuseslide/schedule.hpp"
#include "diffuseslide/sliding_window.hpp"

namespace dslide {

/// Hyperparameters of one high frame-rate run. Defaults are the 4x setting
/// for a 14-frame, 25-step base model.
struct RunConfig {
    std::size_t steps = 25;
    double sigma_min = 0.002;
    double sigma_max = 700.0;
    double rho = 7.0;
    std::size_t tau = 8;
    std::size_t delta = 3;
    std::size_t m_iters = 5;
    std::size_t factor = 4;
    std::size_t window = 0;  // 0: min(denoiser capability, F)
    std::size_t stride = 0;  // 0: factor
    std::uint64_t seed = 0;
    std::string denoiser = "analytic";  // or host:port of a remote server
    double cond_precision = 1e8;
    std::size_t threads = 1;
    int remote_timeout_ms = 5000;
    std::size_t remote_pool = 1;

    void validate() const;
    SigmaSchedule schedule() const { return SigmaSchedule::build(steps, sigma_min, sigma_max, rho); }
    InjectionPoint injection() const { return InjectionPoint{tau, delta, m_iters}; }
};

struct StepRecord {
    std::size_t remaining = 0;
    double sigma_from = 0.0;
    double sigma_to = 0.0;
    std::size_t reinjection_iterations = 0;
    std::size_t denoise_rounds = 0;
    std::size_t denoiser_calls = 0;
    // Summed over the step's rounds, indexed by window.
    std::vector<double> window_ms;
};

struct RunTrace {
    std::vector<StepRecord> steps;
    std::size_t total_denoise_rounds = 0;
    std::size_t total_denoiser_calls = 0;
    std::size_t windows = 0;
    bool completed = false;
    double wall_ms = 0.0;
};

// Called with the latent right after re-injection iteration m (0-based) added its noise.
using ReinjectObserver = std::function<void(std::size_t iteration, const LatentVideo& z)>;

// m_iters x [denoise sigma_tau -> sigma_{tau-1}, re-add noise back to sigma_tau]
// followed by one final denoise round. Output is at level_at(remaining - 1).
LatentVideo reinject_round(const LatentVideo& z, const WindowLayout& layout, const Denoiser& denoiser,
                           const SigmaSchedule& schedule, std::size_t remaining, std::size_t m_iters,
                           const NoiseSeed& seed, const RoundOptions& options = {}, StepRecord* record = nullptr,
                           const ReinjectObserver& observer = {});

// Layout used by a run over `keyframes` with the given config and denoiser.
WindowLayout run_layout(const LatentVideo& keyframes, const RunConfig& cfg, const Denoiser& denoiser);

struct RunResult {
    LatentVideo output;
    RunTrace trace;
};

// Interpolate, inject noise at level_at(tau), then step down to level 0 with
// re-injection while remaining > delta. `trace` holds the completed steps
// even if a round throws.
LatentVideo diffuse_slide(const LatentVideo& keyframes, const RunConfig& cfg, const Denoiser& denoiser,
                          RunTrace& trace);
RunResult diffuse_slide(const LatentVideo& keyframes, const RunConfig& cfg, const Denoiser& denoiser);

// Closed-form round count for a config.
std::size_t expected_denoise_rounds(std::size_t tau, std::size_t delta, std::size_t m_iters);

// Low frame-rate keyframe latent sampled from scratch, conditioned on `first_frame` at frame 0.
LatentVideo generate_keyframes(const RunConfig& cfg, const Denoiser& denoiser, const LatentVideo& first_frame,
                               std::size_t n_keyframes, const NoiseSeed& seed);

// Baseline that samples all F = factor * f frames from pure noise with only
// the first keyframe as condition (no interpolation, no other keyframes).
// Windows follow run_layout(); every window but the first is unconditioned.
LatentVideo direct_inference(const LatentVideo& keyframes, const RunConfig& cfg, const Denoiser& denoiser);

}  // namespace dslide
