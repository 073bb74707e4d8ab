#pragma once

#include <cstddef>
#include <vector>

#include "diffuseslide/denoiser.hpp"
#include "diffuseslide/latent.hpp"

namespace dslide {

struct Window {
    std::size_t start = 0;
    std::size_t width = 0;
    // Placed at F - width to cover the tail rather than at a keyframe.
    bool clamped = false;
    ConditionSpec condition;

    std::size_t end() const noexcept { return start + width; }
};

/// Keyframe-anchored windows over an F-frame latent plus per-frame coverage.
struct WindowLayout {
    std::vector<Window> windows;
    std::size_t stride = 1;
    std::size_t total_frames = 0;
    std::vector<std::size_t> coverage;

    std::size_t width() const noexcept { return windows.empty() ? 0 : windows.front().width; }

    // Copies each window's condition keyframe out of the low frame-rate
    // keyframe latent. Windows whose condition is left unbound stay
    // unconditioned.
    void bind_keyframes(const LatentVideo& keyframes);
};

// Window i starts at i * stride for as long as it fits; one window clamped to
// F - width closes any uncovered tail. Each window is conditioned on the first
// keyframe at or after its start.
WindowLayout plan_windows(std::size_t total_frames, const KeyframePlan& plan, std::size_t width, std::size_t stride);

struct RoundOptions {
    std::size_t threads = 1;
    // Order in which windows are dispatched; empty means ascending. Fusion
    // always accumulates in ascending window order regardless.
    std::vector<std::size_t> execution_order;
};

struct RoundStats {
    std::vector<double> window_ms;
};

// Advances every window one solver step and fuses overlaps by per-frame mean.
LatentVideo denoise_round(const WindowLayout& layout, const LatentVideo& z, const Denoiser& denoiser,
                          double sigma_from, double sigma_to, const RoundOptions& options = {},
                          RoundStats* stats = nullptr);

// Per-frame mean of window estimates, accumulated in ascending window order.
LatentVideo fuse_windows(const WindowLayout& layout, const Dims& dims, const std::vector<LatentVideo>& estimates);

}  // namespace dslide
