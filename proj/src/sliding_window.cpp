#include "diffuseslide/sliding_window.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/simd/kernels.hpp"

namespace dslide {
namespace {

// First keyframe inside [start, start + width), if any.
bool find_condition(const KeyframePlan& plan, std::size_t start, std::size_t width, std::size_t& ordinal) {
    for (std::size_t i = 0; i < plan.n_keyframes; ++i) {
        const std::size_t idx = plan.keyframe_index(i);
        if (idx >= start && idx < start + width) {
            ordinal = i;
            return true;
        }
    }
    return false;
}

Window make_window(const KeyframePlan& plan, std::size_t start, std::size_t width, bool clamped) {
    std::size_t ordinal = 0;
    if (!find_condition(plan, start, width, ordinal)) {
        fail(ErrorKind::InvalidArgument, "window at frame " + std::to_string(start) + " contains no keyframe");
    }
    Window w;
    w.start = start;
    w.width = width;
    w.clamped = clamped;
    w.condition.keyframe_ordinal = ordinal;
    w.condition.offset_in_window = plan.keyframe_index(ordinal) - start;
    w.condition.window_start = start;
    return w;
}

}  // namespace

void WindowLayout::bind_keyframes(const LatentVideo& keyframes) {
    for (auto& w : windows) {
        if (w.condition.keyframe_ordinal >= keyframes.frames()) {
            fail(ErrorKind::InvalidArgument, "window refers to keyframe " + std::to_string(w.condition.keyframe_ordinal) +
                                                 " but only " + std::to_string(keyframes.frames()) + " exist");
        }
        w.condition.keyframe = keyframes.frame(w.condition.keyframe_ordinal);
    }
}

WindowLayout plan_windows(std::size_t total_frames, const KeyframePlan& plan, std::size_t width, std::size_t stride) {
    plan.validate();
    if (width == 0 || width > total_frames) {
        fail(ErrorKind::InvalidArgument, "window width " + std::to_string(width) + " must be in [1, " +
                                             std::to_string(total_frames) + "]");
    }
    if (stride == 0 || stride > width) {
        fail(ErrorKind::InvalidArgument, "stride must be in [1, width] or frames go uncovered");
    }
    if (plan.keyframe_index(plan.n_keyframes - 1) >= total_frames) {
        fail(ErrorKind::InvalidArgument, "keyframe indices exceed the video length");
    }

    WindowLayout layout;
    layout.stride = stride;
    layout.total_frames = total_frames;
    for (std::size_t start = 0; start + width <= total_frames; start += stride) {
        layout.windows.push_back(make_window(plan, start, width, false));
    }
    if (layout.windows.back().end() < total_frames) {
        layout.windows.push_back(make_window(plan, total_frames - width, width, true));
    }

    layout.coverage.assign(total_frames, 0);
    for (const auto& w : layout.windows) {
        for (std::size_t t = w.start; t < w.end(); ++t) ++layout.coverage[t];
    }
    return layout;
}

LatentVideo fuse_windows(const WindowLayout& layout, const Dims& dims, const std::vector<LatentVideo>& estimates) {
    if (estimates.size() != layout.windows.size()) fail(ErrorKind::InvalidArgument, "one estimate per window required");
    std::vector<double> acc(dims.count(), 0.0);
    const std::size_t p = dims.plane();
    for (std::size_t wi = 0; wi < layout.windows.size(); ++wi) {
        const Window& w = layout.windows[wi];
        const LatentVideo& est = estimates[wi];
        for (std::size_t ch = 0; ch < dims.channels; ++ch) {
            std::span<double> dst(acc.data() + (ch * dims.frames + w.start) * p, w.width * p);
            simd::accumulate(dst, est.data().subspan(ch * w.width * p, w.width * p));
        }
    }
    for (std::size_t ch = 0; ch < dims.channels; ++ch) {
        for (std::size_t t = 0; t < dims.frames; ++t) {
            std::span<double> plane(acc.data() + (ch * dims.frames + t) * p, p);
            simd::divide(plane, static_cast<double>(layout.coverage[t]));
        }
    }
    return LatentVideo(dims, std::move(acc));
}

LatentVideo denoise_round(const WindowLayout& layout, const LatentVideo& z, const Denoiser& denoiser,
                          double sigma_from, double sigma_to, const RoundOptions& options, RoundStats* stats) {
    if (z.frames() != layout.total_frames) {
        fail(ErrorKind::InvalidArgument, "latent has " + std::to_string(z.frames()) + " frames, layout expects " +
                                             std::to_string(layout.total_frames));
    }
    const std::size_t n = layout.windows.size();
    std::vector<std::size_t> order = options.execution_order;
    if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
    } else {
        auto sorted = order;
        std::ranges::sort(sorted);
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] != i || sorted.size() != n) {
                fail(ErrorKind::InvalidArgument, "execution order must be a permutation of the windows");
            }
        }
    }

    std::vector<LatentVideo> estimates(n);
    std::vector<std::exception_ptr> errors(n);
    std::vector<double> timing(n, 0.0);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t slot = next.fetch_add(1); slot < n; slot = next.fetch_add(1)) {
            const std::size_t wi = order[slot];
            const Window& w = layout.windows[wi];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                estimates[wi] = euler_step(denoiser, z.slice_frames(w.start, w.width), sigma_from, sigma_to, w.condition);
            } catch (...) {
                errors[wi] = std::current_exception();
            }
            timing[wi] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, n);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    }

    for (std::size_t wi = 0; wi < n; ++wi) {
        if (!errors[wi]) continue;
        const std::string ctx = "window " + std::to_string(wi);
        try {
            std::rethrow_exception(errors[wi]);
        } catch (const Error& e) {
            throw e.with_context(ctx);
        } catch (const std::exception& e) {
            throw Error(ErrorKind::InvalidState, ctx + ": " + e.what());
        }
    }
    if (stats) stats->window_ms = std::move(timing);
    return fuse_windows(layout, z.dims(), estimates);
}

}  // namespace dslide
