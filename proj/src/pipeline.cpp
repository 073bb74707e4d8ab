#include "diffuseslide/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "diffuseslide/errors.hpp"

namespace dslide {

void RunConfig::validate() const {
    if (steps < 2) fail(ErrorKind::InvalidArgument, "steps must be >= 2");
    injection().validate(steps);
    if (factor < 1) fail(ErrorKind::InvalidArgument, "factor must be >= 1");
    if (!(cond_precision >= 0.0)) fail(ErrorKind::InvalidArgument, "cond_precision must be >= 0");
    if (threads < 1) fail(ErrorKind::InvalidArgument, "threads must be >= 1");
    if (remote_pool < 1) fail(ErrorKind::InvalidArgument, "remote_pool must be >= 1");
    if (remote_timeout_ms <= 0) fail(ErrorKind::InvalidArgument, "remote_timeout_ms must be positive");
    (void)schedule();
}

std::size_t expected_denoise_rounds(std::size_t tau, std::size_t delta, std::size_t m_iters) {
    if (tau <= delta) return tau;
    return (tau - delta) * (m_iters + 1) + delta;
}

LatentVideo reinject_round(const LatentVideo& z, const WindowLayout& layout, const Denoiser& denoiser,
                           const SigmaSchedule& schedule, std::size_t remaining, std::size_t m_iters,
                           const NoiseSeed& seed, const RoundOptions& options, StepRecord* record,
                           const ReinjectObserver& observer) {
    if (remaining == 0) fail(ErrorKind::InvalidArgument, "re-injection round needs remaining >= 1");
    const double sigma_from = schedule.level_at(remaining);
    const double sigma_to = schedule.level_at(remaining - 1);
    const double renoise = reinjection_std(sigma_from, sigma_to);

    if (record) {
        record->remaining = remaining;
        record->sigma_from = sigma_from;
        record->sigma_to = sigma_to;
        record->window_ms.assign(layout.windows.size(), 0.0);
    }
    auto run_round = [&](const LatentVideo& in) {
        RoundStats stats;
        LatentVideo out = denoise_round(layout, in, denoiser, sigma_from, sigma_to, options, &stats);
        if (record) {
            ++record->denoise_rounds;
            record->denoiser_calls += layout.windows.size();
            for (std::size_t i = 0; i < stats.window_ms.size(); ++i) record->window_ms[i] += stats.window_ms[i];
        }
        return out;
    };

    LatentVideo current = z;
    for (std::size_t m = 0; m < m_iters; ++m) {
        const LatentVideo denoised = run_round(current);
        current = inject_noise(denoised, renoise, seed.with(remaining, m, NoisePurpose::Reinjection));
        if (record) ++record->reinjection_iterations;
        if (observer) observer(m, current);
    }
    return run_round(current);
}

WindowLayout run_layout(const LatentVideo& keyframes, const RunConfig& cfg, const Denoiser& denoiser) {
    const KeyframePlan plan{cfg.factor, keyframes.frames()};
    const std::size_t total = plan.total_frames();
    const std::size_t width = cfg.window ? cfg.window : std::min(denoiser.capability(), total);
    const std::size_t stride = cfg.stride ? cfg.stride : cfg.factor;
    if (width > denoiser.capability()) {
        fail(ErrorKind::WindowTooLong, "window width " + std::to_string(width) + " exceeds denoiser capability " +
                                           std::to_string(denoiser.capability()));
    }
    WindowLayout layout = plan_windows(total, plan, width, stride);
    layout.bind_keyframes(keyframes);
    return layout;
}

LatentVideo diffuse_slide(const LatentVideo& keyframes, const RunConfig& cfg, const Denoiser& denoiser,
                          RunTrace& trace) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    trace = RunTrace{};
    const SigmaSchedule schedule = cfg.schedule();
    const WindowLayout layout = run_layout(keyframes, cfg, denoiser);
    trace.windows = layout.windows.size();

    const RoundOptions options{cfg.threads, {}};
    const NoiseSeed seed{cfg.seed};

    LatentVideo z = interpolate(keyframes, cfg.factor);
    z = inject_noise(z, schedule.level_at(cfg.tau), seed.with(cfg.tau, 0, NoisePurpose::Injection));

    for (std::size_t remaining = cfg.tau; remaining >= 1; --remaining) {
        const std::size_t iters = remaining > cfg.delta ? cfg.m_iters : 0;
        StepRecord record;
        try {
            z = reinject_round(z, layout, denoiser, schedule, remaining, iters, seed, options, &record);
        } catch (const Error& e) {
            trace.steps.push_back(record);
            throw e.with_context("step with " + std::to_string(remaining) + " remaining");
        }
        trace.total_denoise_rounds += record.denoise_rounds;
        trace.total_denoiser_calls += record.denoiser_calls;
        trace.steps.push_back(std::move(record));
    }
    trace.completed = true;
    trace.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return z;
}

RunResult diffuse_slide(const LatentVideo& keyframes, const RunConfig& cfg, const Denoiser& denoiser) {
    RunResult result;
    result.output = diffuse_slide(keyframes, cfg, denoiser, result.trace);
    return result;
}

LatentVideo generate_keyframes(const RunConfig& cfg, const Denoiser& denoiser, const LatentVideo& first_frame,
                               std::size_t n_keyframes, const NoiseSeed& seed) {
    cfg.validate();
    ConditionSpec cond;
    cond.keyframe = first_frame;
    return sample_clean(denoiser, cfg.schedule(), n_keyframes, cond, seed);
}

LatentVideo direct_inference(const LatentVideo& keyframes, const RunConfig& cfg, const Denoiser& denoiser) {
    cfg.validate();
    const SigmaSchedule schedule = cfg.schedule();
    WindowLayout layout = run_layout(keyframes, cfg, denoiser);
    for (std::size_t i = 1; i < layout.windows.size(); ++i) layout.windows[i].condition.keyframe.reset();
    // The first window starts at frame 0, where the first keyframe sits.
    layout.windows.front().condition.keyframe = keyframes.frame(0);
    layout.windows.front().condition.offset_in_window = 0;

    const Dims dims = keyframes.dims().with_frames(cfg.factor * keyframes.frames());
    LatentVideo z = inject_noise(LatentVideo::zeros(dims), schedule.sigma_max(),
                                 NoiseSeed{cfg.seed}.with(0, 0, NoisePurpose::Sampling));
    const RoundOptions options{cfg.threads, {}};
    const auto sigmas = schedule.sigmas();
    for (std::size_t i = 0; i + 1 < sigmas.size(); ++i) {
        z = denoise_round(layout, z, denoiser, sigmas[i], sigmas[i + 1], options);
    }
    return z;
}

}  // namespace dslide
