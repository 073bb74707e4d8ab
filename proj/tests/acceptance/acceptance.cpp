// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "diffuseslide/metrics.hpp"
#include "diffuseslide/pipeline.hpp"
#include "diffuseslide/prior.hpp"
#include "diffuseslide/remote/client.hpp"
#include "diffuseslide/remote/server.hpp"
#include "diffuseslide/synthetic.hpp"
#include "fuzz.hpp"
#include "oracles.hpp"

namespace {

using namespace dslide;
namespace fs = std::filesystem;

// Frozen from the 20-seed pilot (minimum keyframe PSNR 99 dB at the metric cap) minus 2 dB.
constexpr double kKeyframePsnrThreshold = 97.0;
constexpr double kKeyframeSsimThreshold = 0.9;
constexpr std::size_t kSeeds = 20;
constexpr std::size_t kRequiredWins = 19;
constexpr double kTableRuntimeLimitS = 60.0;
constexpr double kReinjectionTolerance = 0.03;
constexpr double kFusionTolerance = 1e-12;
constexpr double kScheduleTolerance = 1e-12;
constexpr double kToyResidualLimit = 1e-6;
constexpr double kLoopbackTolerance = 1e-6;
constexpr std::size_t kFuzzCases = 10000;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Toy {
    CorpusSpec spec;
    std::shared_ptr<const LinearGaussianPrior> prior;
    std::shared_ptr<const AnalyticDenoiser> denoiser;
    Toy() : prior(std::make_shared<const LinearGaussianPrior>(build_prior(spec))) {
        denoiser = std::make_shared<const AnalyticDenoiser>(prior, 14, 1e8);
    }
};

const Toy& toy() {
    static const Toy t;
    return t;
}

RunConfig reference_config(std::uint64_t seed) {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.window = 14;
    cfg.stride = 4;
    cfg.threads = 1;
    return cfg;
}

// Shared by the ordering and keyframe criteria.
struct TableRun {
    std::vector<MetricReport> direct, interp, slide;
    double seconds = 0.0;
};

const TableRun& table_run() {
    static const TableRun run = [] {
        TableRun r;
        const Toy& t = toy();
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t s = 0; s < kSeeds; ++s) {
            const CorpusPair pair = sample_pair(*t.prior, t.spec, s);
            const RunConfig cfg = reference_config(s);
            const LatentVideo d = direct_inference(pair.low, cfg, *t.denoiser);
            const LatentVideo li = interpolate(pair.low, cfg.factor);
            const LatentVideo ds = diffuse_slide(pair.low, cfg, *t.denoiser).output;
            r.direct.push_back(evaluate(pair.low, d, cfg.factor, *t.prior, &pair.truth_high));
            r.interp.push_back(evaluate(pair.low, li, cfg.factor, *t.prior, &pair.truth_high));
            r.slide.push_back(evaluate(pair.low, ds, cfg.factor, *t.prior, &pair.truth_high));
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }();
    return run;
}

double mean_residual(const std::vector<MetricReport>& reports) {
    double s = 0.0;
    for (const auto& r : reports) s += r.manifold_residual;
    return s / static_cast<double>(reports.size());
}

Verdict table_ordering() {
    const TableRun& r = table_run();
    const double ds = mean_residual(r.slide);
    const double li = mean_residual(r.interp);
    const double di = mean_residual(r.direct);
    std::size_t wins = 0;
    for (std::size_t s = 0; s < kSeeds; ++s) {
        if (r.slide[s].manifold_residual < r.interp[s].manifold_residual) ++wins;
    }
    const bool pass = ds < li && li < di && wins >= kRequiredWins && r.seconds < kTableRuntimeLimitS;
    return {pass, fmt("residual diffuseslide %.3e < interp %.3e < direct %.3e, wins %zu/%zu, %.2f s single-threaded",
                      ds, li, di, wins, kSeeds, r.seconds)};
}

Verdict keyframe_fidelity() {
    const TableRun& r = table_run();
    double min_psnr = INFINITY, min_ssim = INFINITY;
    for (const auto& m : r.slide) {
        if (!std::isfinite(m.psnr_keyframes)) return {false, "non-finite keyframe PSNR"};
        min_psnr = std::min(min_psnr, m.psnr_keyframes);
        min_ssim = std::min(min_ssim, m.ssim_keyframes);
    }
    return {min_psnr >= kKeyframePsnrThreshold && min_ssim >= kKeyframeSsimThreshold,
            fmt("min PSNR %.2f dB (threshold %.1f), min SSIM %.4f (threshold %.1f)", min_psnr, kKeyframePsnrThreshold,
                min_ssim, kKeyframeSsimThreshold)};
}

Verdict reinjection_level() {
    const Toy& t = toy();
    const RunConfig cfg = reference_config(0);
    const auto schedule = cfg.schedule();
    const std::size_t tau = 8;
    const std::size_t m_iters = 3;
    std::vector<double> sum_sq(m_iters, 0.0);
    std::size_t count = 0;
    for (std::size_t item = 0; item < 3; ++item) {
        const CorpusPair pair = sample_pair(*t.prior, t.spec, item);
        const WindowLayout layout = run_layout(pair.low, cfg, *t.denoiser);
        const LatentVideo z = inject_noise(pair.truth_high, schedule.level_at(tau), NoiseSeed{item});
        reinject_round(z, layout, *t.denoiser, schedule, tau, m_iters, NoiseSeed{100 + item}, {}, nullptr,
                       [&](std::size_t m, const LatentVideo& cur) {
                           for (std::size_t i = 0; i < cur.data().size(); ++i) {
                               const double e = cur.data()[i] - pair.truth_high.data()[i];
                               sum_sq[m] += e * e;
                           }
                       });
        count += pair.truth_high.data().size();
    }
    double worst = 0.0;
    for (double s : sum_sq) {
        worst = std::max(worst, std::abs(std::sqrt(s / static_cast<double>(count)) / schedule.level_at(tau) - 1.0));
    }
    return {count >= 10000 && worst <= kReinjectionTolerance,
            fmt("%zu elements, worst |std/sigma_tau - 1| = %.4f over %zu re-injections", count, worst, m_iters)};
}

Verdict control_flow() {
    const Toy& t = toy();
    const RunResult ref = diffuse_slide(sample_pair(*t.prior, t.spec, 0).low, reference_config(0), *t.denoiser);
    bool pass = ref.trace.total_denoise_rounds == 33;

    std::mt19937_64 rng(5);
    const auto prior = testing::scalar_prior(12);
    const AnalyticDenoiser den(prior, 6, 1e4);
    const LatentVideo low = testing::random_latent(Dims{1, 4, 1, 1}, 1);
    std::size_t trials = 0, ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        RunConfig cfg;
        cfg.steps = 4 + rng() % 20;
        cfg.tau = 1 + rng() % cfg.steps;
        cfg.delta = rng() % cfg.tau;
        cfg.m_iters = rng() % 6;
        cfg.factor = 3;
        cfg.window = 6;
        cfg.stride = 3;
        cfg.seed = trial;
        ++trials;
        const RunResult r = diffuse_slide(low, cfg, den);
        if (r.trace.total_denoise_rounds == (cfg.tau - cfg.delta) * (cfg.m_iters + 1) + cfg.delta) ++ok;
    }
    pass = pass && ok == trials;
    return {pass, fmt("reference run %zu rounds (want 33); formula held on %zu/%zu random configs",
                      ref.trace.total_denoise_rounds, ok, trials)};
}

Verdict fusion_oracle() {
    std::mt19937_64 rng(21);
    std::size_t instances = 0;
    double worst = 0.0;
    while (instances < 300) {
        const std::size_t factor = 1 + rng() % 3;
        const std::size_t f = std::max<std::size_t>(1, (4 + rng() % 9) / factor);
        const std::size_t total = factor * f;
        const std::size_t width = std::min<std::size_t>(total, factor + rng() % 4);
        if (total > 12 || width > 6) continue;
        const std::size_t stride = std::min(width, factor * (1 + rng() % 2));
        const Dims dims{1 + rng() % 2, total, 2, 2};
        const auto prior = testing::random_prior(dims, 1 + rng() % 3, 1000 + instances);
        const AnalyticDenoiser den(prior, width, 1e3);
        WindowLayout layout = plan_windows(total, KeyframePlan{factor, f}, width, stride);
        layout.bind_keyframes(testing::random_latent(dims.with_frames(f), 2000 + instances));
        const LatentVideo z = testing::random_latent(dims, 3000 + instances, 1.5);
        const LatentVideo got = denoise_round(layout, z, den, 0.9, 0.4);
        const LatentVideo want = testing::brute_force_round(layout, z, den, 0.9, 0.4);
        for (std::size_t i = 0; i < got.data().size(); ++i) {
            worst = std::max(worst, std::abs(got.data()[i] - want.data()[i]));
        }
        ++instances;
    }
    return {worst <= kFusionTolerance, fmt("%zu random instances, max |diff| = %.2e", instances, worst)};
}

Verdict sampler_calibration() {
    const AnalyticDenoiser scalar(testing::scalar_prior(), 1, 0.0);
    const auto schedule = SigmaSchedule::build(25, 0.002, 700.0, 7.0);
    std::vector<double> xs;
    for (std::uint64_t s = 0; s < 1000; ++s) xs.push_back(sample_clean(scalar, schedule, 1, {}, NoiseSeed{s}).data()[0]);
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / 1000.0;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double std = std::sqrt(var / 999.0);

    const Toy& t = toy();
    const std::size_t frames = t.spec.total_frames();
    const AnalyticDenoiser full(t.prior, frames, 0.0);
    double worst_residual = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        worst_residual = std::max(worst_residual, manifold_residual(sample_clean(full, schedule, frames, {}, NoiseSeed{s}), *t.prior));
    }
    const bool pass = std::abs(mean) < 0.1 && std >= 0.9 && std <= 1.1 && worst_residual < kToyResidualLimit;
    return {pass, fmt("scalar mean %.4f, std %.4f (band [0.9, 1.1]; 25-step Euler gain is 0.8546); "
                      "toy prior residual %.2e",
                      mean, std, worst_residual)};
}

Verdict schedule_algebra() {
    const auto s = SigmaSchedule::build(25, 0.002, 700.0, 7.0);
    double worst = 0.0;
    for (std::size_t tau = 1; tau <= s.n_steps(); ++tau) {
        const double from = s.level_at(tau);
        const double to = s.level_at(tau - 1);
        const double r = reinjection_std(s, tau);
        worst = std::max(worst, std::abs(r * r + to * to - from * from) / (from * from));
    }
    return {worst <= kScheduleTolerance, fmt("%zu adjacent pairs, max relative error %.2e", s.n_steps(), worst)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int shell(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism(const std::string& cli) {
    const fs::path dir = fs::temp_directory_path() / ("dslide_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string corpus = (dir / "c").string();
    if (shell(cli + " synth --n-videos 1 --out " + corpus) != 0) return {false, "synth failed"};
    const std::string base =
        cli + " run --input " + corpus + "/item_000_low.lvt --window 14 --stride 4 --seed 7 --out " + dir.string() + "/";
    std::vector<std::string> outputs;
    for (const auto& [threads, name] : std::vector<std::pair<int, std::string>>{{1, "a"}, {1, "b"}, {4, "c"}, {8, "d"}}) {
        if (shell(base + name + ".lvt --threads " + std::to_string(threads)) != 0) return {false, "run failed"};
        outputs.push_back(slurp(dir / (name + ".lvt")));
    }
    fs::remove_all(dir);
    bool same = !outputs.front().empty();
    for (const auto& o : outputs) same = same && o == outputs.front();
    return {same, fmt("4 CLI runs (threads 1, 1, 4, 8) %s", same ? "bitwise identical" : "differ")};
}

Verdict protocol() {
    const Toy& t = toy();
    auto server = remote::serve_denoiser(t.denoiser, remote::Endpoint{"127.0.0.1", 0});
    auto client = remote::RemoteDenoiser::connect(server->address(), remote::ClientOptions{10000, 4});
    RunConfig cfg = reference_config(3);
    cfg.threads = 4;
    const LatentVideo low = sample_pair(*t.prior, t.spec, 3).low;
    const LatentVideo a = diffuse_slide(low, cfg, *t.denoiser).output;
    const LatentVideo b = diffuse_slide(low, cfg, *client).output;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));

    const auto fuzz = testing::fuzz_client(kFuzzCases, 2024);
    const bool pass = worst <= kLoopbackTolerance && fuzz.protocol_errors == fuzz.cases && fuzz.unexpected.empty();
    return {pass, fmt("loopback max |diff| = %.2e; fuzz %zu/%zu protocol-errors", worst, fuzz.protocol_errors,
                      fuzz.cases)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : DSLIDE_CLI_PATH;
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"ordering", table_ordering},
        {"keyframe-fidelity", keyframe_fidelity},
        {"reinjection-level", reinjection_level},
        {"control-flow-count", control_flow},
        {"fusion-oracle", fusion_oracle},
        {"sampler-calibration", sampler_calibration},
        {"schedule-algebra", schedule_algebra},
        {"determinism", [&] { return determinism(cli); }},
        {"protocol", protocol},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
    return failures == 0 ? 0 : 1;
}
