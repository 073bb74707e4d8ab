#include "commands.hpp"

#include <signal.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>

#include <spdlog/spdlog.h>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/metrics.hpp"
#include "diffuseslide/prior.hpp"
#include "diffuseslide/remote/client.hpp"
#include "diffuseslide/remote/server.hpp"
#include "diffuseslide/simd/kernels.hpp"
#include "diffuseslide/tensor_io.hpp"

namespace dslide::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <class T, class U>
void set_if(const std::optional<T>& value, U& target) {
    if (value) target = *value;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string item_name(std::size_t index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "item_%03zu_%s.lvt", index, suffix);
    return buf;
}

void write_json(const fs::path& path, const json& doc) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << doc.dump(2) << '\n';
    if (!out) fail(ErrorKind::InvalidState, "cannot write " + path.string());
}

// Header shared by every JSON artifact.
json provenance(const CliConfig& cfg, std::string_view command) {
    return json{{"command", command},
                {"config", to_json(cfg)},
                {"seed", cfg.run.seed},
                {"simd", simd::to_string(simd::active_isa())}};
}

fs::path sidecar(const fs::path& tensor) { return fs::path(tensor.string() + ".json"); }

std::shared_ptr<const LinearGaussianPrior> make_prior(const CliConfig& cfg) {
    return std::make_shared<const LinearGaussianPrior>(build_prior(cfg.corpus));
}

std::shared_ptr<const Denoiser> make_denoiser(const CliConfig& cfg) {
    if (cfg.run.denoiser == "analytic") {
        return std::make_shared<AnalyticDenoiser>(make_prior(cfg), cfg.capability, cfg.run.cond_precision);
    }
    remote::ClientOptions opts{cfg.run.remote_timeout_ms, cfg.run.remote_pool};
    spdlog::info("connecting to remote denoiser {}", cfg.run.denoiser);
    return remote::RemoteDenoiser::connect(cfg.run.denoiser, opts);
}

void check_keyframes(const LatentVideo& low, const CliConfig& cfg) {
    const Dims expect = cfg.corpus.full_dims().with_frames(cfg.corpus.keyframes);
    if (low.dims() != expect) {
        fail(ErrorKind::InvalidArgument,
             "keyframe latent is " + std::to_string(low.dims().channels) + "x" + std::to_string(low.frames()) + "x" +
                 std::to_string(low.dims().height) + "x" + std::to_string(low.dims().width) + ", config expects " +
                 std::to_string(expect.channels) + "x" + std::to_string(expect.frames) + "x" +
                 std::to_string(expect.height) + "x" + std::to_string(expect.width));
    }
}

struct MethodRow {
    std::string name;
    std::vector<MetricReport> reports;
    std::vector<double> wall_ms;
};

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <class F>
double mean_field(const MethodRow& row, F field) {
    std::vector<double> v;
    for (const auto& r : row.reports) v.push_back(field(r));
    return mean_of(v);
}

}  // namespace

CliConfig resolve_config(const std::optional<std::string>& config_path, const Overrides& ov) {
    CliConfig cfg = config_path ? load_config(*config_path) : CliConfig{};
    RunConfig& r = cfg.run;
    set_if(ov.steps, r.steps);
    set_if(ov.tau, r.tau);
    set_if(ov.delta, r.delta);
    set_if(ov.m_iters, r.m_iters);
    set_if(ov.factor, r.factor);
    set_if(ov.window, r.window);
    set_if(ov.stride, r.stride);
    set_if(ov.threads, r.threads);
    set_if(ov.remote_pool, r.remote_pool);
    set_if(ov.seed, r.seed);
    set_if(ov.denoiser, r.denoiser);
    set_if(ov.cond_precision, r.cond_precision);
    set_if(ov.remote_timeout_ms, r.remote_timeout_ms);
    set_if(ov.corpus_seed, cfg.corpus.seed);
    set_if(ov.n_videos, cfg.corpus.n_videos);
    set_if(ov.keyframes, cfg.corpus.keyframes);
    set_if(ov.rank, cfg.corpus.rank);
    set_if(ov.capability, cfg.capability);
    cfg.corpus.factor = r.factor;
    cfg.validate();
    return cfg;
}

int cmd_synth(const CliConfig& cfg, const SynthArgs& args) {
    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    const LinearGaussianPrior prior = build_prior(cfg.corpus);
    json items = json::array();
    for (std::size_t i = 0; i < cfg.corpus.n_videos; ++i) {
        const CorpusPair pair = sample_pair(prior, cfg.corpus, i);
        write_latent(dir / item_name(i, "low"), pair.low);
        write_latent(dir / item_name(i, "truth"), pair.truth_high);
        items.push_back(json{{"index", i},
                             {"low", item_name(i, "low")},
                             {"truth", item_name(i, "truth")},
                             {"coefficients", pair.coefficients}});
    }
    json gratings = json::array();
    for (const Grating& g : grating_parameters(cfg.corpus)) {
        gratings.push_back(json{{"p", g.p}, {"q", g.q}, {"omega", g.omega}, {"phase", g.phase}});
    }
    json manifest = provenance(cfg, "synth");
    manifest["items"] = std::move(items);
    manifest["gratings"] = std::move(gratings);
    manifest["gram_condition_number"] = prior.gram_condition_number();
    write_json(dir / "manifest.json", manifest);
    std::cout << "wrote " << cfg.corpus.n_videos << " corpus items to " << dir.string() << '\n';
    return 0;
}

int cmd_keyframes(const CliConfig& cfg, const KeyframesArgs& args) {
    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    const LinearGaussianPrior full = build_prior(cfg.corpus);
    auto low_prior = std::make_shared<const LinearGaussianPrior>(subsample_prior(full, cfg.run.factor));
    const AnalyticDenoiser denoiser(low_prior, cfg.corpus.keyframes, cfg.run.cond_precision);
    json items = json::array();
    for (std::size_t i = 0; i < cfg.corpus.n_videos; ++i) {
        // Each item's clean first frame anchors the generated keyframes.
        const CorpusPair pair = sample_pair(full, cfg.corpus, i);
        const NoiseSeed seed{cfg.run.seed + i};
        const LatentVideo keyframes =
            generate_keyframes(cfg.run, denoiser, pair.low.frame(0), cfg.corpus.keyframes, seed);
        write_latent(dir / item_name(i, "keyframes"), keyframes);
        items.push_back(json{{"index", i}, {"keyframes", item_name(i, "keyframes")}, {"seed", seed.seed}});
    }
    json manifest = provenance(cfg, "keyframes");
    manifest["items"] = std::move(items);
    write_json(dir / "manifest.json", manifest);
    std::cout << "wrote " << cfg.corpus.n_videos << " keyframe latents to " << dir.string() << '\n';
    return 0;
}

int cmd_interp(const CliConfig& cfg, const InterpArgs& args) {
    const LatentVideo low = read_latent(args.input);
    const auto t0 = std::chrono::steady_clock::now();
    const LatentVideo high = interpolate(low, cfg.run.factor);
    const double ms = elapsed_ms(t0);
    write_latent(args.output, high);
    json doc = provenance(cfg, "interp");
    doc["input"] = args.input;
    doc["output"] = args.output;
    doc["wall_ms"] = ms;
    write_json(sidecar(args.output), doc);
    std::cout << "wrote " << high.frames() << " frames to " << args.output << '\n';
    return 0;
}

int cmd_run(const CliConfig& cfg, const RunArgs& args) {
    const LatentVideo low = read_latent(args.input);
    if (cfg.run.denoiser == "analytic") check_keyframes(low, cfg);
    const auto denoiser = make_denoiser(cfg);

    RunTrace trace;
    json doc = provenance(cfg, "run");
    doc["input"] = args.input;
    doc["output"] = args.output;
    const fs::path trace_path = args.trace ? fs::path(*args.trace) : sidecar(args.output);
    LatentVideo high;
    try {
        high = diffuse_slide(low, cfg.run, *denoiser, trace);
    } catch (...) {
        doc["trace"] = to_json(trace);
        write_json(trace_path, doc);
        throw;
    }
    write_latent(args.output, high);
    if (args.frames_dir) export_frames(high, *args.frames_dir);
    doc["trace"] = to_json(trace);
    write_json(trace_path, doc);
    spdlog::info("run finished: {} rounds, {} denoiser calls, {:.1f} ms", trace.total_denoise_rounds,
                 trace.total_denoiser_calls, trace.wall_ms);
    std::cout << "wrote " << high.frames() << " frames to " << args.output << " (" << trace.total_denoise_rounds
              << " denoise rounds)\n";
    return 0;
}

int cmd_eval(const CliConfig& cfg, const EvalArgs& args) {
    const LatentVideo low = read_latent(args.low);
    const LatentVideo high = read_latent(args.high);
    std::optional<LatentVideo> truth;
    if (args.truth) truth = read_latent(*args.truth);
    const LinearGaussianPrior prior = build_prior(cfg.corpus);
    const MetricReport report = evaluate(low, high, cfg.run.factor, prior, truth ? &*truth : nullptr);

    // Seed and timing come from the run that produced `high`, when it left a sidecar.
    std::uint64_t seed = cfg.run.seed;
    double wall_ms = 0.0;
    if (const fs::path side = sidecar(args.high); fs::exists(side)) {
        std::ifstream in(side);
        const json produced = json::parse(in, nullptr, false);
        if (!produced.is_discarded()) {
            seed = produced.value("seed", seed);
            if (produced.contains("trace")) wall_ms = produced["trace"].value("wall_ms", 0.0);
            else wall_ms = produced.value("wall_ms", 0.0);
        }
    }

    json doc = provenance(cfg, "eval");
    doc["seed"] = seed;
    doc["low"] = args.low;
    doc["high"] = args.high;
    if (args.truth) doc["truth"] = *args.truth;
    doc["metrics"] = to_json(report);
    doc["wall_ms"] = wall_ms;
    if (args.report) write_json(*args.report, doc);
    else std::cout << doc.dump(2) << '\n';

    if (args.csv) {
        const fs::path csv(*args.csv);
        const bool fresh = !fs::exists(csv) || fs::file_size(csv) == 0;
        std::ofstream out(csv, std::ios::app);
        if (fresh) out << "seed,factor,psnr_keyframes,ssim_keyframes,psnr_vs_truth,manifold_residual,wall_ms\n";
        char line[256];
        std::snprintf(line, sizeof line, "%llu,%zu,%.6f,%.6f,%s,%.9g,%.3f\n",
                      static_cast<unsigned long long>(seed), cfg.run.factor, report.psnr_keyframes,
                      report.ssim_keyframes,
                      report.psnr_vs_truth ? std::to_string(*report.psnr_vs_truth).c_str() : "", report.manifold_residual,
                      wall_ms);
        out << line;
        if (!out) fail(ErrorKind::InvalidState, "cannot write " + csv.string());
    }
    return 0;
}

int cmd_compare(const CliConfig& base, const CompareArgs& args) {
    if (args.seeds == 0) fail(ErrorKind::InvalidArgument, "--seeds must be positive");
    CliConfig cfg = base;
    cfg.corpus.n_videos = std::max(cfg.corpus.n_videos, args.seeds);
    const auto prior = std::make_shared<const LinearGaussianPrior>(build_prior(cfg.corpus));
    const auto denoiser = make_denoiser(cfg);

    MethodRow direct{"direct", {}, {}};
    MethodRow interp{"interp", {}, {}};
    MethodRow slide{"diffuseslide", {}, {}};
    json per_seed = json::array();
    for (std::size_t s = 0; s < args.seeds; ++s) {
        const CorpusPair pair = sample_pair(*prior, cfg.corpus, s);
        RunConfig run = cfg.run;
        run.seed = cfg.run.seed + s;

        auto t0 = std::chrono::steady_clock::now();
        const LatentVideo d = direct_inference(pair.low, run, *denoiser);
        direct.wall_ms.push_back(elapsed_ms(t0));
        t0 = std::chrono::steady_clock::now();
        const LatentVideo li = interpolate(pair.low, run.factor);
        interp.wall_ms.push_back(elapsed_ms(t0));
        t0 = std::chrono::steady_clock::now();
        const LatentVideo ds = diffuse_slide(pair.low, run, *denoiser).output;
        slide.wall_ms.push_back(elapsed_ms(t0));

        direct.reports.push_back(evaluate(pair.low, d, run.factor, *prior, &pair.truth_high));
        interp.reports.push_back(evaluate(pair.low, li, run.factor, *prior, &pair.truth_high));
        slide.reports.push_back(evaluate(pair.low, ds, run.factor, *prior, &pair.truth_high));
        json entry{{"item", s}, {"seed", run.seed}};
        for (const MethodRow* row : {&direct, &interp, &slide}) {
            entry[row->name] = to_json(row->reports.back());
            entry[row->name]["wall_ms"] = row->wall_ms.back();
        }
        per_seed.push_back(std::move(entry));
        spdlog::debug("compare item {} done", s);
    }

    std::vector<const MethodRow*> ranked{&direct, &interp, &slide};
    auto residual = [](const MetricReport& r) { return r.manifold_residual; };
    std::ranges::stable_sort(ranked, {}, [&](const MethodRow* r) { return mean_field(*r, residual); });

    std::size_t slide_wins = 0;
    for (std::size_t s = 0; s < args.seeds; ++s) {
        if (slide.reports[s].manifold_residual < interp.reports[s].manifold_residual) ++slide_wins;
    }

    std::printf("%-4s %-13s %18s %14s %15s %15s %10s\n", "rank", "method", "manifold_residual", "psnr_vs_truth",
                "psnr_keyframes", "ssim_keyframes", "wall_ms");
    json table = json::array();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const MethodRow& row = *ranked[i];
        const double res = mean_field(row, residual);
        const double truth = mean_field(row, [](const MetricReport& r) { return r.psnr_vs_truth.value_or(0.0); });
        const double kp = mean_field(row, [](const MetricReport& r) { return r.psnr_keyframes; });
        const double ks = mean_field(row, [](const MetricReport& r) { return r.ssim_keyframes; });
        const double ms = mean_of(row.wall_ms);
        std::printf("%-4zu %-13s %18.6e %14.3f %15.3f %15.4f %10.2f\n", i + 1, row.name.c_str(), res, truth, kp, ks, ms);
        table.push_back(json{{"rank", i + 1},
                             {"method", row.name},
                             {"manifold_residual", res},
                             {"psnr_vs_truth", truth},
                             {"psnr_keyframes", kp},
                             {"ssim_keyframes", ks},
                             {"wall_ms", ms}});
    }
    std::printf("diffuseslide below interp on %zu/%zu seeds\n", slide_wins, args.seeds);

    if (args.report) {
        json doc = provenance(cfg, "compare");
        doc["seeds"] = args.seeds;
        doc["table"] = std::move(table);
        doc["diffuseslide_wins_vs_interp"] = slide_wins;
        doc["per_seed"] = std::move(per_seed);
        write_json(*args.report, doc);
    }
    return 0;
}

int cmd_serve(const CliConfig& cfg, const ServeArgs& args) {
    if (cfg.run.denoiser != "analytic") fail(ErrorKind::InvalidArgument, "serve only hosts the analytic denoiser");
    // Block the stop signals before any thread starts so only sigwait sees them.
    sigset_t stop_set;
    sigemptyset(&stop_set);
    sigaddset(&stop_set, SIGINT);
    sigaddset(&stop_set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_set, nullptr);

    const auto denoiser = make_denoiser(cfg);
    auto server = remote::serve_denoiser(denoiser, remote::parse_endpoint(args.listen));
    std::cout << "listening on " << server->address() << std::endl;
    int sig = 0;
    sigwait(&stop_set, &sig);
    spdlog::info("signal {} received, stopping after {} requests", sig, server->requests_served());
    server->stop();
    return 0;
}

}  // namespace dslide::cli
