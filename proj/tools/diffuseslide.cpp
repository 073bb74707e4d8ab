// diffuseslide: command-line front end for corpus generation, baselines,
// the sliding-window refinement run, evaluation and the denoiser server.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "commands.hpp"
#include "diffuseslide/errors.hpp"

namespace {

using dslide::cli::Overrides;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("diffuseslide");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("DIFFUSESLIDE_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

void report_error(bool as_json, std::string_view kind, const std::string& message) {
    if (as_json) {
        std::cerr << nlohmann::json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
    } else {
        std::cerr << "error (" << kind << "): " << message << '\n';
    }
}

void add_run_flags(CLI::App* sub, Overrides& ov) {
    sub->add_option("--steps", ov.steps, "Solver steps in the noise schedule");
    sub->add_option("--factor", ov.factor, "Frame-rate factor");
    sub->add_option("--tau", ov.tau, "Injection depth in remaining steps");
    sub->add_option("--delta", ov.delta, "Steps left when re-injection stops");
    sub->add_option("--m", ov.m_iters, "Re-injection iterations per step");
    sub->add_option("--window", ov.window, "Window width in frames (0: denoiser capability)");
    sub->add_option("--stride", ov.stride, "Window stride in frames (0: factor)");
    sub->add_option("--threads", ov.threads, "Worker threads per round");
    sub->add_option("--seed", ov.seed, "Noise seed");
    sub->add_option("--denoiser", ov.denoiser, "'analytic' or host:port of a denoiser server");
    sub->add_option("--cond-precision", ov.cond_precision, "Keyframe condition precision (analytic denoiser)");
    sub->add_option("--capability", ov.capability, "Frame capability of the analytic denoiser");
    sub->add_option("--remote-timeout-ms", ov.remote_timeout_ms, "Remote request timeout");
    sub->add_option("--remote-pool", ov.remote_pool, "Remote connection pool size");
}

void add_corpus_flags(CLI::App* sub, Overrides& ov) {
    sub->add_option("--n-videos", ov.n_videos, "Corpus size");
    sub->add_option("--keyframes", ov.keyframes, "Keyframes per video");
    sub->add_option("--rank", ov.rank, "Prior rank");
    sub->add_option("--corpus-seed", ov.corpus_seed, "Corpus and basis seed");
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"DiffuseSlide latent video frame-rate refinement"};
    app.require_subcommand(1);
    std::optional<std::string> config_path;
    bool as_json = false;
    Overrides ov;
    app.add_option("--config", config_path, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
    app.add_flag("--json", as_json, "Machine-readable error output on stderr");
    app.fallthrough();

    dslide::cli::SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write the toy corpus (low keyframes and ground truth)");
    synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
    add_run_flags(synth_cmd, ov);
    add_corpus_flags(synth_cmd, ov);

    dslide::cli::KeyframesArgs keyframes;
    auto* keyframes_cmd = app.add_subcommand("keyframes", "Sample keyframe latents from each item's first frame");
    keyframes_cmd->add_option("--out", keyframes.out_dir, "Output directory")->required();
    add_run_flags(keyframes_cmd, ov);
    add_corpus_flags(keyframes_cmd, ov);

    dslide::cli::InterpArgs interp;
    auto* interp_cmd = app.add_subcommand("interp", "Linear latent interpolation baseline");
    interp_cmd->add_option("--input", interp.input, "Keyframe latent (.lvt)")->required()->check(CLI::ExistingFile);
    interp_cmd->add_option("--out", interp.output, "Output latent (.lvt)")->required();
    add_run_flags(interp_cmd, ov);

    dslide::cli::RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Full sliding-window refinement");
    run_cmd->add_option("--input", run.input, "Keyframe latent (.lvt)")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run.output, "Output latent (.lvt)")->required();
    run_cmd->add_option("--trace", run.trace, "Trace JSON path (default: <out>.json)");
    run_cmd->add_option("--frames", run.frames_dir, "Also export PGM frames to this directory");
    add_run_flags(run_cmd, ov);
    add_corpus_flags(run_cmd, ov);

    dslide::cli::EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Metrics for one output against its keyframes");
    eval_cmd->add_option("--low", eval.low, "Keyframe latent")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--high", eval.high, "High frame-rate latent")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--truth", eval.truth, "Ground-truth latent")->check(CLI::ExistingFile);
    eval_cmd->add_option("--report", eval.report, "Report JSON path (default: stdout)");
    eval_cmd->add_option("--csv", eval.csv, "Append one CSV row to this file");
    add_run_flags(eval_cmd, ov);
    add_corpus_flags(eval_cmd, ov);

    dslide::cli::CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "Rank direct, interp and diffuseslide on the corpus");
    compare_cmd->add_option("--seeds", compare.seeds, "Number of corpus items / seeds");
    compare_cmd->add_option("--report", compare.report, "Write the full comparison JSON here");
    add_run_flags(compare_cmd, ov);
    add_corpus_flags(compare_cmd, ov);

    dslide::cli::ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the analytic denoiser over TCP until SIGINT/SIGTERM");
    serve_cmd->add_option("--listen", serve.listen, "host:port to listen on");
    add_run_flags(serve_cmd, ov);
    add_corpus_flags(serve_cmd, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error(as_json, "usage", e.what());
        return kExitUsage;
    }

    dslide::CliConfig cfg;
    try {
        cfg = dslide::cli::resolve_config(config_path, ov);
    } catch (const dslide::Error& e) {
        report_error(as_json, "usage", e.what());
        return kExitUsage;
    }

    try {
        if (*synth_cmd) return dslide::cli::cmd_synth(cfg, synth);
        if (*keyframes_cmd) return dslide::cli::cmd_keyframes(cfg, keyframes);
        if (*interp_cmd) return dslide::cli::cmd_interp(cfg, interp);
        if (*run_cmd) return dslide::cli::cmd_run(cfg, run);
        if (*eval_cmd) return dslide::cli::cmd_eval(cfg, eval);
        if (*compare_cmd) return dslide::cli::cmd_compare(cfg, compare);
        if (*serve_cmd) return dslide::cli::cmd_serve(cfg, serve);
    } catch (const dslide::Error& e) {
        report_error(as_json, dslide::to_string(e.kind()), e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        report_error(as_json, "internal", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
