#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "diffuseslide/config.hpp"

namespace dslide::cli {

/// Flags that override keys of the config file. Unset flags leave the file
/// (or built-in default) value in place.
struct Overrides {
    std::optional<std::size_t> steps, tau, delta, m_iters, factor, window, stride, threads, remote_pool;
    std::optional<std::uint64_t> seed, corpus_seed;
    std::optional<std::string> denoiser;
    std::optional<double> cond_precision;
    std::optional<int> remote_timeout_ms;
    std::optional<std::size_t> n_videos, keyframes, rank, capability;
};

// Config file (if any) with the overrides applied, validated.
CliConfig resolve_config(const std::optional<std::string>& config_path, const Overrides& overrides);

struct SynthArgs {
    std::string out_dir;
};
struct KeyframesArgs {
    std::string out_dir;
};
struct InterpArgs {
    std::string input;
    std::string output;
};
struct RunArgs {
    std::string input;
    std::string output;
    std::optional<std::string> trace;
    std::optional<std::string> frames_dir;
};
struct EvalArgs {
    std::string low;
    std::string high;
    std::optional<std::string> truth;
    std::optional<std::string> report;
    std::optional<std::string> csv;
};
struct CompareArgs {
    std::size_t seeds = 20;
    std::optional<std::string> report;
};
struct ServeArgs {
    std::string listen = "127.0.0.1:7341";
};

int cmd_synth(const CliConfig& cfg, const SynthArgs& args);
int cmd_keyframes(const CliConfig& cfg, const KeyframesArgs& args);
int cmd_interp(const CliConfig& cfg, const InterpArgs& args);
int cmd_run(const CliConfig& cfg, const RunArgs& args);
int cmd_eval(const CliConfig& cfg, const EvalArgs& args);
int cmd_compare(const CliConfig& cfg, const CompareArgs& args);
int cmd_serve(const CliConfig& cfg, const ServeArgs& args);

}  // namespace dslide::cli
