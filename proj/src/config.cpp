#include "diffuseslide/config.hpp"

#include <fstream>
#include <set>
#include <string>
#include <type_traits>

#include "diffuseslide/errors.hpp"

namespace dslide {
namespace {

using nlohmann::json;

template <class T>
void read_key(const json& doc, const char* key, T& out) {
    if (!doc.contains(key)) return;
    const json& v = doc.at(key);
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) {
            fail(ErrorKind::InvalidArgument, std::string("config key '") + key + "' must be a non-negative integer");
        }
    }
    try {
        out = doc.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("config key '") + key + "': " + e.what());
    }
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "steps",     "sigma_min",  "sigma_max", "rho",       "tau",          "delta",       "m_iters",
        "factor",    "window",     "stride",    "seed",      "denoiser",     "cond_precision",
        "threads",   "remote_timeout_ms",       "remote_pool",
        "n_videos",  "channels",   "height",    "width",     "keyframes",    "rank",        "amplitude",
        "corpus_seed", "omega_min", "omega_max", "capability",
    };
    return keys;
}

}  // namespace

void CliConfig::validate() const {
    run.validate();
    corpus.validate();
    if (capability == 0) fail(ErrorKind::InvalidArgument, "capability must be positive");
    if (corpus.factor != run.factor) fail(ErrorKind::InvalidState, "corpus and run factors disagree");
}

CliConfig apply_json(const json& doc, CliConfig cfg) {
    if (!doc.is_object()) fail(ErrorKind::InvalidArgument, "config must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (!known_keys().contains(key)) fail(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
    }
    RunConfig& r = cfg.run;
    read_key(doc, "steps", r.steps);
    read_key(doc, "sigma_min", r.sigma_min);
    read_key(doc, "sigma_max", r.sigma_max);
    read_key(doc, "rho", r.rho);
    read_key(doc, "tau", r.tau);
    read_key(doc, "delta", r.delta);
    read_key(doc, "m_iters", r.m_iters);
    read_key(doc, "factor", r.factor);
    read_key(doc, "window", r.window);
    read_key(doc, "stride", r.stride);
    read_key(doc, "seed", r.seed);
    read_key(doc, "denoiser", r.denoiser);
    read_key(doc, "cond_precision", r.cond_precision);
    read_key(doc, "threads", r.threads);
    read_key(doc, "remote_timeout_ms", r.remote_timeout_ms);
    read_key(doc, "remote_pool", r.remote_pool);

    CorpusSpec& c = cfg.corpus;
    read_key(doc, "n_videos", c.n_videos);
    read_key(doc, "channels", c.channels);
    read_key(doc, "height", c.height);
    read_key(doc, "width", c.width);
    read_key(doc, "keyframes", c.keyframes);
    read_key(doc, "rank", c.rank);
    read_key(doc, "amplitude", c.amplitude);
    read_key(doc, "corpus_seed", c.seed);
    read_key(doc, "omega_min", c.omega_min);
    read_key(doc, "omega_max", c.omega_max);
    read_key(doc, "capability", cfg.capability);
    c.factor = r.factor;
    return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidArgument, "cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, "config " + path.string() + " is not valid JSON: " + e.what());
    }
    return apply_json(doc);
}

json to_json(const CliConfig& cfg) {
    const RunConfig& r = cfg.run;
    const CorpusSpec& c = cfg.corpus;
    return json{
        {"steps", r.steps},
        {"sigma_min", r.sigma_min},
        {"sigma_max", r.sigma_max},
        {"rho", r.rho},
        {"tau", r.tau},
        {"delta", r.delta},
        {"m_iters", r.m_iters},
        {"factor", r.factor},
        {"window", r.window},
        {"stride", r.stride},
        {"seed", r.seed},
        {"denoiser", r.denoiser},
        {"cond_precision", r.cond_precision},
        {"threads", r.threads},
        {"remote_timeout_ms", r.remote_timeout_ms},
        {"remote_pool", r.remote_pool},
        {"n_videos", c.n_videos},
        {"channels", c.channels},
        {"height", c.height},
        {"width", c.width},
        {"keyframes", c.keyframes},
        {"rank", c.rank},
        {"amplitude", c.amplitude},
        {"corpus_seed", c.seed},
        {"omega_min", c.omega_min},
        {"omega_max", c.omega_max},
        {"capability", cfg.capability},
    };
}

json to_json(const RunTrace& trace) {
    json steps = json::array();
    for (const auto& s : trace.steps) {
        steps.push_back(json{
            {"remaining", s.remaining},
            {"sigma_from", s.sigma_from},
            {"sigma_to", s.sigma_to},
            {"reinjection_iterations", s.reinjection_iterations},
            {"denoise_rounds", s.denoise_rounds},
            {"denoiser_calls", s.denoiser_calls},
            {"window_ms", s.window_ms},
        });
    }
    return json{
        {"steps", steps},
        {"total_denoise_rounds", trace.total_denoise_rounds},
        {"total_denoiser_calls", trace.total_denoiser_calls},
        {"windows", trace.windows},
        {"completed", trace.completed},
        {"wall_ms", trace.wall_ms},
    };
}

json to_json(const MetricReport& report) {
    json j{
        {"psnr_keyframes", report.psnr_keyframes},
        {"ssim_keyframes", report.ssim_keyframes},
        {"manifold_residual", report.manifold_residual},
        {"per_frame_psnr_keyframes", report.per_frame_psnr_keyframes},
        {"per_frame_ssim_keyframes", report.per_frame_ssim_keyframes},
        {"ssim_protocol", "gaussian 11x11 std 1.5, C1=(0.01L)^2, C2=(0.03L)^2, L=1, valid windows"},
    };
    j["psnr_vs_truth"] = report.psnr_vs_truth ? json(*report.psnr_vs_truth) : json(nullptr);
    if (report.psnr_vs_truth) j["per_frame_psnr_vs_truth"] = report.per_frame_psnr_vs_truth;
    return j;
}

}  // namespace dslide
