#pragma once

#include <filesystem>

#include "json.hpp"

#include "diffuseslide/metrics.hpp"
#include "diffuseslide/pipeline.hpp"
#include "diffuseslide/synthetic.hpp"

namespace dslide {

/// Everything a command can be configured with. On disk this is one flat
/// JSON object; unknown keys are rejected. `factor` is shared by the corpus
/// and the run.
struct CliConfig {
    RunConfig run;
    CorpusSpec corpus;
    // Frame capability of the in-process analytic denoiser.
    std::size_t capability = 14;

    void validate() const;
};

// Applies the keys present in `doc` on top of `base`.
CliConfig apply_json(const nlohmann::json& doc, CliConfig base = {});
CliConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const CliConfig& cfg);
nlohmann::json to_json(const RunTrace& trace);
nlohmann::json to_json(const MetricReport& report);

}  // namespace dslide
