#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "diffuseslide/config.hpp"
#include "diffuseslide/errors.hpp"

namespace dslide {
namespace {

using nlohmann::json;

TEST(Config, DefaultsMatchTheReferenceSetup) {
    const CliConfig cfg;
    EXPECT_EQ(cfg.run.steps, 25u);
    EXPECT_EQ(cfg.run.tau, 8u);
    EXPECT_EQ(cfg.run.delta, 3u);
    EXPECT_EQ(cfg.run.m_iters, 5u);
    EXPECT_EQ(cfg.run.factor, 4u);
    EXPECT_EQ(cfg.capability, 14u);
    EXPECT_EQ(cfg.corpus.keyframes, 14u);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, AppliesKeysAndSharesFactor) {
    const CliConfig cfg = apply_json(json{{"steps", 30}, {"factor", 2}, {"m_iters", 1}, {"rank", 4}, {"denoiser", "h:1"}});
    EXPECT_EQ(cfg.run.steps, 30u);
    EXPECT_EQ(cfg.run.factor, 2u);
    EXPECT_EQ(cfg.corpus.factor, 2u);
    EXPECT_EQ(cfg.run.m_iters, 1u);
    EXPECT_EQ(cfg.corpus.rank, 4u);
    EXPECT_EQ(cfg.run.denoiser, "h:1");
}

TEST(Config, LaterDocumentsOverrideEarlier) {
    const CliConfig base = apply_json(json{{"seed", 3}, {"tau", 6}});
    const CliConfig cfg = apply_json(json{{"seed", 9}}, base);
    EXPECT_EQ(cfg.run.seed, 9u);
    EXPECT_EQ(cfg.run.tau, 6u);
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
    for (const json& doc : {json{{"stepz", 3}}, json{{"steps", "many"}}, json::array(), json{{"tau", -1}}}) {
        try {
            apply_json(doc);
            ADD_FAILURE() << doc.dump();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument) << doc.dump();
        }
    }
}

TEST(Config, RoundTripsThroughJson) {
    CliConfig cfg;
    cfg.run.seed = 123;
    cfg.run.window = 12;
    cfg.run.cond_precision = 1e6;
    cfg.corpus.n_videos = 7;
    cfg.corpus.amplitude = 0.2;
    cfg.capability = 16;
    const CliConfig back = apply_json(to_json(cfg));
    EXPECT_EQ(to_json(back), to_json(cfg));
    EXPECT_EQ(back.run.seed, 123u);
    EXPECT_EQ(back.capability, 16u);
}

TEST(Config, LoadsFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "dslide_config_test.json";
    std::ofstream(path) << R"({"steps": 20, "tau": 6, "delta": 2})";
    const CliConfig cfg = load_config(path);
    EXPECT_EQ(cfg.run.steps, 20u);
    EXPECT_EQ(cfg.run.delta, 2u);
    std::ofstream(path) << "{not json";
    EXPECT_THROW(load_config(path), Error);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path), Error);
}

TEST(Config, TraceJsonFields) {
    RunTrace trace;
    StepRecord step;
    step.remaining = 3;
    step.sigma_from = 0.5;
    step.sigma_to = 0.25;
    step.reinjection_iterations = 5;
    step.denoise_rounds = 6;
    step.denoiser_calls = 72;
    step.window_ms = {1.0, 2.0};
    trace.steps.push_back(step);
    trace.total_denoise_rounds = 6;
    trace.total_denoiser_calls = 72;
    trace.windows = 12;
    trace.completed = true;
    const json j = to_json(trace);
    EXPECT_EQ(j["steps"][0]["remaining"], 3);
    EXPECT_EQ(j["steps"][0]["denoise_rounds"], 6);
    EXPECT_EQ(j["steps"][0]["window_ms"].size(), 2u);
    EXPECT_EQ(j["total_denoise_rounds"], 6);
    EXPECT_EQ(j["windows"], 12);
    EXPECT_TRUE(j["completed"].get<bool>());
}

TEST(Config, ReportJsonMarksMissingTruth) {
    MetricReport report;
    report.psnr_keyframes = 40.0;
    const json j = to_json(report);
    EXPECT_TRUE(j["psnr_vs_truth"].is_null());
    EXPECT_EQ(j["psnr_keyframes"], 40.0);
    report.psnr_vs_truth = 30.0;
    EXPECT_EQ(to_json(report)["psnr_vs_truth"], 30.0);
}

}  // namespace
}  // namespace dslide
