#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/latent.hpp"
#include "oracles.hpp"

namespace dslide {
namespace {

LatentVideo scalar_frames(std::vector<double> values) {
    const Dims dims{1, values.size(), 1, 1};
    return LatentVideo(dims, std::move(values));
}

TEST(LatentVideo, RejectsBadShapesAndValues) {
    EXPECT_THROW(LatentVideo(Dims{1, 2, 1, 1}, {1.0}), Error);
    EXPECT_THROW(LatentVideo(Dims{0, 2, 1, 1}, {}), Error);
    EXPECT_THROW(LatentVideo(Dims{1, 1, 1, 1}, {NAN}), Error);
    EXPECT_THROW(LatentVideo(Dims{1, 1, 1, 1}, {INFINITY}), Error);
}

TEST(Interpolate, ScalarFourTimes) {
    const LatentVideo out = interpolate(scalar_frames({0.0, 4.0}), 4);
    const std::vector<double> expected{0, 1, 2, 3, 4, 4, 4, 4};
    EXPECT_EQ(std::vector<double>(out.data().begin(), out.data().end()), expected);
}

TEST(Interpolate, FactorOneIsIdentity) {
    const LatentVideo low = testing::random_latent(Dims{2, 5, 3, 4}, 3);
    EXPECT_EQ(interpolate(low, 1), low);
}

TEST(Interpolate, FrameCounts) {
    const LatentVideo low = testing::random_latent(Dims{1, 14, 2, 2}, 1);
    EXPECT_EQ(interpolate(low, 2).frames(), 28u);
    EXPECT_EQ(interpolate(low, 4).frames(), 56u);
}

TEST(Interpolate, PreservesKeyframesBitwiseAndIsConvex) {
    const LatentVideo low = testing::random_latent(Dims{2, 6, 3, 3}, 11);
    for (std::size_t r : {2u, 3u, 4u, 7u}) {
        const LatentVideo high = interpolate(low, r);
        const Dims& d = low.dims();
        for (std::size_t ch = 0; ch < d.channels; ++ch) {
            for (std::size_t i = 0; i < d.frames; ++i) {
                const auto a = low.plane(ch, i);
                const auto b = high.plane(ch, i * r);
                EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
            }
            for (std::size_t t = 0; t < high.frames(); ++t) {
                const std::size_t i = std::min(t / r, d.frames - 1);
                const std::size_t j = std::min(i + 1, d.frames - 1);
                const auto lo = low.plane(ch, i);
                const auto hi = low.plane(ch, j);
                const auto v = high.plane(ch, t);
                for (std::size_t p = 0; p < v.size(); ++p) {
                    EXPECT_GE(v[p], std::min(lo[p], hi[p]));
                    EXPECT_LE(v[p], std::max(lo[p], hi[p]));
                }
            }
        }
    }
}

TEST(Interpolate, RejectsBadInput) {
    EXPECT_THROW(interpolate(scalar_frames({1.0, 2.0}), 0), Error);
}

TEST(KeyframeIndices, Examples) {
    EXPECT_EQ(keyframe_indices(KeyframePlan{2, 3}), (std::vector<std::size_t>{0, 2, 4}));
    std::vector<std::size_t> expected(14);
    for (std::size_t i = 0; i < 14; ++i) expected[i] = 4 * i;
    EXPECT_EQ(keyframe_indices(KeyframePlan{4, 14}), expected);
    EXPECT_EQ(keyframe_indices(KeyframePlan{4, 1}), (std::vector<std::size_t>{0}));
    EXPECT_EQ((KeyframePlan{4, 14}.total_frames()), 56u);
}

TEST(InjectNoise, ZeroSigmaReturnsInputBitwise) {
    const LatentVideo z = testing::random_latent(Dims{1, 4, 2, 2}, 5);
    EXPECT_EQ(inject_noise(z, 0.0, NoiseSeed{9}), z);
}

TEST(InjectNoise, UnitSigmaHasUnitStd) {
    const LatentVideo z = LatentVideo::zeros(Dims{1, 1000, 10, 10});
    const LatentVideo n = inject_noise(z, 1.0, NoiseSeed{42});
    const auto d = n.data();
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    const double std = std::sqrt(var / static_cast<double>(d.size()));
    EXPECT_GE(std, 0.99);
    EXPECT_LE(std, 1.01);
}

TEST(InjectNoise, ScalesLinearlyWithSigma) {
    const LatentVideo z = LatentVideo::zeros(Dims{1, 10, 4, 4});
    const LatentVideo one = inject_noise(z, 1.0, NoiseSeed{42});
    const LatentVideo three = inject_noise(z, 3.0, NoiseSeed{42});
    for (std::size_t i = 0; i < one.data().size(); ++i) EXPECT_EQ(three.data()[i], 3.0 * one.data()[i]);
}

TEST(InjectNoise, DeterministicAcrossThreads) {
    const LatentVideo z = testing::random_latent(Dims{1, 8, 4, 4}, 2);
    const NoiseSeed seed{7, 3, 1, NoisePurpose::Reinjection};
    const LatentVideo reference = inject_noise(z, 0.5, seed);
    std::vector<LatentVideo> results(4);
    {
        std::vector<std::jthread> threads;
        for (std::size_t i = 0; i < results.size(); ++i) {
            threads.emplace_back([&, i] { results[i] = inject_noise(z, 0.5, seed); });
        }
    }
    for (const auto& r : results) EXPECT_EQ(r, reference);
}

TEST(InjectNoise, SubstreamsDiffer) {
    const LatentVideo z = LatentVideo::zeros(Dims{1, 4, 2, 2});
    const NoiseSeed base{7};
    const LatentVideo a = inject_noise(z, 1.0, base.with(1, 0, NoisePurpose::Reinjection));
    EXPECT_NE(a, inject_noise(z, 1.0, base.with(1, 1, NoisePurpose::Reinjection)));
    EXPECT_NE(a, inject_noise(z, 1.0, base.with(2, 0, NoisePurpose::Reinjection)));
    EXPECT_NE(a, inject_noise(z, 1.0, base.with(1, 0, NoisePurpose::Injection)));
    EXPECT_NE(a, inject_noise(z, 1.0, NoiseSeed{8}.with(1, 0, NoisePurpose::Reinjection)));
}

TEST(InjectNoise, RejectsBadSigma) {
    const LatentVideo z = LatentVideo::zeros(Dims{1, 1, 1, 1});
    EXPECT_THROW(inject_noise(z, -1.0, NoiseSeed{}), Error);
    EXPECT_THROW(inject_noise(z, NAN, NoiseSeed{}), Error);
}

}  // namespace
}  // namespace dslide
