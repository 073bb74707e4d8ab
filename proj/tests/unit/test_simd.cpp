#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/pipeline.hpp"
#include "diffuseslide/prior.hpp"
#include "diffuseslide/simd/kernels.hpp"
#include "diffuseslide/synthetic.hpp"

namespace dslide::simd {
namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 3.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

class Avx2Equivalence : public ::testing::Test {
protected:
    void SetUp() override {
        if (!isa_supported(Isa::Avx2) || avx2_kernels() == nullptr) GTEST_SKIP() << "AVX2 unavailable on this host";
        wide = avx2_kernels();
    }
    const KernelTable& ref = scalar_kernels();
    const KernelTable* wide = nullptr;
};

const std::vector<std::size_t> kLengths{0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 63, 64, 1001};

TEST_F(Avx2Equivalence, ElementwiseKernelsAreBitwiseEqual) {
    for (std::size_t n : kLengths) {
        const auto x = random_vector(n, n + 1);
        const auto y = random_vector(n, n + 100);
        std::vector<double> a(n), b(n);

        ref.axpy(x.data(), 0.37, y.data(), a.data(), n);
        wide->axpy(x.data(), 0.37, y.data(), b.data(), n);
        EXPECT_EQ(a, b) << "axpy n=" << n;

        ref.lerp(x.data(), y.data(), 0.25, a.data(), n);
        wide->lerp(x.data(), y.data(), 0.25, b.data(), n);
        EXPECT_EQ(a, b) << "lerp n=" << n;

        ref.euler(x.data(), y.data(), -0.4618, a.data(), n);
        wide->euler(x.data(), y.data(), -0.4618, b.data(), n);
        EXPECT_EQ(a, b) << "euler n=" << n;

        a = x;
        b = x;
        ref.accumulate(a.data(), y.data(), n);
        wide->accumulate(b.data(), y.data(), n);
        EXPECT_EQ(a, b) << "accumulate n=" << n;

        ref.divide(a.data(), 3.0, n);
        wide->divide(b.data(), 3.0, n);
        EXPECT_EQ(a, b) << "divide n=" << n;
    }
}

TEST_F(Avx2Equivalence, ReductionsAgreeWithinRounding) {
    for (std::size_t n : kLengths) {
        const auto x = random_vector(n, 7 * n + 3);
        const auto y = random_vector(n, 11 * n + 5);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]) + (x[i] - y[i]) * (x[i] - y[i]);
        const double tol = 1e-14 * (scale + 1.0);
        EXPECT_NEAR(ref.dot(x.data(), y.data(), n), wide->dot(x.data(), y.data(), n), tol) << n;
        EXPECT_NEAR(ref.sq_dist(x.data(), y.data(), n), wide->sq_dist(x.data(), y.data(), n), tol) << n;
    }
}

TEST(Simd, ScalarReferenceValues) {
    const KernelTable& k = scalar_kernels();
    const std::vector<double> x{1.0, 2.0, 3.0};
    const std::vector<double> y{4.0, 5.0, 6.0};
    std::vector<double> out(3);
    k.axpy(x.data(), 2.0, y.data(), out.data(), 3);
    EXPECT_EQ(out, (std::vector<double>{9.0, 12.0, 15.0}));
    k.lerp(x.data(), y.data(), 0.5, out.data(), 3);
    EXPECT_EQ(out, (std::vector<double>{2.5, 3.5, 4.5}));
    k.euler(x.data(), y.data(), 1.0, out.data(), 3);
    EXPECT_EQ(out, (std::vector<double>{-2.0, -1.0, 0.0}));
    EXPECT_EQ(k.dot(x.data(), y.data(), 3), 32.0);
    EXPECT_EQ(k.sq_dist(x.data(), y.data(), 3), 27.0);
}

TEST(Simd, SelectingIsaSwitchesActiveTable) {
    const Isa before = active_isa();
    set_active_isa(Isa::Scalar);
    EXPECT_EQ(active_isa(), Isa::Scalar);
    EXPECT_EQ(&active(), &scalar_kernels());
    EXPECT_EQ(to_string(Isa::Scalar), "scalar");
    if (isa_supported(Isa::Avx2)) {
        set_active_isa(Isa::Avx2);
        EXPECT_EQ(active_isa(), Isa::Avx2);
    } else {
        EXPECT_THROW(set_active_isa(Isa::Avx2), Error);
    }
    set_active_isa(before);
}

TEST(Simd, SpanFrontEndsUseActiveTable) {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> out(5);
    lerp(a, out, 0.0, out);
    EXPECT_EQ(out, a);
    EXPECT_EQ(dot(a, a), 55.0);
    EXPECT_EQ(sq_dist(a, out), 0.0);
}

// The analytic denoiser's projections use dot products, so whole runs agree
// across ISAs to rounding rather than bitwise.
TEST_F(Avx2Equivalence, FullRunAgreesAcrossIsas) {
    const CorpusSpec spec;
    const auto prior = std::make_shared<const LinearGaussianPrior>(build_prior(spec));
    const AnalyticDenoiser den(prior, 14, 1e8);
    RunConfig cfg;
    cfg.window = 14;
    cfg.stride = 4;
    cfg.seed = 4;
    const LatentVideo low = sample_pair(*prior, spec, 4).low;
    const Isa before = active_isa();
    set_active_isa(Isa::Scalar);
    const LatentVideo a = diffuse_slide(low, cfg, den).output;
    set_active_isa(Isa::Avx2);
    const LatentVideo b = diffuse_slide(low, cfg, den).output;
    set_active_isa(before);
    for (std::size_t i = 0; i < a.data().size(); ++i) ASSERT_NEAR(a.data()[i], b.data()[i], 1e-9) << i;
}

}  // namespace
}  // namespace dslide::simd
