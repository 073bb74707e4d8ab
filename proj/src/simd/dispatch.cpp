#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "diffuseslide/errors.hpp"
#include "diffuseslide/simd/kernels.hpp"

namespace dslide::simd {

#ifndef DIFFUSESLIDE_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(DIFFUSESLIDE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect() {
    // DIFFUSESLIDE_SIMD=scalar forces the reference kernels.
    if (const char* env = std::getenv("DIFFUSESLIDE_SIMD")) {
        const std::string v(env);
        if (v == "scalar") return Isa::Scalar;
    }
    return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2: return avx2_kernels() != nullptr && cpu_has_avx2();
    }
    return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_supported(isa)) {
        fail(ErrorKind::Unsupported, "SIMD variant not available on this host: " + std::string(to_string(isa)));
    }
    current().store(isa, std::memory_order_relaxed);
}

const KernelTable& active() {
    return active_isa() == Isa::Avx2 ? *avx2_kernels() : scalar_kernels();
}

void axpy(std::span<const double> x, double a, std::span<const double> y, std::span<double> out) {
    assert(x.size() == y.size() && x.size() == out.size());
    active().axpy(x.data(), a, y.data(), out.data(), out.size());
}

void lerp(std::span<const double> x, std::span<const double> y, double t, std::span<double> out) {
    assert(x.size() == y.size() && x.size() == out.size());
    active().lerp(x.data(), y.data(), t, out.data(), out.size());
}

void euler(std::span<const double> z, std::span<const double> d, double c, std::span<double> out) {
    assert(z.size() == d.size() && z.size() == out.size());
    active().euler(z.data(), d.data(), c, out.data(), out.size());
}

void accumulate(std::span<double> acc, std::span<const double> x) {
    assert(acc.size() == x.size());
    active().accumulate(acc.data(), x.data(), acc.size());
}

void divide(std::span<double> x, double divisor) { active().divide(x.data(), divisor, x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return active().dot(x.data(), y.data(), x.size());
}

double sq_dist(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return active().sq_dist(x.data(), y.data(), x.size());
}

}  // namespace dslide::simd
