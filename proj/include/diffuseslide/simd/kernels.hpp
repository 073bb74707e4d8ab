#pragma once

// Data-parallel inner loops used by the latent pipeline. Every kernel has a
// scalar reference implementation; wider variants are chosen once at startup
// from the host CPU's capabilities.
//
// Elementwise kernels are required to round exactly like the scalar
// reference (no fused multiply-add), so pipeline outputs do not depend on the
// selected ISA. Reductions (dot, sq_dist) may reassociate and only agree to
// within floating-point tolerance.

#include <cstddef>
#include <span>
#include <string_view>

namespace dslide::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
    // out = x + a * y
    void (*axpy)(const double* x, double a, const double* y, double* out, std::size_t n);
    // out = (1 - t) * x + t * y
    void (*lerp)(const double* x, const double* y, double t, double* out, std::size_t n);
    // out = z + c * (z - d)
    void (*euler)(const double* z, const double* d, double c, double* out, std::size_t n);
    // acc += x
    void (*accumulate)(double* acc, const double* x, std::size_t n);
    // x /= divisor
    void (*divide)(double* x, double divisor, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum (x - y)^2
    double (*sq_dist)(const double* x, const double* y, std::size_t n);
};

const KernelTable& scalar_kernels();
// Null when the variant was not compiled in.
const KernelTable* avx2_kernels();

bool isa_supported(Isa isa);
Isa active_isa();
// Throws dslide::Error(Unsupported) if the host cannot run `isa`.
void set_active_isa(Isa isa);
const KernelTable& active();

// Span front-ends over the active table.
void axpy(std::span<const double> x, double a, std::span<const double> y, std::span<double> out);
void lerp(std::span<const double> x, std::span<const double> y, double t, std::span<double> out);
void euler(std::span<const double> z, std::span<const double> d, double c, std::span<double> out);
void accumulate(std::span<double> acc, std::span<const double> x);
void divide(std::span<double> x, double divisor);
double dot(std::span<const double> x, std::span<const double> y);
double sq_dist(std::span<const double> x, std::span<const double> y);

}  // namespace dslide::simd
