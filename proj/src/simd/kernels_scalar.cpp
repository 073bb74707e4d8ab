#include "diffuseslide/simd/kernels.hpp"

namespace dslide::simd {
namespace {

void axpy_scalar(const double* x, double a, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
}

void lerp_scalar(const double* x, const double* y, double t, double* out, std::size_t n) {
    const double s = 1.0 - t;
    for (std::size_t i = 0; i < n; ++i) out[i] = s * x[i] + t * y[i];
}

void euler_scalar(const double* z, const double* d, double c, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = z[i] + c * (z[i] - d[i]);
}

void accumulate_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void divide_scalar(double* x, double divisor, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] /= divisor;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sq_dist_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

constexpr KernelTable kScalar{
    axpy_scalar, lerp_scalar, euler_scalar, accumulate_scalar, divide_scalar, dot_scalar, sq_dist_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace dslide::simd
