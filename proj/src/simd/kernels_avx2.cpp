#include <immintrin.h>

#include "diffuseslide/simd/kernels.hpp"

namespace dslide::simd {
namespace {

constexpr std::size_t kLanes = 4;

void axpy_avx2(const double* x, double a, const double* y, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i), prod));
    }
    for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void lerp_avx2(const double* x, const double* y, double t, double* out, std::size_t n) {
    const double s = 1.0 - t;
    const __m256d vs = _mm256_set1_pd(s);
    const __m256d vt = _mm256_set1_pd(t);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d lo = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
        const __m256d hi = _mm256_mul_pd(vt, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(lo, hi));
    }
    for (; i < n; ++i) out[i] = s * x[i] + t * y[i];
}

void euler_avx2(const double* z, const double* d, double c, double* out, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d vz = _mm256_loadu_pd(z + i);
        const __m256d diff = _mm256_sub_pd(vz, _mm256_loadu_pd(d + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(vz, _mm256_mul_pd(vc, diff)));
    }
    for (; i < n; ++i) out[i] = z[i] + c * (z[i] - d[i]);
}

void accumulate_avx2(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) acc[i] += x[i];
}

void divide_avx2(double* x, double divisor, std::size_t n) {
    const __m256d vd = _mm256_set1_pd(divisor);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(x + i, _mm256_div_pd(_mm256_loadu_pd(x + i), vd));
    }
    for (; i < n; ++i) x[i] /= divisor;
}

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + kLanes), _mm256_loadu_pd(y + i + kLanes), acc1);
    }
    for (; i + kLanes <= n; i += kLanes) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sq_dist_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

constexpr KernelTable kAvx2{
    axpy_avx2, lerp_avx2, euler_avx2, accumulate_avx2, divide_avx2, dot_avx2, sq_dist_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace dslide::simd
