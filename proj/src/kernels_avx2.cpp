// Compiled with -mavx2 -mfma when the compiler supports it; execution is
// gated behind the runtime CPU check in kernels_dispatch.cpp.
#include "fundcast/kernels.hpp"

#if defined(FUNDCAST_HAVE_AVX2) && defined(__x86_64__)
#include <immintrin.h>

namespace fundcast::kernels::detail {

namespace {
double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}
}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return hsum(acc) + tail;
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i];
    return hsum(acc) + tail;
}

double centered_sumsq_avx2(const double* x, std::size_t n, double center) {
    __m256d acc = _mm256_setzero_pd();
    __m256d c = _mm256_set1_pd(center);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), c);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        double d = x[i] - center;
        tail += d * d;
    }
    return hsum(acc) + tail;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yi = _mm256_loadu_pd(y + i);
        yi = _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), yi);
        _mm256_storeu_pd(y + i, yi);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_shift_avx2(const double* x, double* out, std::size_t n, double shift, double scale) {
    __m256d sh = _mm256_set1_pd(shift);
    __m256d sc = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_sub_pd(_mm256_loadu_pd(x + i), sh);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(v, sc));
    }
    for (; i < n; ++i) out[i] = (x[i] - shift) * scale;
}

}  // namespace fundcast::kernels::detail

#else

// Fallback bodies keep the symbol table identical on non-AVX2 builds;
// dispatch never routes here because avx2_available() is false.
namespace fundcast::kernels::detail {

double dot_avx2(const double* a, const double* b, std::size_t n) { return dot_scalar(a, b, n); }
double sum_avx2(const double* x, std::size_t n) { return sum_scalar(x, n); }
double centered_sumsq_avx2(const double* x, std::size_t n, double center) {
    return centered_sumsq_scalar(x, n, center);
}
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    axpy_scalar(alpha, x, y, n);
}
void scale_shift_avx2(const double* x, double* out, std::size_t n, double shift, double scale) {
    scale_shift_scalar(x, out, n, shift, scale);
}

}  // namespace fundcast::kernels::detail

#endif
