#include "fundcast/kernels.hpp"

namespace fundcast::kernels {

namespace {
Backend g_backend = detect_backend();
}

bool avx2_available() {
#if defined(FUNDCAST_HAVE_AVX2) && defined(__x86_64__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect_backend() { return avx2_available() ? Backend::avx2 : Backend::scalar; }

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
    g_backend = b;
}

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

double dot(const double* a, const double* b, std::size_t n) {
    return g_backend == Backend::avx2 ? detail::dot_avx2(a, b, n) : detail::dot_scalar(a, b, n);
}

double sum(const double* x, std::size_t n) {
    return g_backend == Backend::avx2 ? detail::sum_avx2(x, n) : detail::sum_scalar(x, n);
}

double centered_sumsq(const double* x, std::size_t n, double center) {
    return g_backend == Backend::avx2 ? detail::centered_sumsq_avx2(x, n, center)
                                      : detail::centered_sumsq_scalar(x, n, center);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    if (g_backend == Backend::avx2)
        detail::axpy_avx2(alpha, x, y, n);
    else
        detail::axpy_scalar(alpha, x, y, n);
}

void scale_shift(const double* x, double* out, std::size_t n, double shift, double scale) {
    if (g_backend == Backend::avx2)
        detail::scale_shift_avx2(x, out, n, shift, scale);
    else
        detail::scale_shift_scalar(x, out, n, shift, scale);
}

std::pair<double, double> mean_var(const double* x, std::size_t n) {
    double mean = sum(x, n) / static_cast<double>(n);
    double var = centered_sumsq(x, n, mean) / static_cast<double>(n);
    return {mean, var};
}

}  // namespace fundcast::kernels
