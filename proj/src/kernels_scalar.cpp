#include "fundcast/kernels.hpp"

namespace fundcast::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double centered_sumsq_scalar(const double* x, std::size_t n, double center) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - center;
        acc += d * d;
    }
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_shift_scalar(const double* x, double* out, std::size_t n, double shift, double scale) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - shift) * scale;
}

}  // namespace fundcast::kernels::detail
