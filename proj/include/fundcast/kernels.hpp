#pragma once

#include <cstddef>
#include <string>
#include <utility>

namespace fundcast::kernels {

// Numeric inner loops used across the learners and the encoder. Every
// operation has a scalar reference implementation and an AVX2 variant;
// the active backend is chosen at runtime (scalar everywhere AVX2 is
// unavailable). The two backends agree to floating-point tolerance, not
// bit-exactly: FMA contraction changes rounding. Equivalence is enforced
// by tests; anything needing bit-stable output across machines should pin
// the backend explicitly.
enum class Backend { scalar, avx2 };

// Detected-best backend for this process (AVX2 if the CPU and build allow).
Backend detect_backend();
Backend active_backend();
void set_backend(Backend b);
bool avx2_available();
std::string backend_name(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
// Sum of squared deviations from a given center.
double centered_sumsq(const double* x, std::size_t n, double center);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// out[i] = (x[i] - shift) * scale
void scale_shift(const double* x, double* out, std::size_t n, double shift, double scale);

// (mean, population variance); two-pass for accuracy. n must be > 0.
std::pair<double, double> mean_var(const double* x, std::size_t n);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* x, std::size_t n);
double centered_sumsq_scalar(const double* x, std::size_t n, double center);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void scale_shift_scalar(const double* x, double* out, std::size_t n, double shift, double scale);

double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
double centered_sumsq_avx2(const double* x, std::size_t n, double center);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scale_shift_avx2(const double* x, double* out, std::size_t n, double shift, double scale);
}  // namespace detail

}  // namespace fundcast::kernels
