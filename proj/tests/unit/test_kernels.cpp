#include <doctest.h>

#include <cmath>
#include <vector>

#include "fundcast/kernels.hpp"
#include "fundcast/rng.hpp"

using namespace fundcast;
namespace k = fundcast::kernels;

namespace {

// Plain-loop references, independent of the library's scalar kernels.
double ref_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-3.0, 3.0);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels match hand-computed values") {
    std::vector<double> a{1.0, 2.0, 3.0};
    std::vector<double> b{4.0, 5.0, 6.0};
    CHECK(k::detail::dot_scalar(a.data(), b.data(), 3) == doctest::Approx(32.0).epsilon(1e-15));
    CHECK(k::detail::sum_scalar(a.data(), 3) == doctest::Approx(6.0).epsilon(1e-15));
    // sum((x-2)^2) over {1,2,3} = 1 + 0 + 1
    CHECK(k::detail::centered_sumsq_scalar(a.data(), 3, 2.0) ==
          doctest::Approx(2.0).epsilon(1e-15));

    std::vector<double> y{10.0, 20.0, 30.0};
    k::detail::axpy_scalar(2.0, a.data(), y.data(), 3);
    CHECK(y[0] == doctest::Approx(12.0));
    CHECK(y[1] == doctest::Approx(24.0));
    CHECK(y[2] == doctest::Approx(36.0));

    std::vector<double> out(3);
    k::detail::scale_shift_scalar(a.data(), out.data(), 3, 1.0, 10.0);
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(10.0));
    CHECK(out[2] == doctest::Approx(20.0));
}

TEST_CASE("mean_var is two-pass population moments") {
    std::vector<double> x{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
    auto [mean, var] = k::mean_var(x.data(), x.size());
    CHECK(mean == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(var == doctest::Approx(4.0).epsilon(1e-15));  // classic population-variance example

    std::vector<double> c{3.5, 3.5, 3.5};
    auto [m2, v2] = k::mean_var(c.data(), c.size());
    CHECK(m2 == doctest::Approx(3.5));
    CHECK(v2 == 0.0);

    // Large offset: the two-pass form must not lose the small variance.
    std::vector<double> off{1e9 + 1.0, 1e9 + 2.0, 1e9 + 3.0};
    auto [m3, v3] = k::mean_var(off.data(), off.size());
    CHECK(m3 == doctest::Approx(1e9 + 2.0));
    CHECK(v3 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("kernel edge sizes") {
    CHECK(k::dot(nullptr, nullptr, 0) == 0.0);
    CHECK(k::sum(nullptr, 0) == 0.0);
    double one = 7.5;
    CHECK(k::dot(&one, &one, 1) == doctest::Approx(56.25));
}

TEST_CASE("avx2 backend agrees with scalar to floating tolerance") {
    if (!k::avx2_available()) {
        MESSAGE("AVX2 unavailable; dispatch equivalence not exercised on this host");
        return;
    }
    Rng rng(2024);
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 64u, 65u, 251u}) {
        std::vector<double> a = random_vec(rng, n);
        std::vector<double> b = random_vec(rng, n);

        const double tol = 1e-12 * (1.0 + static_cast<double>(n));
        CHECK(k::detail::dot_avx2(a.data(), b.data(), n) ==
              doctest::Approx(ref_dot(a, b)).epsilon(tol));
        CHECK(k::detail::sum_avx2(a.data(), n) ==
              doctest::Approx(k::detail::sum_scalar(a.data(), n)).epsilon(tol));
        CHECK(k::detail::centered_sumsq_avx2(a.data(), n, 0.37) ==
              doctest::Approx(k::detail::centered_sumsq_scalar(a.data(), n, 0.37)).epsilon(tol));

        std::vector<double> y1 = b, y2 = b;
        k::detail::axpy_scalar(1.73, a.data(), y1.data(), n);
        k::detail::axpy_avx2(1.73, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));

        std::vector<double> o1(n), o2(n);
        k::detail::scale_shift_scalar(a.data(), o1.data(), n, 0.2, 1.9);
        k::detail::scale_shift_avx2(a.data(), o2.data(), n, 0.2, 1.9);
        for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-12));
    }
}

TEST_CASE("backend dispatch is switchable and restores") {
    const k::Backend before = k::active_backend();
    k::set_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    CHECK(k::backend_name(k::Backend::scalar) == "scalar");
    CHECK(k::backend_name(k::Backend::avx2) == "avx2");

    std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const double scalar_dot = k::dot(a.data(), a.data(), a.size());
    if (k::avx2_available()) {
        k::set_backend(k::Backend::avx2);
        CHECK(k::active_backend() == k::Backend::avx2);
        CHECK(k::dot(a.data(), a.data(), a.size()) ==
              doctest::Approx(scalar_dot).epsilon(1e-12));
    }
    k::set_backend(before);
}
