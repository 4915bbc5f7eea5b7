#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fundcast/errors.hpp"

namespace fundcast {

// mt19937_64 is bit-stable across standard libraries; the <random>
// *distributions* are not, so every draw here is hand-rolled on top of the
// raw engine output to keep generated datasets byte-identical everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0,1) with 53-bit resolution.
    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw ParamError("Rng::below requires n > 0");
        // Rejection sampling to avoid modulo bias.
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    bool bernoulli(double p) { return u01() < p; }

    // Box-Muller; caches the second deviate.
    double normal(double mean = 0.0, double stddev = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = u01(), u2 = u01();
        while (u1 <= 0.0) u1 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return mean + stddev * r * std::cos(a);
    }

    double exponential(double rate = 1.0) {
        double u = u01();
        while (u <= 0.0) u = u01();
        return -std::log(u) / rate;
    }

    // Inversion by sequential search; fine for small lambda.
    int poisson(double lambda) {
        double l = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01();
        } while (p > l);
        return k - 1;
    }

    // Number of failures before first success, support {0,1,2,...}.
    int geometric(double p) {
        double u = u01();
        while (u <= 0.0) u = u01();
        return static_cast<int>(std::floor(std::log(u) / std::log1p(-p)));
    }

    // Integer-shape gamma as a sum of exponentials (all uses here have
    // integral shape).
    double gamma_int(int shape, double scale) {
        double s = 0.0;
        for (int i = 0; i < shape; ++i) s += exponential(1.0);
        return s * scale;
    }

    // Draw an index from an explicit discrete distribution.
    int categorical(const std::vector<double>& probs) {
        double u = u01();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // First k entries of a shuffled [0,n) index vector (sample w/o replacement).
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        for (int i = 0; i < k && i < n; ++i) {
            int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(std::min(n, k));
        return idx;
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fundcast
