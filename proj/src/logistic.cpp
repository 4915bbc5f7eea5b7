#include "fundcast/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "fundcast/errors.hpp"
#include "fundcast/kernels.hpp"

namespace fundcast {

namespace {

inline double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

inline double clamp_prob(double p) {
    return std::min(std::max(p, 1e-15), 1.0 - 1e-15);
}

}  // namespace

double LogisticModel::predict_one(double x) const {
    if (!is_fitted) throw StateError("logistic model is not fitted");
    const double z = input_std > 0.0 ? (x - input_mean) / input_std : 0.0;
    return clamp_prob(sigmoid(intercept + coefficients[0] * z));
}

std::vector<double> LogisticModel::predict(const std::vector<double>& x) const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = predict_one(x[i]);
    return out;
}

double logistic_objective(const std::vector<double>& x_std, const std::vector<std::uint8_t>& y,
                          double intercept, double weight, double lambda) {
    double nll = 0.0;
    for (std::size_t i = 0; i < x_std.size(); ++i) {
        const double z = intercept + weight * x_std[i];
        nll += log1pexp(z) - (y[i] != 0 ? z : 0.0);
    }
    return nll + 0.5 * lambda * weight * weight;
}

void logistic_gradient(const std::vector<double>& x_std, const std::vector<std::uint8_t>& y,
                       double intercept, double weight, double lambda, double* g_intercept,
                       double* g_weight) {
    double gb = 0.0, gw = 0.0;
    for (std::size_t i = 0; i < x_std.size(); ++i) {
        const double r = sigmoid(intercept + weight * x_std[i]) - (y[i] != 0 ? 1.0 : 0.0);
        gb += r;
        gw += r * x_std[i];
    }
    *g_intercept = gb;
    *g_weight = gw + lambda * weight;
}

LogisticModel fit_logistic(const std::vector<double>& x, const std::vector<std::uint8_t>& y,
                           double ridge_lambda) {
    if (!(ridge_lambda > 0.0)) throw ParamError("logistic: ridge_lambda must be > 0");
    if (x.size() != y.size()) throw ShapeError("logistic: input/target length mismatch");
    if (x.empty()) throw FitError("logistic: empty input");
    std::size_t positives = 0;
    for (std::uint8_t t : y) {
        if (t != 0 && t != 1) throw FitError("logistic: targets must be 0 or 1");
        positives += t;
    }
    if (positives == 0 || positives == y.size()) {
        throw FitError("logistic: both classes must be present");
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw FitError("logistic: non-finite input");
    }

    LogisticModel model;
    model.ridge_lambda = ridge_lambda;
    auto [mean, var] = kernels::mean_var(x.data(), x.size());
    model.input_mean = mean;
    model.input_std = std::sqrt(var);
    std::vector<double> xs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xs[i] = model.input_std > 0.0 ? (x[i] - mean) / model.input_std : 0.0;
    }

    const double rate = static_cast<double>(positives) / static_cast<double>(y.size());
    double b = std::log(rate / (1.0 - rate));
    double w = 0.0;
    double obj = logistic_objective(xs, y, b, w, ridge_lambda);

    constexpr int kMaxIter = 100;
    constexpr double kTol = 1e-8;
    double gnorm = 0.0;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        double gb = 0.0, gw = 0.0;
        logistic_gradient(xs, y, b, w, ridge_lambda, &gb, &gw);
        gnorm = std::max(std::abs(gb), std::abs(gw));
        if (gnorm < kTol) {
            model.intercept = b;
            model.coefficients = {w};
            model.newton_iterations = iter;
            model.is_fitted = true;
            return model;
        }
        // Newton direction from the 2x2 Hessian.
        double h00 = 0.0, h01 = 0.0, h11 = ridge_lambda;
        for (double z : xs) {
            const double p = sigmoid(b + w * z);
            const double q = p * (1.0 - p);
            h00 += q;
            h01 += q * z;
            h11 += q * z * z;
        }
        const double det = h00 * h11 - h01 * h01;
        double db, dw;
        if (std::abs(det) > 1e-300) {
            db = -(h11 * gb - h01 * gw) / det;
            dw = -(h00 * gw - h01 * gb) / det;
        } else {
            db = -gb;  // gradient fallback on a flat Hessian
            dw = -gw;
        }
        // Step halving: accept only objective decreases. Near the optimum the
        // objective difference underflows before the gradient reaches kTol;
        // there the full Newton step is trusted (quadratic contraction still
        // shrinks the gradient when f-comparisons are pure rounding noise).
        double step = 1.0;
        double next = logistic_objective(xs, y, b + step * db, w + step * dw, ridge_lambda);
        while (next >= obj && step > 1e-12) {
            step *= 0.5;
            next = logistic_objective(xs, y, b + step * db, w + step * dw, ridge_lambda);
        }
        if (next >= obj) {
            if (gnorm > 1e-3) break;  // stuck far from the optimum: genuine failure
            step = 1.0;
            next = logistic_objective(xs, y, b + db, w + dw, ridge_lambda);
        }
        b += step * db;
        w += step * dw;
        obj = next;
    }
    double gb = 0.0, gw = 0.0;
    logistic_gradient(xs, y, b, w, ridge_lambda, &gb, &gw);
    gnorm = std::max(std::abs(gb), std::abs(gw));
    if (gnorm < kTol) {
        model.intercept = b;
        model.coefficients = {w};
        model.newton_iterations = kMaxIter;
        model.is_fitted = true;
        return model;
    }
    throw ConvergenceError("logistic: no convergence after 100 iterations; final gradient "
                           "max-norm = " +
                           std::to_string(gnorm));
}

}  // namespace fundcast
