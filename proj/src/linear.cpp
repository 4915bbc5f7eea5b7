#include "fundcast/linear.hpp"

#include <cmath>

#include "fundcast/errors.hpp"
#include "fundcast/kernels.hpp"
#include "fundcast/tree.hpp"

namespace fundcast {

namespace {

// In-place Cholesky factorization of a p*p row-major SPD matrix; returns
// false on a non-positive pivot.
bool cholesky(std::vector<double>& a, std::size_t p) {
    for (std::size_t j = 0; j < p; ++j) {
        double d = a[j * p + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
        if (!(d > 0.0)) return false;
        const double l = std::sqrt(d);
        a[j * p + j] = l;
        for (std::size_t i = j + 1; i < p; ++i) {
            double s = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
            a[i * p + j] = s / l;
        }
    }
    return true;
}

void cholesky_solve(const std::vector<double>& l, std::size_t p, std::vector<double>& b) {
    for (std::size_t i = 0; i < p; ++i) {  // L z = b
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * p + k] * b[k];
        b[i] = s / l[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {  // L^T x = z
        double s = b[ii];
        for (std::size_t k = ii + 1; k < p; ++k) s -= l[k * p + ii] * b[k];
        b[ii] = s / l[ii * p + ii];
    }
}

}  // namespace

double LinearModel::predict_row(const Matrix& x, std::size_t row) const {
    if (!is_fitted) throw StateError("linear model is not fitted");
    if (x.cols != coefficients.size()) {
        throw ShapeError("linear model: input width " + std::to_string(x.cols) +
                         " != fitted width " + std::to_string(coefficients.size()));
    }
    double acc = intercept;
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        acc += coefficients[j] * x.at(row, j);
    }
    return acc;
}

std::vector<double> LinearModel::predict(const Matrix& x) const {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_row(x, i);
    return out;
}

double LinearModel::predict_point(const std::vector<double>& x) const {
    if (!is_fitted) throw StateError("linear model is not fitted");
    if (x.size() != coefficients.size()) {
        throw ShapeError("linear model: input width " + std::to_string(x.size()) +
                         " != fitted width " + std::to_string(coefficients.size()));
    }
    double acc = intercept;
    for (std::size_t j = 0; j < coefficients.size(); ++j) acc += coefficients[j] * x[j];
    return acc;
}

LinearModel fit_linear(const Matrix& x, const std::vector<double>& y, double ridge_lambda) {
    if (ridge_lambda < 0.0) throw ParamError("linear: ridge_lambda must be >= 0");
    if (x.rows == 0 || x.cols == 0) throw FitError("linear: empty design matrix");
    if (y.size() != x.rows) throw ShapeError("linear: target length mismatch");
    const std::size_t n = x.rows;
    const std::size_t p = x.cols;
    if (ridge_lambda == 0.0 && n < p) {
        throw SingularError("linear: underdetermined system (" + std::to_string(n) + " rows, " +
                            std::to_string(p) + " columns) with lambda = 0");
    }
    for (double t : y) {
        if (!std::isfinite(t)) throw FitError("linear: non-finite target");
    }
    for (double v : x.data) {
        if (!std::isfinite(v)) throw FitError("linear: non-finite input");
    }

    // Center columns and target; solve (Xc^T Xc + lambda I) b = Xc^T yc.
    Matrix xc(n, p);
    std::vector<double> col_mean(p), col_std(p);
    for (std::size_t j = 0; j < p; ++j) {
        auto [mean, var] = kernels::mean_var(x.col(j), n);
        col_mean[j] = mean;
        col_std[j] = std::sqrt(var);
        kernels::scale_shift(x.col(j), xc.col(j), n, mean, 1.0);
    }
    double y_mean = 0.0;
    for (double t : y) y_mean += t;
    y_mean /= static_cast<double>(n);
    std::vector<double> yc(n);
    for (std::size_t i = 0; i < n; ++i) yc[i] = y[i] - y_mean;

    std::vector<double> gram(p * p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k <= j; ++k) {
            const double g = kernels::dot(xc.col(j), xc.col(k), n);
            gram[j * p + k] = g;
            gram[k * p + j] = g;
        }
        gram[j * p + j] += ridge_lambda;
    }
    std::vector<double> rhs(p);
    for (std::size_t j = 0; j < p; ++j) rhs[j] = kernels::dot(xc.col(j), yc.data(), n);

    if (!cholesky(gram, p)) {
        throw SingularError("linear: normal equations are singular (lambda = " +
                            std::to_string(ridge_lambda) + ")");
    }
    cholesky_solve(gram, p, rhs);

    LinearModel model;
    model.ridge_lambda = ridge_lambda;
    model.coefficients = rhs;
    model.input_std = col_std;
    double b0 = y_mean;
    for (std::size_t j = 0; j < p; ++j) b0 -= rhs[j] * col_mean[j];
    model.intercept = b0;
    model.is_fitted = true;
    return model;
}

std::vector<double> model_importance(const LinearModel& model) {
    if (!model.is_fitted) throw StateError("linear: importance of unfitted model");
    std::vector<double> raw(model.coefficients.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
        raw[j] = std::abs(model.coefficients[j]) * model.input_std[j];
    }
    return normalize_importance(std::move(raw));
}

}  // namespace fundcast
