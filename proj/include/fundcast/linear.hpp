#pragma once

#include <vector>

#include "fundcast/encode.hpp"

namespace fundcast {

// Ridge regression fit by centered normal equations with a Cholesky solve.
// Minimizes ||y - Xb - c||^2 + lambda*||b||^2 (intercept unpenalized).
struct LinearModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    double ridge_lambda = 0.0;
    std::vector<double> input_std;  // population std per input column (importance scale)
    bool is_fitted = false;

    double predict_row(const Matrix& x, std::size_t row) const;
    std::vector<double> predict(const Matrix& x) const;
    double predict_point(const std::vector<double>& x) const;
};

LinearModel fit_linear(const Matrix& x, const std::vector<double>& y, double ridge_lambda);

// |coefficient| * input-column std, normalized to sum 1 (uniform if all zero).
std::vector<double> model_importance(const LinearModel& model);

}  // namespace fundcast
