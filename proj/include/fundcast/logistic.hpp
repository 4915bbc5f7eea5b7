#pragma once

#include <cstdint>
#include <vector>

namespace fundcast {

// One-dimensional L2-regularized logistic regression fitted by damped Newton
// iterations on internally standardized input. Objective (minimized):
// negative log-likelihood + (lambda/2) * w^2, intercept unpenalized.
struct LogisticModel {
    double intercept = 0.0;
    std::vector<double> coefficients;  // length 1: weight on the standardized input
    double ridge_lambda = 1e-3;
    double input_mean = 0.0;
    double input_std = 1.0;
    int newton_iterations = 0;
    bool is_fitted = false;

    double predict_one(double x) const;  // probability in (0,1)
    std::vector<double> predict(const std::vector<double>& x) const;
};

// Penalized negative log-likelihood and its gradient w.r.t. (intercept, w)
// on already-standardized inputs; exposed so tests can check the analytic
// gradient against central finite differences.
double logistic_objective(const std::vector<double>& x_std, const std::vector<std::uint8_t>& y,
                          double intercept, double weight, double lambda);
void logistic_gradient(const std::vector<double>& x_std, const std::vector<std::uint8_t>& y,
                       double intercept, double weight, double lambda, double* g_intercept,
                       double* g_weight);

// Converges when the gradient max-norm drops below 1e-8 within 100 damped
// Newton iterations; single-class targets raise FitError, non-convergence
// raises ConvergenceError carrying the final norm.
LogisticModel fit_logistic(const std::vector<double>& x, const std::vector<std::uint8_t>& y,
                           double ridge_lambda);

}  // namespace fundcast
