#pragma once

#include <cstdint>
#include <vector>

#include "fundcast/tree.hpp"

namespace fundcast {

struct GbtParams {
    int n_trees = 200;
    int max_depth = 4;
    int min_samples_leaf = 5;
    double learning_rate = 0.05;
    double subsample = 0.8;  // row fraction per boosting round, without replacement
    std::uint64_t seed = 0;
};

// Stagewise squared-loss boosting over exact CART trees:
// prediction = initial + learning_rate * sum of tree outputs.
struct GradientBoostedTrees {
    double initial_prediction = 0.0;
    double learning_rate = 0.05;
    std::vector<RegressionTree> trees;
    GbtParams params;
    std::size_t n_features = 0;
    bool is_fitted = false;

    double predict_row(const Matrix& x, std::size_t row) const;
    std::vector<double> predict(const Matrix& x) const;
};

GradientBoostedTrees fit_gbt(const Matrix& x, const std::vector<double>& y,
                             const GbtParams& params);

// Per-column share of total split SSE gain, summed over all trees,
// normalized to 1 (uniform when no splits exist).
std::vector<double> model_importance(const GradientBoostedTrees& model);

}  // namespace fundcast
