#pragma once

#include <cstdint>
#include <vector>

#include "fundcast/tree.hpp"

namespace fundcast {

struct RfParams {
    int n_trees = 300;
    int max_depth = 12;
    int min_samples_leaf = 5;
    double max_features = 1.0 / 3.0;  // fraction of columns considered per split
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

// Bagged exact CART trees; prediction = mean over trees.
struct RandomForest {
    std::vector<RegressionTree> trees;
    RfParams params;
    std::size_t n_features = 0;
    bool is_fitted = false;

    double predict_row(const Matrix& x, std::size_t row) const;
    std::vector<double> predict(const Matrix& x) const;
};

RandomForest fit_rf(const Matrix& x, const std::vector<double>& y, const RfParams& params);

std::vector<double> model_importance(const RandomForest& model);

}  // namespace fundcast
