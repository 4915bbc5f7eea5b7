#include "fundcast/gbt.hpp"

#include <cmath>

#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"

namespace fundcast {

double GradientBoostedTrees::predict_row(const Matrix& x, std::size_t row) const {
    if (!is_fitted) throw StateError("gbt: model is not fitted");
    if (x.cols != n_features) {
        throw ShapeError("gbt: input width " + std::to_string(x.cols) + " != fitted width " +
                         std::to_string(n_features));
    }
    double acc = initial_prediction;
    for (const auto& tree : trees) acc += learning_rate * tree.predict_row(x, row);
    return acc;
}

std::vector<double> GradientBoostedTrees::predict(const Matrix& x) const {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_row(x, i);
    return out;
}

GradientBoostedTrees fit_gbt(const Matrix& x, const std::vector<double>& y,
                             const GbtParams& params) {
    if (params.n_trees < 0) throw ParamError("gbt: n_trees must be >= 0");
    if (!(params.learning_rate > 0.0)) throw ParamError("gbt: learning_rate must be > 0");
    if (!(params.subsample > 0.0) || params.subsample > 1.0) {
        throw ParamError("gbt: subsample must be in (0, 1]");
    }
    if (params.max_depth < 1) throw ParamError("gbt: max_depth must be >= 1");
    if (params.min_samples_leaf < 1) throw ParamError("gbt: min_samples_leaf must be >= 1");
    if (x.rows < 2) throw FitError("gbt: need at least 2 rows");
    if (y.size() != x.rows) throw ShapeError("gbt: target length mismatch");
    for (double t : y) {
        if (!std::isfinite(t)) throw FitError("gbt: non-finite target");
    }

    GradientBoostedTrees model;
    model.params = params;
    model.learning_rate = params.learning_rate;
    model.n_features = x.cols;

    const std::size_t n = x.rows;
    double mean = 0.0;
    for (double t : y) mean += t;
    mean /= static_cast<double>(n);
    model.initial_prediction = mean;

    if (params.n_trees > 0) {
        TreeBuilder builder(x);
        Rng rng(derive_seed(params.seed, "gbt"));
        const bool full = params.subsample >= 1.0;
        const std::size_t m =
            full ? n
                 : std::max<std::size_t>(
                       1, static_cast<std::size_t>(std::floor(params.subsample *
                                                              static_cast<double>(n))));
        std::vector<double> f(n, mean);
        std::vector<double> residual(n);
        std::vector<std::uint32_t> counts(n, 1u);
        const TreeParams tp{params.max_depth, params.min_samples_leaf};
        model.trees.reserve(static_cast<std::size_t>(params.n_trees));
        for (int t = 0; t < params.n_trees; ++t) {
            if (!full) {
                std::fill(counts.begin(), counts.end(), 0u);
                for (std::size_t i : rng.sample_without_replacement(n, m)) counts[i] = 1u;
            }
            for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - f[i];
            RegressionTree tree = builder.build(residual, counts, tp, 0, nullptr);
            for (std::size_t i = 0; i < n; ++i) {
                f[i] += params.learning_rate * tree.predict_row(x, i);
            }
            model.trees.push_back(std::move(tree));
        }
    }
    model.is_fitted = true;
    return model;
}

std::vector<double> model_importance(const GradientBoostedTrees& model) {
    if (!model.is_fitted) throw StateError("gbt: importance of unfitted model");
    std::vector<double> gains(model.n_features, 0.0);
    for (const auto& tree : model.trees) accumulate_tree_gains(tree, gains);
    return normalize_importance(std::move(gains));
}

}  // namespace fundcast
