#include "fundcast/forest.hpp"

#include <cmath>

#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"

namespace fundcast {

double RandomForest::predict_row(const Matrix& x, std::size_t row) const {
    if (!is_fitted) throw StateError("random forest: model is not fitted");
    if (x.cols != n_features) {
        throw ShapeError("random forest: input width " + std::to_string(x.cols) +
                         " != fitted width " + std::to_string(n_features));
    }
    double acc = 0.0;
    for (const auto& tree : trees) acc += tree.predict_row(x, row);
    return acc / static_cast<double>(trees.size());
}

std::vector<double> RandomForest::predict(const Matrix& x) const {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_row(x, i);
    return out;
}

RandomForest fit_rf(const Matrix& x, const std::vector<double>& y, const RfParams& params) {
    if (params.n_trees <= 0) throw ParamError("random forest: n_trees must be >= 1");
    if (params.max_depth < 1) throw ParamError("random forest: max_depth must be >= 1");
    if (params.min_samples_leaf < 1) {
        throw ParamError("random forest: min_samples_leaf must be >= 1");
    }
    if (!(params.max_features > 0.0) || params.max_features > 1.0) {
        throw ParamError("random forest: max_features must be in (0, 1]");
    }
    if (x.rows < 2) throw FitError("random forest: need at least 2 rows");
    if (y.size() != x.rows) throw ShapeError("random forest: target length mismatch");
    for (double t : y) {
        if (!std::isfinite(t)) throw FitError("random forest: non-finite target");
    }

    RandomForest model;
    model.params = params;
    model.n_features = x.cols;

    const std::size_t n = x.rows;
    const std::size_t p = x.cols;
    std::size_t mtry = static_cast<std::size_t>(
        std::llround(params.max_features * static_cast<double>(p)));
    mtry = std::min(std::max<std::size_t>(mtry, 1), p);

    TreeBuilder builder(x);
    const TreeParams tp{params.max_depth, params.min_samples_leaf};
    std::vector<std::uint32_t> counts(n, 1u);
    model.trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(params.seed, "rf_tree", static_cast<std::uint64_t>(t)));
        if (params.bootstrap) {
            std::fill(counts.begin(), counts.end(), 0u);
            for (std::size_t k = 0; k < n; ++k) ++counts[rng.below(n)];
        }
        model.trees.push_back(builder.build(y, counts, tp, mtry >= p ? 0 : mtry, &rng));
    }
    model.is_fitted = true;
    return model;
}

std::vector<double> model_importance(const RandomForest& model) {
    if (!model.is_fitted) throw StateError("random forest: importance of unfitted model");
    std::vector<double> gains(model.n_features, 0.0);
    for (const auto& tree : model.trees) accumulate_tree_gains(tree, gains);
    return normalize_importance(std::move(gains));
}

}  // namespace fundcast
