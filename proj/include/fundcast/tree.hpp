#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fundcast/encode.hpp"
#include "fundcast/rng.hpp"

namespace fundcast {

struct TreeNode {
    int feature = -1;  // column index; -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;       // leaf prediction: mean of training targets
    double gain = 0.0;        // SSE reduction recorded when this node split
    std::uint32_t n_samples = 0;  // training instances (with multiplicity)
};

struct TreeParams {
    int max_depth = 4;
    int min_samples_leaf = 1;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root when non-empty
    int max_depth = 0;
    int min_samples_leaf = 1;

    bool fitted() const { return !nodes.empty(); }
    double predict_row(const Matrix& x, std::size_t row) const;
    double predict_point(const std::vector<double>& x) const;
};

struct SplitCandidate {
    double threshold = 0.0;
    double gain = 0.0;  // SSE reduction
};

// Exact CART split search over one column: threshold is the midpoint between
// adjacent distinct sorted values maximizing SSE reduction; ties break toward
// the lowest threshold. Returns nullopt when no split clears the gain guard
// or min_samples_leaf.
std::optional<SplitCandidate> best_split(const std::vector<double>& values,
                                         const std::vector<double>& targets,
                                         int min_samples_leaf = 1);

// Builds exact CART trees against a fixed design matrix. Columns are sorted
// once at construction; each build partitions per-node index ranges instead
// of re-sorting, so repeated fits (boosting rounds, forest members) stay
// cheap. Sample multiplicities come in through `counts`.
class TreeBuilder {
  public:
    explicit TreeBuilder(const Matrix& x);

    // counts[i] = multiplicity of row i in this tree's sample. mtry = number
    // of candidate features per node (0 or >= n_cols means all; rng is only
    // consumed when a strict subset is drawn). Ties break toward the lowest
    // feature index, then the lowest threshold.
    RegressionTree build(const std::vector<double>& y, const std::vector<std::uint32_t>& counts,
                         const TreeParams& params, std::size_t mtry, Rng* rng) const;

    std::size_t n_cols() const { return x_->cols; }

  private:
    const Matrix* x_;
    std::vector<std::vector<std::uint32_t>> sorted_;  // per column: rows by ascending value
};

// Per-column SSE-gain totals over all splits of one tree, accumulated into
// `gains` (length = column count of the fit matrix).
void accumulate_tree_gains(const RegressionTree& tree, std::vector<double>& gains);

// Normalizes raw importances to sum 1; an all-zero vector becomes uniform.
std::vector<double> normalize_importance(std::vector<double> raw);

}  // namespace fundcast
