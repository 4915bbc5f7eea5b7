#include "fundcast/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fundcast/errors.hpp"

namespace fundcast {

namespace {

// A split must beat this slice of the node's SSE to be accepted; it absorbs
// rounding residue on effectively-constant targets.
inline double gain_guard(double sse_total) { return 1e-12 * (1.0 + std::abs(sse_total)); }

inline double midpoint(double lo, double hi) {
    double t = 0.5 * (lo + hi);
    if (!(t > lo)) t = hi;  // guard against rounding down onto the left value
    return t;
}

struct BuildCtx {
    const Matrix& x;
    const std::vector<double>& y;
    std::vector<std::vector<std::uint32_t>> arrs;  // per column: node-ordered instances
    std::vector<std::uint32_t> tmp;
    TreeParams params;
    std::size_t mtry = 0;  // 0 => all columns
    Rng* rng = nullptr;
    std::vector<TreeNode> nodes;
    std::vector<std::size_t> feat_buf;
};

int build_node(BuildCtx& c, std::size_t b, std::size_t e, int depth) {
    const std::size_t p = c.x.cols;
    const double n = static_cast<double>(e - b);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t k = b; k < e; ++k) {
        double t = c.y[c.arrs[0][k]];
        sum += t;
        sumsq += t * t;
    }
    const int idx = static_cast<int>(c.nodes.size());
    TreeNode node;
    node.value = sum / n;
    node.n_samples = static_cast<std::uint32_t>(e - b);
    c.nodes.push_back(node);

    const std::size_t msl = static_cast<std::size_t>(c.params.min_samples_leaf);
    if (depth >= c.params.max_depth || e - b < 2 * msl || e - b < 2) return idx;

    c.feat_buf.clear();
    if (c.mtry == 0 || c.mtry >= p) {
        for (std::size_t f = 0; f < p; ++f) c.feat_buf.push_back(f);
    } else {
        auto picked = c.rng->sample_without_replacement(p, c.mtry);
        std::sort(picked.begin(), picked.end());
        c.feat_buf.assign(picked.begin(), picked.end());
    }

    const double base = sum * sum / n;
    const double sse_total = sumsq - base;
    double best_gain = 0.0;
    int best_f = -1;
    double best_thr = 0.0;
    for (std::size_t f : c.feat_buf) {
        const auto& arr = c.arrs[f];
        const double* col = c.x.col(f);
        double run_n = 0.0, run_sum = 0.0;
        for (std::size_t k = b; k + 1 < e; ++k) {
            const std::uint32_t row = arr[k];
            run_n += 1.0;
            run_sum += c.y[row];
            const double v = col[row];
            const double vnext = col[arr[k + 1]];
            if (vnext == v) continue;  // splits only between distinct values
            const std::size_t n_left = k - b + 1;
            const std::size_t n_right = (e - b) - n_left;
            if (n_left < msl || n_right < msl) continue;
            const double rest = sum - run_sum;
            const double gain =
                run_sum * run_sum / run_n + rest * rest / (n - run_n) - base;
            if (gain > best_gain) {
                best_gain = gain;
                best_f = static_cast<int>(f);
                best_thr = midpoint(v, vnext);
            }
        }
    }
    if (best_f < 0 || !(best_gain > gain_guard(sse_total))) return idx;

    // Stable partition of every column's range by the chosen predicate; all
    // columns hold the same instance multiset, so the boundary agrees.
    std::size_t boundary = b;
    const double* best_col = c.x.col(static_cast<std::size_t>(best_f));
    for (std::size_t f = 0; f < p; ++f) {
        auto& arr = c.arrs[f];
        c.tmp.clear();
        std::size_t w = b;
        for (std::size_t k = b; k < e; ++k) {
            const std::uint32_t row = arr[k];
            if (best_col[row] < best_thr) {
                arr[w++] = row;
            } else {
                c.tmp.push_back(row);
            }
        }
        std::copy(c.tmp.begin(), c.tmp.end(), arr.begin() + static_cast<std::ptrdiff_t>(w));
        boundary = w;
    }

    c.nodes[idx].feature = best_f;
    c.nodes[idx].threshold = best_thr;
    c.nodes[idx].gain = best_gain;
    const int left = build_node(c, b, boundary, depth + 1);
    const int right = build_node(c, boundary, e, depth + 1);
    c.nodes[idx].left = left;
    c.nodes[idx].right = right;
    return idx;
}

}  // namespace

double RegressionTree::predict_row(const Matrix& x, std::size_t row) const {
    if (nodes.empty()) throw StateError("regression tree is not fitted");
    int k = 0;
    while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(k)];
        k = x.at(row, static_cast<std::size_t>(nd.feature)) < nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(k)].value;
}

double RegressionTree::predict_point(const std::vector<double>& x) const {
    if (nodes.empty()) throw StateError("regression tree is not fitted");
    int k = 0;
    while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(k)];
        if (static_cast<std::size_t>(nd.feature) >= x.size()) {
            throw ShapeError("tree input width mismatch");
        }
        k = x[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(k)].value;
}

std::optional<SplitCandidate> best_split(const std::vector<double>& values,
                                         const std::vector<double>& targets,
                                         int min_samples_leaf) {
    if (values.size() != targets.size()) {
        throw ShapeError("best_split: values and targets differ in length");
    }
    const std::size_t n = values.size();
    if (n < 2) return std::nullopt;
    if (min_samples_leaf < 1) throw ParamError("best_split: min_samples_leaf must be >= 1");

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });

    double sum = 0.0, sumsq = 0.0;
    for (double t : targets) {
        sum += t;
        sumsq += t * t;
    }
    const double nn = static_cast<double>(n);
    const double base = sum * sum / nn;
    const double sse_total = sumsq - base;
    const std::size_t msl = static_cast<std::size_t>(min_samples_leaf);

    double best_gain = 0.0;
    double best_thr = 0.0;
    bool found = false;
    double run_n = 0.0, run_sum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        run_n += 1.0;
        run_sum += targets[order[k]];
        const double v = values[order[k]];
        const double vnext = values[order[k + 1]];
        if (vnext == v) continue;
        const std::size_t n_left = k + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < msl || n_right < msl) continue;
        const double rest = sum - run_sum;
        const double gain = run_sum * run_sum / run_n + rest * rest / (nn - run_n) - base;
        if (gain > best_gain) {
            best_gain = gain;
            best_thr = midpoint(v, vnext);
            found = true;
        }
    }
    if (!found || !(best_gain > gain_guard(sse_total))) return std::nullopt;
    return SplitCandidate{best_thr, best_gain};
}

TreeBuilder::TreeBuilder(const Matrix& x) : x_(&x) {
    if (x.rows == 0 || x.cols == 0) throw ShapeError("TreeBuilder: empty matrix");
    sorted_.resize(x.cols);
    for (std::size_t f = 0; f < x.cols; ++f) {
        auto& idx = sorted_[f];
        idx.resize(x.rows);
        std::iota(idx.begin(), idx.end(), 0u);
        const double* col = x.col(f);
        std::stable_sort(idx.begin(), idx.end(),
                         [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }
}

RegressionTree TreeBuilder::build(const std::vector<double>& y,
                                  const std::vector<std::uint32_t>& counts,
                                  const TreeParams& params, std::size_t mtry, Rng* rng) const {
    if (y.size() != x_->rows || counts.size() != x_->rows) {
        throw ShapeError("TreeBuilder::build: target/count length mismatch");
    }
    if (params.max_depth < 0) throw ParamError("max_depth must be >= 0");
    if (params.min_samples_leaf < 1) throw ParamError("min_samples_leaf must be >= 1");
    if (mtry != 0 && mtry < x_->cols && rng == nullptr) {
        throw ParamError("feature subsampling requires an rng");
    }

    std::size_t total = 0;
    for (std::uint32_t c : counts) total += c;
    if (total == 0) throw FitError("TreeBuilder::build: empty sample");

    BuildCtx ctx{*x_, y, {}, {}, params, mtry, rng, {}, {}};
    ctx.arrs.resize(x_->cols);
    for (std::size_t f = 0; f < x_->cols; ++f) {
        auto& arr = ctx.arrs[f];
        arr.reserve(total);
        for (std::uint32_t row : sorted_[f]) {
            for (std::uint32_t c = 0; c < counts[row]; ++c) arr.push_back(row);
        }
    }
    ctx.tmp.reserve(total);

    build_node(ctx, 0, total, 0);
    RegressionTree tree;
    tree.nodes = std::move(ctx.nodes);
    tree.max_depth = params.max_depth;
    tree.min_samples_leaf = params.min_samples_leaf;
    return tree;
}

void accumulate_tree_gains(const RegressionTree& tree, std::vector<double>& gains) {
    for (const auto& nd : tree.nodes) {
        if (nd.feature < 0) continue;
        const auto f = static_cast<std::size_t>(nd.feature);
        if (f >= gains.size()) throw ShapeError("tree references column beyond importance width");
        gains[f] += nd.gain;
    }
}

std::vector<double> normalize_importance(std::vector<double> raw) {
    double total = 0.0;
    for (double g : raw) total += g;
    if (!(total > 0.0)) {
        const double u = raw.empty() ? 0.0 : 1.0 / static_cast<double>(raw.size());
        std::fill(raw.begin(), raw.end(), u);
        return raw;
    }
    for (double& g : raw) g /= total;
    return raw;
}

}  // namespace fundcast
