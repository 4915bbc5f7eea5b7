#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "fundcast/errors.hpp"
#include "fundcast/rng.hpp"
#include "fundcast/tree.hpp"

using namespace fundcast;

// Reference CART implementation, structured nothing like the production
// builder: it carries an explicit member list per node and re-sorts it for
// every candidate feature at every node (the production builder sorts each
// column once and stably partitions index ranges). With integer-valued
// features and targets every sum below is exact, so the two implementations
// must agree bit-for-bit on structure, thresholds, leaf values, and gains.
namespace oracle {

struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double gain = 0.0;
    std::uint32_t n_samples = 0;
};

int grow(const Matrix& x, const std::vector<double>& y,
         const std::vector<std::uint32_t>& members, int depth, const TreeParams& p,
         std::vector<Node>& out) {
    const double n = static_cast<double>(members.size());
    double sum = 0.0, sumsq = 0.0;
    for (std::uint32_t r : members) {
        sum += y[r];
        sumsq += y[r] * y[r];
    }
    const int idx = static_cast<int>(out.size());
    Node node;
    node.value = sum / n;
    node.n_samples = static_cast<std::uint32_t>(members.size());
    out.push_back(node);

    const std::size_t msl = static_cast<std::size_t>(p.min_samples_leaf);
    if (depth >= p.max_depth || members.size() < 2 * msl || members.size() < 2) return idx;

    const double base = sum * sum / n;
    const double sse_total = sumsq - base;
    double best_gain = 0.0, best_thr = 0.0;
    int best_f = -1;
    for (std::size_t f = 0; f < x.cols; ++f) {
        std::vector<std::uint32_t> order = members;
        const double* col = x.col(f);
        std::stable_sort(order.begin(), order.end(),
                         [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
        double run_n = 0.0, run_sum = 0.0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            run_n += 1.0;
            run_sum += y[order[k]];
            const double v = col[order[k]];
            const double vnext = col[order[k + 1]];
            if (vnext == v) continue;
            const std::size_t n_left = k + 1;
            const std::size_t n_right = order.size() - n_left;
            if (n_left < msl || n_right < msl) continue;
            const double rest = sum - run_sum;
            const double gain = run_sum * run_sum / run_n + rest * rest / (n - run_n) - base;
            if (gain > best_gain) {
                best_gain = gain;
                best_f = static_cast<int>(f);
                double t = 0.5 * (v + vnext);
                if (!(t > v)) t = vnext;
                best_thr = t;
            }
        }
    }
    if (best_f < 0 || !(best_gain > 1e-12 * (1.0 + std::abs(sse_total)))) return idx;

    std::vector<std::uint32_t> left_rows, right_rows;
    const double* bcol = x.col(static_cast<std::size_t>(best_f));
    for (std::uint32_t r : members) (bcol[r] < best_thr ? left_rows : right_rows).push_back(r);

    out[idx].feature = best_f;
    out[idx].threshold = best_thr;
    out[idx].gain = best_gain;
    const int l = grow(x, y, left_rows, depth + 1, p, out);
    const int r = grow(x, y, right_rows, depth + 1, p, out);
    out[idx].left = l;
    out[idx].right = r;
    return idx;
}

std::vector<Node> build(const Matrix& x, const std::vector<double>& y,
                        const std::vector<std::uint32_t>& counts, const TreeParams& p) {
    std::vector<std::uint32_t> members;
    for (std::uint32_t r = 0; r < x.rows; ++r)
        for (std::uint32_t c = 0; c < counts[r]; ++c) members.push_back(r);
    std::vector<Node> out;
    grow(x, y, members, 0, p, out);
    return out;
}

}  // namespace oracle

namespace {

std::string diff_tree(const RegressionTree& got, const std::vector<oracle::Node>& want) {
    if (got.nodes.size() != want.size()) {
        return "node count " + std::to_string(got.nodes.size()) + " vs " +
               std::to_string(want.size());
    }
    for (std::size_t i = 0; i < want.size(); ++i) {
        const TreeNode& g = got.nodes[i];
        const oracle::Node& w = want[i];
        const bool split_mismatch =
            w.feature >= 0 && (g.threshold != w.threshold || g.gain != w.gain);
        if (g.feature != w.feature || g.left != w.left || g.right != w.right ||
            g.n_samples != w.n_samples || g.value != w.value || split_mismatch) {
            std::ostringstream os;
            os << "node " << i << ": got(f=" << g.feature << " thr=" << g.threshold
               << " val=" << g.value << " gain=" << g.gain << " n=" << g.n_samples
               << " l=" << g.left << " r=" << g.right << ") want(f=" << w.feature
               << " thr=" << w.threshold << " val=" << w.value << " gain=" << w.gain
               << " n=" << w.n_samples << " l=" << w.left << " r=" << w.right << ")";
            return os.str();
        }
    }
    return {};
}

}  // namespace

TEST_CASE("production trees match the per-node-sort reference on 200 random instances") {
    Rng rng(20251107);
    int compared = 0;
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 5 + static_cast<std::size_t>(rng.below(46));  // 5..50 rows
        const std::size_t p = 1 + static_cast<std::size_t>(rng.below(5));   // 1..5 features
        Matrix x(n, p);
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t i = 0; i < n; ++i)
                x.at(i, j) = static_cast<double>(rng.below(10));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(rng.below(8));

        TreeParams params;
        params.max_depth = 1 + static_cast<int>(rng.below(5));
        params.min_samples_leaf = 1 + static_cast<int>(rng.below(4));

        std::vector<std::uint32_t> counts(n, 1);
        if (inst % 2 == 1) {  // bootstrap-like multiplicities on half the instances
            std::uint32_t total = 0;
            for (auto& c : counts) {
                c = static_cast<std::uint32_t>(rng.below(4));
                total += c;
            }
            if (total == 0) counts[0] = 2;
        }

        TreeBuilder builder(x);
        RegressionTree got = builder.build(y, counts, params, 0, nullptr);
        std::vector<oracle::Node> want = oracle::build(x, y, counts, params);
        const std::string diff = diff_tree(got, want);
        CHECK_MESSAGE(diff.empty(), "instance ", inst, ": ", diff);
        if (!diff.empty()) break;  // one detailed mismatch is enough
        ++compared;
    }
    CHECK(compared == 200);
}

TEST_CASE("hand case: clean step function splits at the midpoint") {
    Matrix x(4, 1);
    for (int i = 0; i < 4; ++i) x.at(static_cast<std::size_t>(i), 0) = i + 1.0;
    const std::vector<double> y = {0, 0, 10, 10};
    TreeBuilder builder(x);
    RegressionTree t = builder.build(y, {1, 1, 1, 1}, TreeParams{1, 1}, 0, nullptr);
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold == 2.5);
    // SSE drops from 100 to 0: left (0,0), right (10,10).
    CHECK(t.nodes[0].gain == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(t.nodes[0].n_samples == 4);
    REQUIRE(t.nodes[0].left == 1);   // children allocated left-first, pre-order
    REQUIRE(t.nodes[0].right == 2);
    CHECK(t.nodes[1].value == 0.0);
    CHECK(t.nodes[2].value == 10.0);
    CHECK(t.predict_point({2.4}) == 0.0);
    CHECK(t.predict_point({2.5}) == 10.0);  // boundary routes right (x < thr goes left)
    CHECK(t.predict_row(x, 0) == 0.0);
    CHECK(t.predict_row(x, 3) == 10.0);
}

TEST_CASE("best_split hand values, guards, and tie direction") {
    SUBCASE("step function") {
        auto s = best_split({1, 2, 3, 4}, {0, 0, 10, 10});
        REQUIRE(s.has_value());
        CHECK(s->threshold == 2.5);
        CHECK(s->gain == doctest::Approx(100.0).epsilon(1e-12));
    }
    SUBCASE("min_samples_leaf restricts feasible cuts") {
        auto s = best_split({1, 2, 3, 4}, {0, 0, 10, 10}, 2);
        REQUIRE(s.has_value());
        CHECK(s->threshold == 2.5);
        CHECK_FALSE(best_split({1, 2, 3, 4}, {0, 0, 10, 10}, 3).has_value());
    }
    SUBCASE("symmetric gains tie toward the lowest threshold") {
        auto s = best_split({1, 2, 3, 4}, {10, 0, 0, 10});
        REQUIRE(s.has_value());
        CHECK(s->threshold == 1.5);
    }
    SUBCASE("degenerate inputs yield no split") {
        CHECK_FALSE(best_split({1, 2, 3}, {5, 5, 5}).has_value());   // constant target
        CHECK_FALSE(best_split({7, 7, 7}, {1, 2, 3}).has_value());   // constant feature
        CHECK_FALSE(best_split({1}, {2}).has_value());               // n < 2
    }
    SUBCASE("parameter and shape guards") {
        CHECK_THROWS_AS((void)best_split({1, 2}, {1, 2, 3}), ShapeError);
        CHECK_THROWS_AS((void)best_split({1, 2}, {1, 2}, 0), ParamError);
    }
}

TEST_CASE("identical columns tie toward the lowest feature index") {
    Rng rng(7);
    const std::size_t n = 30;
    Matrix x(n, 2);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = static_cast<double>(rng.below(9));
        x.at(i, 0) = v;
        x.at(i, 1) = v;  // exact duplicate column
        y[i] = static_cast<double>(rng.below(6));
    }
    TreeBuilder builder(x);
    RegressionTree t = builder.build(y, std::vector<std::uint32_t>(n, 1), TreeParams{4, 1}, 0,
                                     nullptr);
    bool any_split = false;
    for (const auto& nd : t.nodes) {
        if (nd.feature >= 0) {
            any_split = true;
            CHECK(nd.feature == 0);
        }
    }
    CHECK(any_split);
}

TEST_CASE("mtry = 0 and mtry >= n_cols both mean all features, no rng needed") {
    Rng rng(9);
    const std::size_t n = 40, p = 6;
    Matrix x(n, p);
    std::vector<double> y(n);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i) x.at(i, j) = static_cast<double>(rng.below(10));
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(rng.below(8));
    const std::vector<std::uint32_t> ones(n, 1);

    TreeBuilder builder(x);
    RegressionTree a = builder.build(y, ones, TreeParams{3, 1}, 0, nullptr);
    RegressionTree b = builder.build(y, ones, TreeParams{3, 1}, p, nullptr);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].feature == b.nodes[i].feature);
        CHECK(a.nodes[i].threshold == b.nodes[i].threshold);
        CHECK(a.nodes[i].value == b.nodes[i].value);
    }

    // A strict feature subset without an rng is a usage error.
    CHECK_THROWS_AS((void)builder.build(y, ones, TreeParams{3, 1}, 2, nullptr), ParamError);

    // With an rng, subset trees are valid and only reference real columns.
    Rng feature_rng(11);
    RegressionTree c = builder.build(y, ones, TreeParams{3, 1}, 2, &feature_rng);
    for (const auto& nd : c.nodes) {
        CHECK(nd.feature < static_cast<int>(p));
    }
}

TEST_CASE("builder rejects malformed inputs") {
    Matrix x(3, 1);
    x.at(0, 0) = 1;
    x.at(1, 0) = 2;
    x.at(2, 0) = 3;
    TreeBuilder builder(x);
    const std::vector<double> y = {1, 2, 3};
    CHECK_THROWS_AS((void)builder.build({1, 2}, {1, 1, 1}, TreeParams{2, 1}, 0, nullptr),
                    ShapeError);
    CHECK_THROWS_AS((void)builder.build(y, {1, 1}, TreeParams{2, 1}, 0, nullptr), ShapeError);
    CHECK_THROWS_AS((void)builder.build(y, {1, 1, 1}, TreeParams{-1, 1}, 0, nullptr), ParamError);
    CHECK_THROWS_AS((void)builder.build(y, {1, 1, 1}, TreeParams{2, 0}, 0, nullptr), ParamError);
    CHECK_THROWS_AS((void)builder.build(y, {0, 0, 0}, TreeParams{2, 1}, 0, nullptr), FitError);
    Matrix empty;
    CHECK_THROWS_AS(TreeBuilder{empty}, ShapeError);

    RegressionTree unfitted;
    CHECK_THROWS_AS((void)unfitted.predict_point({1.0}), StateError);
    CHECK_THROWS_AS((void)unfitted.predict_row(x, 0), StateError);
}

TEST_CASE("max_depth 0 gives a single-leaf mean predictor") {
    Matrix x(3, 1);
    x.at(0, 0) = 1;
    x.at(1, 0) = 2;
    x.at(2, 0) = 3;
    TreeBuilder builder(x);
    RegressionTree t = builder.build({3, 6, 9}, {1, 1, 1}, TreeParams{0, 1}, 0, nullptr);
    REQUIRE(t.nodes.size() == 1);
    CHECK(t.nodes[0].feature == -1);
    CHECK(t.nodes[0].value == 6.0);
    CHECK(t.predict_point({-100.0}) == 6.0);
}

TEST_CASE("gain accumulation and importance normalization") {
    Matrix x(4, 2);
    for (int i = 0; i < 4; ++i) {
        x.at(static_cast<std::size_t>(i), 0) = i + 1.0;
        x.at(static_cast<std::size_t>(i), 1) = 0.0;  // constant, never splits
    }
    TreeBuilder builder(x);
    RegressionTree t = builder.build({0, 0, 10, 10}, {1, 1, 1, 1}, TreeParams{1, 1}, 0, nullptr);
    std::vector<double> gains(2, 0.0);
    accumulate_tree_gains(t, gains);
    CHECK(gains[0] == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(gains[1] == 0.0);

    std::vector<double> norm = normalize_importance(gains);
    CHECK(norm[0] == doctest::Approx(1.0));
    CHECK(norm[1] == 0.0);
    std::vector<double> uniform = normalize_importance({0.0, 0.0});
    CHECK(uniform[0] == doctest::Approx(0.5));
    CHECK(uniform[1] == doctest::Approx(0.5));
    std::vector<double> quarters = normalize_importance({1.0, 3.0});
    CHECK(quarters[0] == doctest::Approx(0.25));
    CHECK(quarters[1] == doctest::Approx(0.75));

    // A tree splitting on column 1 cannot be accumulated into a width-1 vector.
    Matrix x2(4, 2);
    for (int i = 0; i < 4; ++i) {
        x2.at(static_cast<std::size_t>(i), 0) = 0.0;
        x2.at(static_cast<std::size_t>(i), 1) = i + 1.0;
    }
    TreeBuilder builder2(x2);
    RegressionTree t2 = builder2.build({0, 0, 10, 10}, {1, 1, 1, 1}, TreeParams{1, 1}, 0, nullptr);
    REQUIRE(t2.nodes[0].feature == 1);
    std::vector<double> short_gains(1, 0.0);
    CHECK_THROWS_AS(accumulate_tree_gains(t2, short_gains), ShapeError);
}
