#include "fundcast/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"
#include "fundcast/rng.hpp"

namespace fundcast {

namespace {

Dataset take(const Dataset& src, const std::vector<int>& rows) {
    Dataset out;
    out.schema = src.schema;
    out.records.reserve(rows.size());
    for (int r : rows) {
        out.records.push_back(src.records[static_cast<std::size_t>(r)]);
        auto lab = src.labels.find(out.records.back().id);
        if (lab != src.labels.end()) out.labels[lab->first] = lab->second;
    }
    return out;
}

}  // namespace

SplitResult split_dataset(const Dataset& dataset, const SplitSpec& spec) {
    const int n = static_cast<int>(dataset.records.size());
    if (spec.train_size <= 0 || spec.eval_subset_count < 0 || spec.eval_subset_size < 0)
        throw SplitError("split sizes must be positive");
    const long long need =
        static_cast<long long>(spec.train_size) +
        static_cast<long long>(spec.eval_subset_count) * spec.eval_subset_size;
    if (need > n)
        throw SplitError("split needs " + std::to_string(need) + " records, dataset has " +
                         std::to_string(n));

    std::vector<int> part_sizes;
    part_sizes.push_back(spec.train_size);
    for (int k = 0; k < spec.eval_subset_count; ++k) part_sizes.push_back(spec.eval_subset_size);

    Rng rng(derive_seed(spec.seed, "split"));
    std::vector<std::vector<int>> parts;

    if (!spec.stratified) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        int at = 0;
        for (int s : part_sizes) {
            parts.emplace_back(order.begin() + at, order.begin() + at + s);
            at += s;
        }
    } else {
        if (!dataset.fully_labeled())
            throw SplitError("stratified split requires every record to be labeled");
        std::vector<int> pos, neg;
        for (int i = 0; i < n; ++i) {
            const auto& lab = dataset.labels.at(dataset.records[static_cast<std::size_t>(i)].id);
            (lab.success ? pos : neg).push_back(i);
        }
        rng.shuffle(pos);
        rng.shuffle(neg);

        const double rate = static_cast<double>(pos.size()) / n;
        // Largest-remainder allocation of positives per partition.
        std::vector<int> pos_quota(part_sizes.size());
        std::vector<std::pair<double, int>> rema;
        double total_quota = 0.0;
        for (std::size_t p = 0; p < part_sizes.size(); ++p) {
            double q = part_sizes[p] * rate;
            pos_quota[p] = static_cast<int>(std::floor(q));
            rema.push_back({q - pos_quota[p], static_cast<int>(p)});
            total_quota += q;
        }
        int extra = static_cast<int>(std::llround(total_quota)) -
                    std::accumulate(pos_quota.begin(), pos_quota.end(), 0);
        std::stable_sort(rema.begin(), rema.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (int i = 0; i < extra && i < static_cast<int>(rema.size()); ++i)
            pos_quota[static_cast<std::size_t>(rema[static_cast<std::size_t>(i)].second)] += 1;

        std::size_t pi = 0, ni = 0;
        for (std::size_t p = 0; p < part_sizes.size(); ++p) {
            int want_pos = pos_quota[p];
            int want_neg = part_sizes[p] - want_pos;
            if (pi + want_pos > pos.size() || ni + want_neg > neg.size())
                throw SplitError("stratified split infeasible: class pool exhausted");
            std::vector<int> rows;
            rows.reserve(static_cast<std::size_t>(part_sizes[p]));
            for (int i = 0; i < want_pos; ++i) rows.push_back(pos[pi++]);
            for (int i = 0; i < want_neg; ++i) rows.push_back(neg[ni++]);
            rng.shuffle(rows);
            parts.push_back(std::move(rows));
        }

        for (std::size_t p = 0; p < parts.size(); ++p) {
            double r = static_cast<double>(pos_quota[p]) / part_sizes[p];
            if (std::abs(r - rate) > 0.01 + 1e-12)
                throw SplitError("stratified partition rate deviates more than 1pp");
        }
    }

    SplitResult out;
    out.train = take(dataset, parts[0]);
    for (std::size_t p = 1; p < parts.size(); ++p)
        out.eval_subsets.push_back(take(dataset, parts[p]));
    return out;
}

}  // namespace fundcast
