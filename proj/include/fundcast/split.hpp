#pragma once

#include <cstdint>
#include <vector>

#include "fundcast/record.hpp"

namespace fundcast {

struct SplitSpec {
    int train_size = 8659;
    int eval_subset_count = 3;
    int eval_subset_size = 722;
    bool stratified = true;
    std::uint64_t seed = 42;
};

struct SplitResult {
    Dataset train;
    std::vector<Dataset> eval_subsets;
};

// Disjoint partition; stratified mode keeps every partition's success rate
// within +/-1pp of the full dataset's. Deterministic given spec.seed.
SplitResult split_dataset(const Dataset& dataset, const SplitSpec& spec);

}  // namespace fundcast
