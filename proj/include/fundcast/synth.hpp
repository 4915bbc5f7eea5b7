#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fundcast/record.hpp"

namespace fundcast {

struct GeneratorConfig {
    int n_records = 10825;
    double positive_rate = 0.085;
    // Planted contribution of each feature to log10(funding).
    std::map<std::string, double> signal_weights;
    double noise_sigma = 0.03;  // log10-dollar units
    // Success probability per funding class, ascending classes.
    std::map<std::string, double> class_success_probs;
    // Description templates: one phrase per category_list level, plus filler
    // vocabulary appended from a built-in word list.
    std::vector<std::string> category_phrases;
    int filler_tokens = 25;
    double base_level = 4.4;  // pre-calibration intercept of log10(funding)
    std::uint64_t seed = 42;

    static GeneratorConfig defaults();
    // Same planted structure, half the noise.
    static GeneratorConfig strong_signal();
    // Signal on category_list only, zero noise: the cleanest recoverable
    // dataset (used to bound funding-prediction error from above).
    static GeneratorConfig noiseless_top_feature();

    nlohmann::json to_json() const;
    static GeneratorConfig from_json(const nlohmann::json& j);
};

// Sidecar ground truth emitted next to a generated dataset.
struct GroundTruth {
    double base_level = 0.0;        // pre-calibration intercept
    double calibration_shift = 0.0; // bisection result; effective base = base_level + shift
    std::map<std::string, double> signal_weights;
    std::map<std::string, double> class_success_probs;
    std::map<std::string, double> feature_stddev;  // analytic, signal features only
    std::vector<std::pair<std::string, double>> planted_importance;  // ranked shares
    std::uint64_t seed = 0;
    int n_records = 0;
    double positive_rate_target = 0.0;
    double positive_rate_realized = 0.0;

    nlohmann::json to_json() const;
    void save(const std::string& path) const;
};

Dataset generate_dataset(const GeneratorConfig& config);
Dataset generate_dataset(const GeneratorConfig& config, GroundTruth* gt);

// Ranked (feature, share): |signal weight| x analytic feature stddev,
// normalized to sum 1. Ground truth for sensitivity tests.
std::vector<std::pair<std::string, double>> planted_importance(const GeneratorConfig& config);

// Analytic stddev of a generated feature's marginal distribution.
double generated_feature_stddev(const std::string& feature);

}  // namespace fundcast
