#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fundcast/classes.hpp"
#include "fundcast/encode.hpp"
#include "fundcast/forest.hpp"
#include "fundcast/gbt.hpp"
#include "fundcast/linear.hpp"
#include "fundcast/logistic.hpp"
#include "fundcast/record.hpp"

namespace fundcast {

struct PipelineConfig {
    GbtParams gbt;
    RfParams rf;
    double meta_lambda = 1e-6;
    double calib_lambda = 1e-3;
    int oof_folds = 5;
    double threshold = 0.8;
    std::size_t embedding_dim = 64;
    std::string embedding_provider = "mock";  // "mock" or "none"
    std::uint64_t seed = 42;
    bool use_gbt = true;
    bool use_rf = true;
    bool use_meta = true;            // false = bypass: unweighted base average
    bool keep_fold_models = false;   // retain per-fold bases for audits

    std::string to_json() const;
    static PipelineConfig from_json(const std::string& text);
};

// Fold bookkeeping retained from fitting so tests can audit the
// out-of-fold construction. Never serialized.
struct StackingTrace {
    std::vector<int> fold_of;                             // per training row
    std::vector<std::vector<std::uint32_t>> fold_train_rows;
    std::vector<double> oof_gbt;
    std::vector<double> oof_rf;
    std::vector<double> meta_oof_estimate;                // calibrator input
    std::vector<GradientBoostedTrees> fold_gbt;           // when keep_fold_models
    std::vector<RandomForest> fold_rf;
};

struct Prediction {
    std::string id;
    double funding_usd = 0.0;
    double log10_estimate = 0.0;
    double success_prob = 0.0;
    bool predicted_success = false;
    std::string funding_class_label;
    bool low_range = false;
    std::string error;  // nonempty marks a per-record failure; other fields unset
};

struct FittedPipeline {
    FeatureSchema schema;
    EncoderState encoder;
    GradientBoostedTrees gbt;  // fitted iff config.use_gbt
    RandomForest rf;           // fitted iff config.use_rf
    LinearModel meta;
    LogisticModel calibrator;
    PipelineConfig config;
    std::vector<std::string> meta_channel_names;  // base channels then embedding columns
    std::size_t base_channels = 0;                // leading non-embedding meta columns
    std::string data_fingerprint;
    StackingTrace trace;
};

// Fits encoder, K-fold out-of-fold base predictions, ridge meta-model on
// [base OOF channels, embedding block] -> log10(funding), logistic
// calibrator on the meta's OOF estimate -> success label (positive slope
// asserted), then refits the bases on the full training set.
FittedPipeline fit_pipeline(const Dataset& train, const PipelineConfig& config);

std::vector<Prediction> predict(const FittedPipeline& pipeline, const Dataset& records);

struct ClassRow {
    std::string label;
    std::size_t n = 0;
    std::optional<double> success_probability;  // absent for empty buckets
};

// Buckets records by predicted funding class (or actual funding when
// by_actual_funding), reporting the empirical success fraction per bucket.
std::vector<ClassRow> class_success_table(const FittedPipeline& pipeline, const Dataset& dataset,
                                          bool by_actual_funding = false);

void save_pipeline(const std::string& path, const FittedPipeline& pipeline);
FittedPipeline load_pipeline(const std::string& path);

}  // namespace fundcast
