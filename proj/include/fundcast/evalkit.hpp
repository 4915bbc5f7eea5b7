#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fundcast/pipeline.hpp"
#include "fundcast/split.hpp"

namespace fundcast {

// (100/n) * sum |pred - actual| / actual, in dollars.
double mape(const std::vector<double>& predicted, const std::vector<double>& actual);

struct PrecisionRecall {
    bool precision_defined = false;  // false when nothing was predicted positive
    double precision = 0.0;
    double recall = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

PrecisionRecall precision_recall(const std::vector<std::uint8_t>& predicted,
                                 const std::vector<std::uint8_t>& actual);

double precision_multiple(double precision, double baseline_rate);

struct SweepRow {
    double threshold = 0.0;
    std::optional<double> precision;           // absent when nothing predicted positive
    std::optional<double> precision_multiple;  // absent with precision
    double recall = 0.0;
    std::size_t n_predicted_positive = 0;
};

std::vector<double> default_sweep_grid();  // 0.50 .. 0.95 step 0.05

std::vector<SweepRow> sweep_threshold(const FittedPipeline& pipeline, const Dataset& dataset,
                                      const std::vector<double>& grid);

struct SensitivityRow {
    std::string feature;
    double share = 0.0;
};

struct SensitivityTable {
    std::vector<SensitivityRow> rows;  // descending share, ties by name
    std::string to_csv() const;        // "feature,share" plot-ready lines
};

// Meta channel weights (|coefficient| * OOF-channel std) distributed onto
// tabular features via each base model's importance; embedding channels
// attribute to their source textual feature. Shares sum to 1.
SensitivityTable sensitivity(const FittedPipeline& pipeline);

// Kendall tau-b between two equal-length score vectors.
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

struct StabilityRun {
    double fraction = 0.0;
    int repeat = 0;
    SensitivityTable table;
};

struct StabilityResult {
    std::vector<StabilityRun> runs;
    std::vector<std::vector<double>> tau;  // pairwise over runs (tau[i][j])
    double mean_tau = 0.0;                 // over distinct pairs
    bool top1_consistent = false;
};

// Retrains on resampled subsets where `fraction` of the rows come from the
// top/bottom funding deciles (fraction 0 = the deterministic full-train
// baseline); compares top-10 feature ranks by pairwise Kendall tau.
StabilityResult sensitivity_stability(const PipelineConfig& config, const Dataset& train,
                                      const std::vector<double>& outlier_fractions, int repeats,
                                      std::uint64_t seed);

enum class AblationSuite { llm_features, embeddings, model_components, feature_categories };

AblationSuite ablation_suite_from_name(const std::string& name);
std::string ablation_suite_name(AblationSuite suite);

struct AblationRow {
    std::string variant;
    std::optional<double> precision;
    std::optional<double> precision_multiple;
    double recall = 0.0;
    double delta_multiple = 0.0;  // vs the full pipeline; undefined multiples count as 0
    double delta_recall = 0.0;
};

struct AblationResult {
    std::string suite;
    std::vector<AblationRow> rows;  // baseline variant first
};

// Splits once, fits every variant on the identical train split, and
// evaluates on the pooled eval subsets.
AblationResult run_ablation(AblationSuite suite, const Dataset& dataset,
                            const PipelineConfig& config, const SplitSpec& split_spec);

struct ReportRow {
    std::string subset_id;
    std::size_t n = 0;
    std::size_t n_success = 0;
    double baseline_rate = 0.0;
    std::optional<double> precision;
    std::optional<double> precision_multiple;
    double recall = 0.0;
    double mape_pct = 0.0;
};

struct EvaluationReport {
    std::vector<ReportRow> rows;
    std::vector<ClassRow> class_table;     // empty = absent
    std::vector<SweepRow> sweep;           // empty = absent
    SensitivityTable sensitivity_table;    // empty rows = absent
    std::vector<AblationResult> ablations; // empty = absent
    std::string config_fingerprint;

    std::string to_json() const;
    static EvaluationReport from_json(const std::string& text);
    std::string to_text() const;  // aligned human-readable tables
};

// Metrics of one labeled subset under the pipeline's threshold.
ReportRow evaluate_subset(const FittedPipeline& pipeline, const Dataset& subset,
                          const std::string& subset_id);

std::string sweep_to_csv(const std::vector<SweepRow>& sweep);  // "threshold,precision,..." lines

}  // namespace fundcast
