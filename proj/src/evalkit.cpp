#include "fundcast/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "fundcast/csv.hpp"
#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"
#include "fundcast/rng.hpp"
#include <json.hpp>

namespace fundcast {

using nlohmann::json;

namespace {

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

std::string opt_text(const std::optional<double>& v, const char* fmt) {
    if (!v.has_value()) return "n/a";
    return strf(fmt, *v);
}

}  // namespace

double mape(const std::vector<double>& predicted, const std::vector<double>& actual) {
    if (predicted.size() != actual.size()) {
        throw ShapeError("mape: predicted and actual differ in length");
    }
    if (actual.empty()) throw MetricError("mape: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!(actual[i] > 0.0)) {
            throw MetricError("mape: actual values must be positive (index " +
                              std::to_string(i) + ")");
        }
        acc += std::abs(predicted[i] - actual[i]) / actual[i];
    }
    return 100.0 * acc / static_cast<double>(actual.size());
}

PrecisionRecall precision_recall(const std::vector<std::uint8_t>& predicted,
                                 const std::vector<std::uint8_t>& actual) {
    if (predicted.size() != actual.size()) {
        throw ShapeError("precision_recall: vectors differ in length");
    }
    PrecisionRecall pr;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] != 0;
        const bool a = actual[i] != 0;
        if (p && a) ++pr.tp;
        if (p && !a) ++pr.fp;
        if (!p && a) ++pr.fn;
    }
    if (pr.tp + pr.fp > 0) {
        pr.precision_defined = true;
        pr.precision = static_cast<double>(pr.tp) / static_cast<double>(pr.tp + pr.fp);
    }
    pr.recall = pr.tp + pr.fn > 0
                    ? static_cast<double>(pr.tp) / static_cast<double>(pr.tp + pr.fn)
                    : 0.0;
    return pr;
}

double precision_multiple(double precision, double baseline_rate) {
    if (!(baseline_rate > 0.0)) {
        throw MetricError("precision_multiple: baseline rate must be positive");
    }
    return precision / baseline_rate;
}

std::vector<double> default_sweep_grid() {
    return {0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
}

namespace {

struct Outcomes {
    std::vector<double> probs;
    std::vector<double> funding;
    std::vector<std::uint8_t> actual;
    double baseline = 0.0;
    std::size_t n_success = 0;
};

Outcomes collect_outcomes(const FittedPipeline& pipeline, const Dataset& dataset) {
    if (!dataset.fully_labeled()) throw MetricError("evaluation requires a labeled dataset");
    Outcomes out;
    std::vector<Prediction> preds = predict(pipeline, dataset);
    out.probs.reserve(preds.size());
    out.funding.reserve(preds.size());
    out.actual.reserve(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!preds[i].error.empty()) {
            throw MetricError("evaluation: prediction failed for record " + preds[i].id + ": " +
                              preds[i].error);
        }
        const bool won = labels_for(dataset, preds[i].id).success;
        out.probs.push_back(preds[i].success_prob);
        out.funding.push_back(preds[i].funding_usd);
        out.actual.push_back(won ? 1 : 0);
        out.n_success += won ? 1 : 0;
    }
    out.baseline = preds.empty() ? 0.0
                                 : static_cast<double>(out.n_success) /
                                       static_cast<double>(preds.size());
    return out;
}

}  // namespace

std::vector<SweepRow> sweep_threshold(const FittedPipeline& pipeline, const Dataset& dataset,
                                      const std::vector<double>& grid) {
    if (grid.empty()) throw ParamError("sweep_threshold: empty grid");
    for (double t : grid) {
        if (!(t > 0.0 && t < 1.0)) {
            throw ParamError("sweep_threshold: grid values must be in (0, 1)");
        }
    }
    Outcomes out = collect_outcomes(pipeline, dataset);
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    std::vector<std::uint8_t> predicted(out.probs.size());
    for (double t : grid) {
        for (std::size_t i = 0; i < out.probs.size(); ++i) {
            predicted[i] = out.probs[i] >= t ? 1 : 0;
        }
        PrecisionRecall pr = precision_recall(predicted, out.actual);
        SweepRow row;
        row.threshold = t;
        row.n_predicted_positive = pr.tp + pr.fp;
        row.recall = pr.recall;
        if (pr.precision_defined) {
            row.precision = pr.precision;
            if (out.baseline > 0.0) {
                row.precision_multiple = precision_multiple(pr.precision, out.baseline);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::vector<std::string> tabular_feature_names(const FeatureSchema& schema) {
    std::vector<std::string> names;
    for (const auto* d : schema.by_branch(Branch::categorical)) names.push_back(d->name);
    for (const auto* d : schema.by_branch(Branch::continuous)) names.push_back(d->name);
    for (const auto* d : schema.by_branch(Branch::boolean_)) names.push_back(d->name);
    return names;
}

std::string embedding_source_feature(const std::string& column_name) {
    const std::size_t pos = column_name.rfind("_emb_");
    if (pos == std::string::npos) {
        throw ShapeError("sensitivity: meta channel '" + column_name +
                         "' is not an embedding column");
    }
    return column_name.substr(0, pos);
}

}  // namespace

std::string SensitivityTable::to_csv() const {
    std::string out = "feature,share\n";
    for (const auto& row : rows) {
        out += row.feature;
        out += ',';
        out += format_double(row.share);
        out += '\n';
    }
    return out;
}

SensitivityTable sensitivity(const FittedPipeline& pipeline) {
    if (!pipeline.meta.is_fitted || !pipeline.calibrator.is_fitted) {
        throw StateError("sensitivity: pipeline is not fitted");
    }
    const std::vector<double> channel = model_importance(pipeline.meta);
    if (channel.size() != pipeline.meta_channel_names.size()) {
        throw ShapeError("sensitivity: meta channel names and coefficients disagree");
    }
    const std::vector<std::string> tab_names = tabular_feature_names(pipeline.schema);

    std::map<std::string, double> shares;
    std::size_t c = 0;
    for (; c < pipeline.base_channels; ++c) {
        const std::string& name = pipeline.meta_channel_names[c];
        std::vector<double> imp;
        if (name == "gbt") {
            imp = model_importance(pipeline.gbt);
        } else if (name == "rf") {
            imp = model_importance(pipeline.rf);
        } else {
            throw ShapeError("sensitivity: unknown base channel '" + name + "'");
        }
        if (imp.size() != tab_names.size()) {
            throw ShapeError("sensitivity: base importance width mismatch");
        }
        for (std::size_t j = 0; j < imp.size(); ++j) {
            shares[tab_names[j]] += channel[c] * imp[j];
        }
    }
    for (; c < channel.size(); ++c) {
        shares[embedding_source_feature(pipeline.meta_channel_names[c])] += channel[c];
    }

    double total = 0.0;
    for (const auto& [name, s] : shares) total += s;
    SensitivityTable table;
    for (const auto& [name, s] : shares) {
        table.rows.push_back({name, total > 0.0 ? s / total : 0.0});
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const SensitivityRow& a, const SensitivityRow& b) {
                         if (a.share != b.share) return a.share > b.share;
                         return a.feature < b.feature;
                     });
    return table;
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ShapeError("kendall_tau: length mismatch");
    const std::size_t n = a.size();
    if (n < 2) throw MetricError("kendall_tau: need at least 2 items");
    long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da == 0.0 && db == 0.0) {
                ++ties_a;
                ++ties_b;
            } else if (da == 0.0) {
                ++ties_a;
            } else if (db == 0.0) {
                ++ties_b;
            } else if ((da > 0.0) == (db > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double denom = std::sqrt((n0 - static_cast<double>(ties_a)) *
                                   (n0 - static_cast<double>(ties_b)));
    if (!(denom > 0.0)) return 0.0;
    return static_cast<double>(concordant - discordant) / denom;
}

namespace {

Dataset gather_dataset(const Dataset& src, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.schema = src.schema;
    out.records.reserve(rows.size());
    for (std::size_t i : rows) {
        const FounderRecord& record = src.records[i];
        out.records.push_back(record);
        auto lab = src.labels.find(record.id);
        if (lab != src.labels.end()) out.labels[record.id] = lab->second;
    }
    return out;
}

// Pairwise tau over the union of two runs' top-10 features, ranked by each
// run's full ordering.
double top10_tau(const SensitivityTable& ta, const SensitivityTable& tb) {
    std::map<std::string, double> rank_a, rank_b;
    for (std::size_t i = 0; i < ta.rows.size(); ++i) {
        rank_a[ta.rows[i].feature] = static_cast<double>(i);
    }
    for (std::size_t i = 0; i < tb.rows.size(); ++i) {
        rank_b[tb.rows[i].feature] = static_cast<double>(i);
    }
    std::set<std::string> pool;
    for (std::size_t i = 0; i < ta.rows.size() && i < 10; ++i) pool.insert(ta.rows[i].feature);
    for (std::size_t i = 0; i < tb.rows.size() && i < 10; ++i) pool.insert(tb.rows[i].feature);
    std::vector<double> ra, rb;
    for (const auto& f : pool) {
        const double fallback_a = static_cast<double>(ta.rows.size());
        const double fallback_b = static_cast<double>(tb.rows.size());
        ra.push_back(rank_a.count(f) ? rank_a[f] : fallback_a);
        rb.push_back(rank_b.count(f) ? rank_b[f] : fallback_b);
    }
    return kendall_tau(ra, rb);
}

}  // namespace

StabilityResult sensitivity_stability(const PipelineConfig& config, const Dataset& train,
                                      const std::vector<double>& outlier_fractions, int repeats,
                                      std::uint64_t seed) {
    if (outlier_fractions.empty()) {
        throw ParamError("sensitivity_stability: no outlier fractions given");
    }
    for (double f : outlier_fractions) {
        if (f < 0.0 || f > 0.2) {
            throw ParamError("sensitivity_stability: fractions must lie in [0, 0.2]");
        }
    }
    if (repeats < 1) throw ParamError("sensitivity_stability: repeats must be >= 1");
    if (!train.fully_labeled()) {
        throw SampleError("sensitivity_stability: training dataset must be labeled");
    }
    const std::size_t n = train.records.size();
    if (n < 10) throw SampleError("sensitivity_stability: need at least 10 records");

    // Funding deciles define the outlier pool.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return labels_for(train, train.records[a].id).funding <
               labels_for(train, train.records[b].id).funding;
    });
    const std::size_t dec = n / 10;
    std::vector<std::size_t> outliers, middle;
    for (std::size_t k = 0; k < n; ++k) {
        if (k < dec || k >= n - dec) {
            outliers.push_back(order[k]);
        } else {
            middle.push_back(order[k]);
        }
    }
    std::sort(outliers.begin(), outliers.end());
    std::sort(middle.begin(), middle.end());

    StabilityResult result;
    std::map<std::size_t, SensitivityTable> baseline_cache;  // fraction index -> table
    for (std::size_t fi = 0; fi < outlier_fractions.size(); ++fi) {
        const double f = outlier_fractions[fi];
        const std::uint64_t frac_seed = derive_seed(seed, "stability_frac", fi);
        for (int r = 0; r < repeats; ++r) {
            SensitivityTable table;
            if (f == 0.0) {
                // Deterministic full-train baseline: repeats are identical.
                auto it = baseline_cache.find(fi);
                if (it != baseline_cache.end()) {
                    table = it->second;
                } else {
                    PipelineConfig cfg = config;
                    cfg.seed = frac_seed;
                    cfg.keep_fold_models = false;
                    table = sensitivity(fit_pipeline(train, cfg));
                    baseline_cache[fi] = table;
                }
            } else {
                const std::uint64_t run_seed =
                    derive_seed(frac_seed, "repeat", static_cast<std::uint64_t>(r));
                const auto m = static_cast<std::size_t>(
                    std::floor(0.8 * static_cast<double>(n)));
                const auto k_out = static_cast<std::size_t>(
                    std::llround(f * static_cast<double>(m)));
                if (k_out > outliers.size() || m - k_out > middle.size()) {
                    throw SampleError(strf(
                        "sensitivity_stability: fraction %.3f infeasible (%zu outliers from "
                        "pool %zu, %zu middle from pool %zu)",
                        f, k_out, outliers.size(), m - k_out, middle.size()));
                }
                Rng rng(run_seed);
                std::vector<std::size_t> rows;
                for (std::size_t i : rng.sample_without_replacement(outliers.size(), k_out)) {
                    rows.push_back(outliers[i]);
                }
                for (std::size_t i :
                     rng.sample_without_replacement(middle.size(), m - k_out)) {
                    rows.push_back(middle[i]);
                }
                std::sort(rows.begin(), rows.end());
                Dataset sub = gather_dataset(train, rows);
                PipelineConfig cfg = config;
                cfg.seed = run_seed;
                cfg.keep_fold_models = false;
                table = sensitivity(fit_pipeline(sub, cfg));
            }
            result.runs.push_back({f, r, std::move(table)});
        }
    }

    const std::size_t n_runs = result.runs.size();
    result.tau.assign(n_runs, std::vector<double>(n_runs, 1.0));
    double tau_sum = 0.0;
    std::size_t tau_count = 0;
    for (std::size_t i = 0; i < n_runs; ++i) {
        for (std::size_t j = i + 1; j < n_runs; ++j) {
            const double t = top10_tau(result.runs[i].table, result.runs[j].table);
            result.tau[i][j] = t;
            result.tau[j][i] = t;
            tau_sum += t;
            ++tau_count;
        }
    }
    result.mean_tau = tau_count > 0 ? tau_sum / static_cast<double>(tau_count) : 1.0;
    result.top1_consistent = true;
    for (std::size_t i = 1; i < n_runs; ++i) {
        if (result.runs[i].table.rows.empty() || result.runs[0].table.rows.empty() ||
            result.runs[i].table.rows[0].feature != result.runs[0].table.rows[0].feature) {
            result.top1_consistent = false;
        }
    }
    return result;
}

AblationSuite ablation_suite_from_name(const std::string& name) {
    if (name == "llm_features") return AblationSuite::llm_features;
    if (name == "embeddings") return AblationSuite::embeddings;
    if (name == "model_components") return AblationSuite::model_components;
    if (name == "feature_categories") return AblationSuite::feature_categories;
    throw ParamError("unknown ablation suite '" + name +
                     "' (expected llm_features, embeddings, model_components, or "
                     "feature_categories)");
}

std::string ablation_suite_name(AblationSuite suite) {
    switch (suite) {
        case AblationSuite::llm_features: return "llm_features";
        case AblationSuite::embeddings: return "embeddings";
        case AblationSuite::model_components: return "model_components";
        case AblationSuite::feature_categories: return "feature_categories";
    }
    throw ParamError("invalid ablation suite value");
}

namespace {

struct VariantMetrics {
    std::optional<double> precision;
    std::optional<double> precision_multiple_v;
    double recall = 0.0;
};

Dataset with_schema(const Dataset& src, const FeatureSchema& schema) {
    Dataset out = src;
    out.schema = schema;
    return out;
}

FeatureSchema drop_features(const FeatureSchema& schema,
                            const std::function<bool(const FeatureDecl&)>& drop,
                            const std::string& variant) {
    FeatureSchema out;
    for (const auto& d : schema.features) {
        if (!drop(d)) out.features.push_back(d);
    }
    if (out.features.empty()) {
        throw AblationError("variant '" + variant + "' leaves zero features");
    }
    bool has_tabular = false;
    for (const auto& d : out.features) {
        if (d.branch != Branch::textual) has_tabular = true;
    }
    if (!has_tabular) {
        throw AblationError("variant '" + variant +
                            "' leaves no tabular features for the base learners");
    }
    return out;
}

VariantMetrics eval_variant(const Dataset& train, const Dataset& pooled,
                            const PipelineConfig& cfg) {
    FittedPipeline fp = fit_pipeline(train, cfg);
    Outcomes out = collect_outcomes(fp, pooled);
    std::vector<std::uint8_t> predicted(out.probs.size());
    for (std::size_t i = 0; i < out.probs.size(); ++i) {
        predicted[i] = out.probs[i] >= cfg.threshold ? 1 : 0;
    }
    PrecisionRecall pr = precision_recall(predicted, out.actual);
    VariantMetrics vm;
    vm.recall = pr.recall;
    if (pr.precision_defined) {
        vm.precision = pr.precision;
        if (out.baseline > 0.0) {
            vm.precision_multiple_v = precision_multiple(pr.precision, out.baseline);
        }
    }
    return vm;
}

AblationRow make_row(const std::string& name, const VariantMetrics& vm,
                     const VariantMetrics& full) {
    AblationRow row;
    row.variant = name;
    row.precision = vm.precision;
    row.precision_multiple = vm.precision_multiple_v;
    row.recall = vm.recall;
    row.delta_multiple = vm.precision_multiple_v.value_or(0.0) -
                         full.precision_multiple_v.value_or(0.0);
    row.delta_recall = vm.recall - full.recall;
    return row;
}

}  // namespace

AblationResult run_ablation(AblationSuite suite, const Dataset& dataset,
                            const PipelineConfig& config, const SplitSpec& split_spec) {
    SplitResult split = split_dataset(dataset, split_spec);
    Dataset pooled;
    pooled.schema = dataset.schema;
    for (const auto& sub : split.eval_subsets) {
        for (const FounderRecord& record : sub.records) {
            pooled.records.push_back(record);
            pooled.labels[record.id] = labels_for(sub, record.id);
        }
    }

    AblationResult result;
    result.suite = ablation_suite_name(suite);
    const VariantMetrics full = eval_variant(split.train, pooled, config);

    switch (suite) {
        case AblationSuite::llm_features: {
            result.rows.push_back(make_row("full", full, full));
            FeatureSchema filtered = drop_features(
                dataset.schema, [](const FeatureDecl& d) { return d.origin == Origin::llm_derived; },
                "no_llm_features");
            VariantMetrics vm = eval_variant(with_schema(split.train, filtered),
                                             with_schema(pooled, filtered), config);
            result.rows.push_back(make_row("no_llm_features", vm, full));
            break;
        }
        case AblationSuite::embeddings: {
            for (const std::string prov : {"mock", "none"}) {
                if (prov == config.embedding_provider) {
                    result.rows.push_back(make_row(prov, full, full));
                } else {
                    PipelineConfig cfg = config;
                    cfg.embedding_provider = prov;
                    VariantMetrics vm = eval_variant(split.train, pooled, cfg);
                    result.rows.push_back(make_row(prov, vm, full));
                }
            }
            break;
        }
        case AblationSuite::model_components: {
            result.rows.push_back(make_row("full", full, full));
            if (!config.use_rf) {
                throw AblationError("variant 'no_gbt' leaves zero base models");
            }
            PipelineConfig no_gbt = config;
            no_gbt.use_gbt = false;
            result.rows.push_back(
                make_row("no_gbt", eval_variant(split.train, pooled, no_gbt), full));
            if (!config.use_gbt) {
                throw AblationError("variant 'no_rf' leaves zero base models");
            }
            PipelineConfig no_rf = config;
            no_rf.use_rf = false;
            result.rows.push_back(
                make_row("no_rf", eval_variant(split.train, pooled, no_rf), full));
            PipelineConfig bypass = config;
            bypass.use_meta = false;
            result.rows.push_back(
                make_row("meta_bypass", eval_variant(split.train, pooled, bypass), full));
            break;
        }
        case AblationSuite::feature_categories: {
            result.rows.push_back(make_row("full", full, full));
            const std::pair<Branch, const char*> arms[] = {
                {Branch::categorical, "no_categorical"},
                {Branch::continuous, "no_continuous"},
                {Branch::boolean_, "no_boolean"},
                {Branch::textual, "no_textual"},
            };
            for (const auto& [branch, name] : arms) {
                FeatureSchema filtered = drop_features(
                    dataset.schema,
                    [branch = branch](const FeatureDecl& d) { return d.branch == branch; },
                    name);
                VariantMetrics vm = eval_variant(with_schema(split.train, filtered),
                                                 with_schema(pooled, filtered), config);
                result.rows.push_back(make_row(name, vm, full));
            }
            break;
        }
    }
    return result;
}

ReportRow evaluate_subset(const FittedPipeline& pipeline, const Dataset& subset,
                          const std::string& subset_id) {
    Outcomes out = collect_outcomes(pipeline, subset);
    std::vector<std::uint8_t> predicted(out.probs.size());
    for (std::size_t i = 0; i < out.probs.size(); ++i) {
        predicted[i] = out.probs[i] >= pipeline.config.threshold ? 1 : 0;
    }
    PrecisionRecall pr = precision_recall(predicted, out.actual);

    ReportRow row;
    row.subset_id = subset_id;
    row.n = subset.records.size();
    row.n_success = out.n_success;
    row.baseline_rate = out.baseline;
    row.recall = pr.recall;
    if (pr.precision_defined) {
        row.precision = pr.precision;
        if (out.baseline > 0.0) {
            row.precision_multiple = precision_multiple(pr.precision, out.baseline);
        }
    }
    std::vector<double> actual_funding;
    actual_funding.reserve(subset.records.size());
    for (const FounderRecord& record : subset.records) {
        actual_funding.push_back(labels_for(subset, record.id).funding);
    }
    row.mape_pct = mape(out.funding, actual_funding);
    return row;
}

namespace {

json opt_json(const std::optional<double>& v) {
    return v.has_value() ? json(*v) : json(nullptr);
}

std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::string EvaluationReport::to_json() const {
    json j;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"subset_id", r.subset_id},
                             {"n", r.n},
                             {"n_success", r.n_success},
                             {"baseline_rate", r.baseline_rate},
                             {"precision", opt_json(r.precision)},
                             {"precision_multiple", opt_json(r.precision_multiple)},
                             {"recall", r.recall},
                             {"mape_pct", r.mape_pct}});
    }
    j["class_table"] = json::array();
    for (const auto& c : class_table) {
        j["class_table"].push_back({{"label", c.label},
                                    {"n", c.n},
                                    {"success_probability", opt_json(c.success_probability)}});
    }
    j["sweep"] = json::array();
    for (const auto& s : sweep) {
        j["sweep"].push_back({{"threshold", s.threshold},
                              {"precision", opt_json(s.precision)},
                              {"precision_multiple", opt_json(s.precision_multiple)},
                              {"recall", s.recall},
                              {"n_predicted_positive", s.n_predicted_positive}});
    }
    j["sensitivity"] = json::array();
    for (const auto& s : sensitivity_table.rows) {
        j["sensitivity"].push_back({{"feature", s.feature}, {"share", s.share}});
    }
    j["ablations"] = json::array();
    for (const auto& a : ablations) {
        json rows_j = json::array();
        for (const auto& r : a.rows) {
            rows_j.push_back({{"variant", r.variant},
                              {"precision", opt_json(r.precision)},
                              {"precision_multiple", opt_json(r.precision_multiple)},
                              {"recall", r.recall},
                              {"delta_multiple", r.delta_multiple},
                              {"delta_recall", r.delta_recall}});
        }
        j["ablations"].push_back({{"suite", a.suite}, {"rows", rows_j}});
    }
    j["config_fingerprint"] = config_fingerprint;
    return j.dump(2);
}

EvaluationReport EvaluationReport::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError("evaluation report: invalid JSON");
    }
    EvaluationReport rep;
    try {
        for (const auto& r : j.at("rows")) {
            ReportRow row;
            row.subset_id = r.at("subset_id").get<std::string>();
            row.n = r.at("n").get<std::size_t>();
            row.n_success = r.at("n_success").get<std::size_t>();
            row.baseline_rate = r.at("baseline_rate").get<double>();
            row.precision = opt_from(r.at("precision"));
            row.precision_multiple = opt_from(r.at("precision_multiple"));
            row.recall = r.at("recall").get<double>();
            row.mape_pct = r.at("mape_pct").get<double>();
            rep.rows.push_back(std::move(row));
        }
        for (const auto& c : j.at("class_table")) {
            ClassRow row;
            row.label = c.at("label").get<std::string>();
            row.n = c.at("n").get<std::size_t>();
            row.success_probability = opt_from(c.at("success_probability"));
            rep.class_table.push_back(std::move(row));
        }
        for (const auto& s : j.at("sweep")) {
            SweepRow row;
            row.threshold = s.at("threshold").get<double>();
            row.precision = opt_from(s.at("precision"));
            row.precision_multiple = opt_from(s.at("precision_multiple"));
            row.recall = s.at("recall").get<double>();
            row.n_predicted_positive = s.at("n_predicted_positive").get<std::size_t>();
            rep.sweep.push_back(row);
        }
        for (const auto& s : j.at("sensitivity")) {
            rep.sensitivity_table.rows.push_back(
                {s.at("feature").get<std::string>(), s.at("share").get<double>()});
        }
        for (const auto& a : j.at("ablations")) {
            AblationResult ar;
            ar.suite = a.at("suite").get<std::string>();
            for (const auto& r : a.at("rows")) {
                AblationRow row;
                row.variant = r.at("variant").get<std::string>();
                row.precision = opt_from(r.at("precision"));
                row.precision_multiple = opt_from(r.at("precision_multiple"));
                row.recall = r.at("recall").get<double>();
                row.delta_multiple = r.at("delta_multiple").get<double>();
                row.delta_recall = r.at("delta_recall").get<double>();
                ar.rows.push_back(std::move(row));
            }
            rep.ablations.push_back(std::move(ar));
        }
        rep.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("evaluation report: ") + e.what());
    }
    return rep;
}

std::string EvaluationReport::to_text() const {
    std::string out;
    if (!rows.empty()) {
        out += "== Evaluation subsets ==\n";
        out += strf("%-10s %6s %9s %9s %10s %9s %8s %8s\n", "subset", "n", "success",
                    "baseline", "precision", "multiple", "recall", "MAPE%");
        for (const auto& r : rows) {
            out += strf("%-10s %6zu %9zu %9.4f %10s %9s %8.3f %8.2f\n", r.subset_id.c_str(),
                        r.n, r.n_success, r.baseline_rate,
                        opt_text(r.precision, "%.4f").c_str(),
                        opt_text(r.precision_multiple, "%.2f").c_str(), r.recall, r.mape_pct);
        }
    }
    if (!class_table.empty()) {
        out += "\n== Funding classes (predicted) ==\n";
        out += strf("%-10s %6s %14s\n", "class", "n", "success_prob");
        for (const auto& c : class_table) {
            out += strf("%-10s %6zu %14s\n", c.label.c_str(), c.n,
                        opt_text(c.success_probability, "%.4f").c_str());
        }
    }
    if (!sweep.empty()) {
        out += "\n== Threshold sweep ==\n";
        out += strf("%-9s %7s %10s %9s %8s\n", "threshold", "n_pos", "precision", "multiple",
                    "recall");
        for (const auto& s : sweep) {
            out += strf("%-9.2f %7zu %10s %9s %8.3f\n", s.threshold, s.n_predicted_positive,
                        opt_text(s.precision, "%.4f").c_str(),
                        opt_text(s.precision_multiple, "%.2f").c_str(), s.recall);
        }
    }
    if (!sensitivity_table.rows.empty()) {
        out += "\n== Sensitivity (top 15) ==\n";
        out += strf("%-28s %8s\n", "feature", "share");
        for (std::size_t i = 0; i < sensitivity_table.rows.size() && i < 15; ++i) {
            out += strf("%-28s %8.4f\n", sensitivity_table.rows[i].feature.c_str(),
                        sensitivity_table.rows[i].share);
        }
    }
    for (const auto& a : ablations) {
        out += "\n== Ablation: " + a.suite + " ==\n";
        out += strf("%-18s %10s %9s %8s %11s %9s\n", "variant", "precision", "multiple",
                    "recall", "d_multiple", "d_recall");
        for (const auto& r : a.rows) {
            out += strf("%-18s %10s %9s %8.3f %+11.2f %+9.3f\n", r.variant.c_str(),
                        opt_text(r.precision, "%.4f").c_str(),
                        opt_text(r.precision_multiple, "%.2f").c_str(), r.recall,
                        r.delta_multiple, r.delta_recall);
        }
    }
    if (!config_fingerprint.empty()) {
        out += "\nconfig fingerprint: " + config_fingerprint + "\n";
    }
    return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& sweep) {
    std::string out = "threshold,precision,precision_multiple,recall,n_predicted_positive\n";
    for (const auto& s : sweep) {
        out += format_double(s.threshold);
        out += ',';
        if (s.precision.has_value()) out += format_double(*s.precision);
        out += ',';
        if (s.precision_multiple.has_value()) out += format_double(*s.precision_multiple);
        out += ',';
        out += format_double(s.recall);
        out += ',';
        out += std::to_string(s.n_predicted_positive);
        out += '\n';
    }
    return out;
}

}  // namespace fundcast
