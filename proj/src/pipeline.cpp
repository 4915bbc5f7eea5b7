#include "fundcast/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"
#include "fundcast/kernels.hpp"
#include "fundcast/rng.hpp"
#include <json.hpp>

namespace fundcast {

using nlohmann::json;

int funding_class_index(double amount_usd) {
    if (!std::isfinite(amount_usd) || !(amount_usd > 0.0)) {
        throw RangeError("funding_class: amount must be positive and finite");
    }
    if (amount_usd < 1e6) return 0;
    if (amount_usd < 1e7) return 1;
    if (amount_usd < 1e8) return 2;
    if (amount_usd < 1e9) return 3;
    return 4;
}

std::string funding_class(double amount_usd, bool* low_range) {
    const int idx = funding_class_index(amount_usd);
    if (low_range != nullptr) *low_range = amount_usd < 1e5;
    return kFundingClassLabels[static_cast<std::size_t>(idx)];
}

std::string PipelineConfig::to_json() const {
    json j;
    j["gbt"] = {{"n_trees", gbt.n_trees},
                {"max_depth", gbt.max_depth},
                {"min_samples_leaf", gbt.min_samples_leaf},
                {"learning_rate", gbt.learning_rate},
                {"subsample", gbt.subsample}};
    j["rf"] = {{"n_trees", rf.n_trees},
               {"max_depth", rf.max_depth},
               {"min_samples_leaf", rf.min_samples_leaf},
               {"max_features", rf.max_features},
               {"bootstrap", rf.bootstrap}};
    j["meta_lambda"] = meta_lambda;
    j["calib_lambda"] = calib_lambda;
    j["oof_folds"] = oof_folds;
    j["threshold"] = threshold;
    j["embedding_dim"] = embedding_dim;
    j["embedding_provider"] = embedding_provider;
    j["seed"] = seed;
    j["use_gbt"] = use_gbt;
    j["use_rf"] = use_rf;
    j["use_meta"] = use_meta;
    return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("pipeline config: invalid JSON");
    PipelineConfig c;
    try {
        if (j.contains("gbt")) {
            const auto& g = j["gbt"];
            c.gbt.n_trees = g.value("n_trees", c.gbt.n_trees);
            c.gbt.max_depth = g.value("max_depth", c.gbt.max_depth);
            c.gbt.min_samples_leaf = g.value("min_samples_leaf", c.gbt.min_samples_leaf);
            c.gbt.learning_rate = g.value("learning_rate", c.gbt.learning_rate);
            c.gbt.subsample = g.value("subsample", c.gbt.subsample);
        }
        if (j.contains("rf")) {
            const auto& r = j["rf"];
            c.rf.n_trees = r.value("n_trees", c.rf.n_trees);
            c.rf.max_depth = r.value("max_depth", c.rf.max_depth);
            c.rf.min_samples_leaf = r.value("min_samples_leaf", c.rf.min_samples_leaf);
            c.rf.max_features = r.value("max_features", c.rf.max_features);
            c.rf.bootstrap = r.value("bootstrap", c.rf.bootstrap);
        }
        c.meta_lambda = j.value("meta_lambda", c.meta_lambda);
        c.calib_lambda = j.value("calib_lambda", c.calib_lambda);
        c.oof_folds = j.value("oof_folds", c.oof_folds);
        c.threshold = j.value("threshold", c.threshold);
        c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
        c.embedding_provider = j.value("embedding_provider", c.embedding_provider);
        c.seed = j.value("seed", c.seed);
        c.use_gbt = j.value("use_gbt", c.use_gbt);
        c.use_rf = j.value("use_rf", c.use_rf);
        c.use_meta = j.value("use_meta", c.use_meta);
    } catch (const json::exception& e) {
        throw ParseError(std::string("pipeline config: ") + e.what());
    }
    return c;
}

namespace {

Matrix take_columns(const Matrix& src, std::size_t first, std::size_t count) {
    Matrix out(src.rows, count);
    for (std::size_t j = 0; j < count; ++j) {
        const double* s = src.col(first + j);
        std::copy(s, s + src.rows, out.col(j));
    }
    return out;
}

Matrix gather_rows(const Matrix& src, const std::vector<std::uint32_t>& rows) {
    Matrix out(rows.size(), src.cols);
    for (std::size_t j = 0; j < src.cols; ++j) {
        const double* s = src.col(j);
        double* d = out.col(j);
        for (std::size_t i = 0; i < rows.size(); ++i) d[i] = s[rows[i]];
    }
    return out;
}

void validate_pipeline_config(const PipelineConfig& config) {
    if (config.oof_folds < 2) throw ParamError("pipeline: oof_folds must be >= 2");
    if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
        throw ParamError("pipeline: threshold must be in (0, 1)");
    }
    if (!config.use_gbt && !config.use_rf) {
        throw ParamError("pipeline: at least one base learner must be enabled");
    }
}

struct EncodedBlocks {
    Matrix tabular;
    Matrix embedding;
    std::vector<std::string> tabular_names;
    std::vector<std::string> embedding_names;
};

EncodedBlocks split_blocks(FeatureMatrix&& fm) {
    EncodedBlocks b;
    b.tabular = take_columns(fm.x, 0, fm.tabular_width);
    b.embedding = take_columns(fm.x, fm.tabular_width, fm.embedding_width);
    b.tabular_names.assign(fm.column_names.begin(),
                           fm.column_names.begin() + static_cast<std::ptrdiff_t>(fm.tabular_width));
    b.embedding_names.assign(fm.column_names.begin() + static_cast<std::ptrdiff_t>(fm.tabular_width),
                             fm.column_names.end());
    return b;
}

// Meta design matrix: enabled base channels first, then the embedding block.
Matrix assemble_meta(const std::vector<const std::vector<double>*>& bases, const Matrix& emb) {
    const std::size_t n = emb.rows > 0 ? emb.rows : bases.at(0)->size();
    Matrix mx(n, bases.size() + emb.cols);
    std::size_t j = 0;
    for (const auto* b : bases) {
        std::copy(b->begin(), b->end(), mx.col(j++));
    }
    for (std::size_t k = 0; k < emb.cols; ++k) {
        std::copy(emb.col(k), emb.col(k) + n, mx.col(j++));
    }
    return mx;
}

LinearModel bypass_meta(const Matrix& mx, std::size_t n_bases) {
    LinearModel m;
    m.ridge_lambda = 0.0;
    m.intercept = 0.0;
    m.coefficients.assign(mx.cols, 0.0);
    for (std::size_t j = 0; j < n_bases; ++j) {
        m.coefficients[j] = 1.0 / static_cast<double>(n_bases);
    }
    m.input_std.resize(mx.cols);
    for (std::size_t j = 0; j < mx.cols; ++j) {
        auto [mean, var] = kernels::mean_var(mx.col(j), mx.rows);
        (void)mean;
        m.input_std[j] = std::sqrt(var);
    }
    m.is_fitted = true;
    return m;
}

std::vector<Prediction> predict_encoded(const FittedPipeline& p, EncodedBlocks&& blocks,
                                        const std::vector<std::string>& ids) {
    const std::size_t n = blocks.tabular.rows;
    std::vector<const std::vector<double>*> bases;
    std::vector<double> g, r;
    if (p.config.use_gbt) {
        g = p.gbt.predict(blocks.tabular);
        bases.push_back(&g);
    }
    if (p.config.use_rf) {
        r = p.rf.predict(blocks.tabular);
        bases.push_back(&r);
    }
    Matrix mx = assemble_meta(bases, blocks.embedding);
    std::vector<double> est = p.meta.predict(mx);

    std::vector<Prediction> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Prediction& pr = out[i];
        pr.id = ids[i];
        pr.log10_estimate = est[i];
        pr.funding_usd = std::max(std::pow(10.0, est[i]), 1.0);
        pr.success_prob = p.calibrator.predict_one(est[i]);
        pr.predicted_success = pr.success_prob >= p.config.threshold;
        pr.funding_class_label = funding_class(pr.funding_usd, &pr.low_range);
    }
    return out;
}

}  // namespace

FittedPipeline fit_pipeline(const Dataset& train, const PipelineConfig& config) {
    validate_pipeline_config(config);
    const std::size_t n = train.records.size();
    if (n < static_cast<std::size_t>(config.oof_folds)) {
        throw ParamError("pipeline: " + std::to_string(config.oof_folds) +
                         " folds infeasible with " + std::to_string(n) + " records");
    }
    if (!train.fully_labeled()) throw FitError("pipeline: training dataset must be fully labeled");

    std::vector<double> y_log(n);
    std::vector<std::uint8_t> success(n);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Labels& lab = labels_for(train, train.records[i].id);
        if (!std::isfinite(lab.funding) || !(lab.funding > 0.0)) {
            throw FitError("pipeline: record " + train.records[i].id +
                           " has non-positive funding label");
        }
        y_log[i] = std::log10(lab.funding);
        success[i] = lab.success ? 1 : 0;
        positives += success[i];
    }
    if (positives == 0 || positives == n) {
        throw FitError("pipeline: training dataset must contain both classes");
    }

    FittedPipeline p;
    p.schema = train.schema;
    p.config = config;
    p.data_fingerprint = hex64(dataset_fingerprint(train));

    auto provider = make_embedding_provider(config.embedding_provider,
                                            static_cast<int>(config.embedding_dim));
    p.encoder = fit_encoder(train, *provider);
    EncodedBlocks blocks = split_blocks(encode_dataset(train, p.encoder, *provider));
    const Matrix& tab = blocks.tabular;

    // Shuffled contiguous folds.
    const auto k_folds = static_cast<std::size_t>(config.oof_folds);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    Rng fold_rng(derive_seed(config.seed, "folds"));
    fold_rng.shuffle(perm);
    StackingTrace& trace = p.trace;
    trace.fold_of.assign(n, -1);
    trace.fold_train_rows.resize(k_folds);
    std::vector<std::vector<std::uint32_t>> fold_rows(k_folds);
    for (std::size_t k = 0; k < k_folds; ++k) {
        const std::size_t lo = k * n / k_folds;
        const std::size_t hi = (k + 1) * n / k_folds;
        for (std::size_t t = lo; t < hi; ++t) {
            fold_rows[k].push_back(static_cast<std::uint32_t>(perm[t]));
            trace.fold_of[perm[t]] = static_cast<int>(k);
        }
        std::sort(fold_rows[k].begin(), fold_rows[k].end());
    }

    if (config.use_gbt) trace.oof_gbt.assign(n, 0.0);
    if (config.use_rf) trace.oof_rf.assign(n, 0.0);
    for (std::size_t k = 0; k < k_folds; ++k) {
        auto& train_rows = trace.fold_train_rows[k];
        train_rows.clear();
        train_rows.reserve(n - fold_rows[k].size());
        for (std::size_t i = 0; i < n; ++i) {
            if (trace.fold_of[i] != static_cast<int>(k)) {
                train_rows.push_back(static_cast<std::uint32_t>(i));
            }
        }
        Matrix tab_tr = gather_rows(tab, train_rows);
        std::vector<double> y_tr(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) y_tr[i] = y_log[train_rows[i]];
        Matrix tab_te = gather_rows(tab, fold_rows[k]);

        if (config.use_gbt) {
            GbtParams gp = config.gbt;
            gp.seed = derive_seed(config.seed, "gbt_fold", k);
            GradientBoostedTrees m = fit_gbt(tab_tr, y_tr, gp);
            std::vector<double> pred = m.predict(tab_te);
            for (std::size_t i = 0; i < fold_rows[k].size(); ++i) {
                trace.oof_gbt[fold_rows[k][i]] = pred[i];
            }
            if (config.keep_fold_models) trace.fold_gbt.push_back(std::move(m));
        }
        if (config.use_rf) {
            RfParams rp = config.rf;
            rp.seed = derive_seed(config.seed, "rf_fold", k);
            RandomForest m = fit_rf(tab_tr, y_tr, rp);
            std::vector<double> pred = m.predict(tab_te);
            for (std::size_t i = 0; i < fold_rows[k].size(); ++i) {
                trace.oof_rf[fold_rows[k][i]] = pred[i];
            }
            if (config.keep_fold_models) trace.fold_rf.push_back(std::move(m));
        }
    }

    std::vector<const std::vector<double>*> bases;
    if (config.use_gbt) {
        bases.push_back(&trace.oof_gbt);
        p.meta_channel_names.push_back("gbt");
    }
    if (config.use_rf) {
        bases.push_back(&trace.oof_rf);
        p.meta_channel_names.push_back("rf");
    }
    p.base_channels = bases.size();
    for (const auto& name : blocks.embedding_names) p.meta_channel_names.push_back(name);

    Matrix mx = assemble_meta(bases, blocks.embedding);
    p.meta = config.use_meta ? fit_linear(mx, y_log, config.meta_lambda)
                             : bypass_meta(mx, bases.size());
    trace.meta_oof_estimate = p.meta.predict(mx);

    p.calibrator = fit_logistic(trace.meta_oof_estimate, success, config.calib_lambda);
    if (p.calibrator.coefficients[0] <= 0.0) {
        throw FitError("pipeline: calibrator slope is non-positive; the funding estimate does "
                       "not separate the classes");
    }

    if (config.use_gbt) {
        GbtParams gp = config.gbt;
        gp.seed = derive_seed(config.seed, "gbt_full");
        p.gbt = fit_gbt(tab, y_log, gp);
    }
    if (config.use_rf) {
        RfParams rp = config.rf;
        rp.seed = derive_seed(config.seed, "rf_full");
        p.rf = fit_rf(tab, y_log, rp);
    }
    return p;
}

std::vector<Prediction> predict(const FittedPipeline& pipeline, const Dataset& records) {
    auto provider = embedding_provider_from_id(pipeline.encoder.embedding_provider_id);
    std::vector<std::string> ids;
    ids.reserve(records.records.size());
    for (const auto& r : records.records) ids.push_back(r.id);
    try {
        EncodedBlocks blocks =
            split_blocks(encode_dataset(records, pipeline.encoder, *provider));
        return predict_encoded(pipeline, std::move(blocks), ids);
    } catch (const Error&) {
        // Fall through to the per-record path to isolate the failing rows.
    }
    std::vector<Prediction> out;
    out.reserve(records.records.size());
    for (const auto& rec : records.records) {
        Dataset one;
        one.schema = records.schema;
        one.records.push_back(rec);
        try {
            EncodedBlocks blocks =
                split_blocks(encode_dataset(one, pipeline.encoder, *provider));
            out.push_back(predict_encoded(pipeline, std::move(blocks), {rec.id})[0]);
        } catch (const Error& e) {
            Prediction pr;
            pr.id = rec.id;
            pr.error = e.what();
            out.push_back(std::move(pr));
        }
    }
    return out;
}

std::vector<ClassRow> class_success_table(const FittedPipeline& pipeline, const Dataset& dataset,
                                          bool by_actual_funding) {
    if (!dataset.fully_labeled()) {
        throw MetricError("class_success_table: dataset must be fully labeled");
    }
    std::array<std::size_t, 5> counts{};
    std::array<std::size_t, 5> wins{};
    if (by_actual_funding) {
        for (const FounderRecord& record : dataset.records) {
            const Labels& lab = labels_for(dataset, record.id);
            const int c = funding_class_index(lab.funding);
            ++counts[static_cast<std::size_t>(c)];
            wins[static_cast<std::size_t>(c)] += lab.success ? 1 : 0;
        }
    } else {
        std::vector<Prediction> preds = predict(pipeline, dataset);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            if (!preds[i].error.empty()) {
                throw MetricError("class_success_table: prediction failed for record " +
                                  preds[i].id + ": " + preds[i].error);
            }
            const int c = funding_class_index(preds[i].funding_usd);
            ++counts[static_cast<std::size_t>(c)];
            wins[static_cast<std::size_t>(c)] += labels_for(dataset, preds[i].id).success ? 1 : 0;
        }
    }
    std::vector<ClassRow> rows;
    for (std::size_t c = 0; c < 5; ++c) {
        ClassRow row;
        row.label = kFundingClassLabels[c];
        row.n = counts[c];
        if (counts[c] > 0) {
            row.success_probability =
                static_cast<double>(wins[c]) / static_cast<double>(counts[c]);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fundcast
