// fundcast: command-line front end for the funding-prediction pipeline.
//
// Subcommands: generate, enrich, train, evaluate, sweep, sensitivity,
// ablate, predict. Every run writes its resolved configuration and input
// fingerprints next to its outputs so result directories are
// self-describing. Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fundcast/csv.hpp"
#include "fundcast/enrich.hpp"
#include "fundcast/errors.hpp"
#include "fundcast/evalkit.hpp"
#include "fundcast/fnv.hpp"
#include "fundcast/kernels.hpp"
#include "fundcast/pipeline.hpp"
#include "fundcast/split.hpp"
#include "fundcast/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fundcast;

namespace {

// ---------------------------------------------------------------- helpers --

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path.string());
    out << content;
    if (!out) throw ParseError("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

json parse_json_file(const fs::path& path) {
    json j = json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON in " + path.string());
    return j;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Resolved config + input fingerprints, written next to each run's outputs.
void write_run_manifest(const fs::path& path, const std::string& command, const json& config,
                        const json& inputs, const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["config"] = config;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    write_text_file(path, m.dump(2) + "\n");
}

fs::path sibling(const fs::path& out, const char* suffix) {
    fs::path p = out;
    p.replace_extension("");
    p += suffix;
    return p;
}

void apply_kernel_backend(const std::string& name) {
    if (name == "auto") {
        kernels::set_backend(kernels::detect_backend());
    } else if (name == "scalar") {
        kernels::set_backend(kernels::Backend::scalar);
    } else if (name == "avx2") {
        if (!kernels::avx2_available())
            throw ParamError("kernel backend avx2 is unavailable on this machine/build");
        kernels::set_backend(kernels::Backend::avx2);
    } else {
        throw ParamError("unknown kernel backend '" + name + "'");
    }
}

FeatureSchema resolve_schema(const std::string& schema_path) {
    if (schema_path.empty()) return default_schema();
    return FeatureSchema::load(schema_path);
}

json input_fingerprint(const std::string& path, const Dataset& dataset) {
    return json{{"path", path},
                {"file", hex64(fingerprint_file(path))},
                {"dataset", hex64(dataset_fingerprint(dataset))}};
}

// ------------------------------------------------------------ flag groups --

struct SplitFlags {
    SplitSpec spec;
    bool no_split = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--train-size", spec.train_size, "Training partition size");
        cmd->add_option("--eval-subsets", spec.eval_subset_count, "Number of evaluation subsets");
        cmd->add_option("--subset-size", spec.eval_subset_size, "Rows per evaluation subset");
        cmd->add_option("--split-seed", spec.seed, "Seed for the dataset partition");
        cmd->add_flag("--stratified,!--no-stratified", spec.stratified,
                      "Keep per-partition success rates within 1pp of overall");
        cmd->add_flag("--no-split", no_split, "Use the whole input instead of partitioning");
    }

    json to_json() const {
        if (no_split) return json{{"no_split", true}};
        return json{{"train_size", spec.train_size},
                    {"eval_subset_count", spec.eval_subset_count},
                    {"eval_subset_size", spec.eval_subset_size},
                    {"stratified", spec.stratified},
                    {"seed", spec.seed}};
    }
};

struct PipelineFlags {
    PipelineConfig values;  // flag storage; only explicitly set fields apply
    std::string config_path;
    std::map<std::string, CLI::Option*> opts;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Pipeline config JSON file")
            ->check(CLI::ExistingFile);
        opts["seed"] = cmd->add_option("--seed", values.seed, "Master seed");
        opts["threshold"] =
            cmd->add_option("--threshold", values.threshold, "Success decision threshold");
        opts["oof_folds"] =
            cmd->add_option("--folds", values.oof_folds, "Out-of-fold stacking folds");
        opts["meta_lambda"] =
            cmd->add_option("--meta-lambda", values.meta_lambda, "Ridge penalty, meta-model");
        opts["calib_lambda"] =
            cmd->add_option("--calib-lambda", values.calib_lambda, "Ridge penalty, calibrator");
        opts["embedding_provider"] =
            cmd->add_option("--embedding-provider", values.embedding_provider,
                            "Text embedding provider (mock|none)");
        opts["embedding_dim"] =
            cmd->add_option("--embedding-dim", values.embedding_dim, "Embedding width");
        opts["gbt.n_trees"] =
            cmd->add_option("--gbt-trees", values.gbt.n_trees, "Boosted-ensemble tree count");
        opts["gbt.max_depth"] =
            cmd->add_option("--gbt-depth", values.gbt.max_depth, "Boosted tree depth");
        opts["gbt.learning_rate"] =
            cmd->add_option("--gbt-lr", values.gbt.learning_rate, "Boosting learning rate");
        opts["gbt.subsample"] =
            cmd->add_option("--gbt-subsample", values.gbt.subsample, "Boosting row subsample");
        opts["gbt.min_samples_leaf"] = cmd->add_option(
            "--gbt-min-leaf", values.gbt.min_samples_leaf, "Boosted tree min rows per leaf");
        opts["rf.n_trees"] =
            cmd->add_option("--rf-trees", values.rf.n_trees, "Forest tree count");
        opts["rf.max_depth"] =
            cmd->add_option("--rf-depth", values.rf.max_depth, "Forest tree depth");
        opts["rf.min_samples_leaf"] = cmd->add_option(
            "--rf-min-leaf", values.rf.min_samples_leaf, "Forest min rows per leaf");
        opts["rf.max_features"] = cmd->add_option(
            "--rf-max-features", values.rf.max_features, "Forest feature fraction per split");
        opts["use_gbt"] =
            cmd->add_flag("--use-gbt,!--no-gbt", values.use_gbt, "Enable the boosted base model");
        opts["use_rf"] =
            cmd->add_flag("--use-rf,!--no-rf", values.use_rf, "Enable the forest base model");
        opts["use_meta"] = cmd->add_flag("--use-meta,!--no-meta", values.use_meta,
                                         "Enable the linear meta-model (off = base average)");
    }

    // defaults < config file < explicitly set flags.
    PipelineConfig resolve() const {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg = PipelineConfig::from_json(read_text_file(config_path));
        json j = json::parse(cfg.to_json());
        auto set = [&](const char* key, auto value) {
            auto it = opts.find(key);
            if (it == opts.end() || it->second->count() == 0) return;
            std::string k(key);
            auto dot = k.find('.');
            if (dot == std::string::npos) {
                j[k] = value;
            } else {
                j[k.substr(0, dot)][k.substr(dot + 1)] = value;
            }
        };
        set("seed", values.seed);
        set("threshold", values.threshold);
        set("oof_folds", values.oof_folds);
        set("meta_lambda", values.meta_lambda);
        set("calib_lambda", values.calib_lambda);
        set("embedding_provider", values.embedding_provider);
        set("embedding_dim", values.embedding_dim);
        set("gbt.n_trees", values.gbt.n_trees);
        set("gbt.max_depth", values.gbt.max_depth);
        set("gbt.learning_rate", values.gbt.learning_rate);
        set("gbt.subsample", values.gbt.subsample);
        set("gbt.min_samples_leaf", values.gbt.min_samples_leaf);
        set("rf.n_trees", values.rf.n_trees);
        set("rf.max_depth", values.rf.max_depth);
        set("rf.min_samples_leaf", values.rf.min_samples_leaf);
        set("rf.max_features", values.rf.max_features);
        set("use_gbt", values.use_gbt);
        set("use_rf", values.use_rf);
        set("use_meta", values.use_meta);
        return PipelineConfig::from_json(j.dump());
    }
};

// ------------------------------------------------------------ subcommands --

struct GenerateArgs {
    std::string out;
    std::string ground_truth;
    std::string preset = "default";
    std::string config_path;
    GeneratorConfig flag_values;
    CLI::Option *opt_seed = nullptr, *opt_n = nullptr, *opt_rate = nullptr, *opt_noise = nullptr;
};

int run_generate(const GenerateArgs& a) {
    GeneratorConfig cfg;
    if (a.preset == "default") {
        cfg = GeneratorConfig::defaults();
    } else if (a.preset == "strong") {
        cfg = GeneratorConfig::strong_signal();
    } else if (a.preset == "noiseless-top") {
        cfg = GeneratorConfig::noiseless_top_feature();
    } else {
        throw ParamError("unknown preset '" + a.preset +
                         "' (expected default, strong or noiseless-top)");
    }
    if (!a.config_path.empty()) {
        json merged = cfg.to_json();
        merged.update(parse_json_file(a.config_path));
        cfg = GeneratorConfig::from_json(merged);
    }
    if (a.opt_seed->count() > 0) cfg.seed = a.flag_values.seed;
    if (a.opt_n->count() > 0) cfg.n_records = a.flag_values.n_records;
    if (a.opt_rate->count() > 0) cfg.positive_rate = a.flag_values.positive_rate;
    if (a.opt_noise->count() > 0) cfg.noise_sigma = a.flag_values.noise_sigma;

    GroundTruth gt;
    Dataset data = generate_dataset(cfg, &gt);
    if (fs::path(a.out).has_parent_path())
        fs::create_directories(fs::path(a.out).parent_path());
    save_dataset(data, a.out);
    const fs::path truth_path =
        a.ground_truth.empty() ? sibling(a.out, ".truth.json") : fs::path(a.ground_truth);
    gt.save(truth_path.string());

    json fp;
    fp["output_dataset"] = {{"path", a.out}, {"dataset", hex64(dataset_fingerprint(data))}};
    write_run_manifest(sibling(a.out, ".run.json"), "generate", cfg.to_json(), fp,
                       {a.out, truth_path.string()});
    std::cout << "generated " << data.records.size() << " records -> " << a.out << "\n";
    return 0;
}

struct EnrichArgs {
    std::string in, out, provider = "mock", cache_path, schema_path;
};

int run_enrich(const EnrichArgs& a) {
    const FeatureSchema schema = resolve_schema(a.schema_path);
    Dataset data = load_dataset(a.in, schema);
    const json in_fp = json{{"data", input_fingerprint(a.in, data)}};

    EnrichSummary summary;
    if (a.provider != "none") {
        auto provider = make_enrichment_provider(a.provider);
        std::optional<EnrichmentCache> cache;
        if (!a.cache_path.empty()) cache.emplace(a.cache_path);
        summary = enrich_dataset(data, *provider, cache ? &*cache : nullptr);
    }
    if (fs::path(a.out).has_parent_path())
        fs::create_directories(fs::path(a.out).parent_path());
    save_dataset(data, a.out);

    json cfg{{"provider", a.provider},
             {"cache", a.cache_path},
             {"schema_hash", schema.hash()}};
    write_run_manifest(sibling(a.out, ".run.json"), "enrich", cfg, in_fp, {a.out});
    std::cout << "enriched -> " << a.out << " (ok " << summary.ok << ", rejected "
              << summary.rejected << ", provider errors " << summary.provider_error
              << ", cache hits " << summary.cache_hits << ")\n";
    return 0;
}

struct TrainArgs {
    std::string data, out, schema_path;
    PipelineFlags pipeline;
    SplitFlags split;
};

int run_train(const TrainArgs& a) {
    const FeatureSchema schema = resolve_schema(a.schema_path);
    Dataset full = load_dataset(a.data, schema);
    const PipelineConfig cfg = a.pipeline.resolve();

    json fp;
    fp["data"] = input_fingerprint(a.data, full);

    FittedPipeline fitted;
    if (a.split.no_split) {
        fitted = fit_pipeline(full, cfg);
    } else {
        SplitResult split = split_dataset(full, a.split.spec);
        fp["train_subset"] = hex64(dataset_fingerprint(split.train));
        json evals = json::array();
        for (const auto& sub : split.eval_subsets) evals.push_back(hex64(dataset_fingerprint(sub)));
        fp["eval_subsets"] = evals;
        fitted = fit_pipeline(split.train, cfg);
    }
    if (fs::path(a.out).has_parent_path())
        fs::create_directories(fs::path(a.out).parent_path());
    save_pipeline(a.out, fitted);

    json cfg_json = json::parse(cfg.to_json());
    cfg_json["split"] = a.split.to_json();
    cfg_json["schema_hash"] = schema.hash();
    write_run_manifest(sibling(a.out, ".run.json"), "train", cfg_json, fp, {a.out});
    std::cout << "trained pipeline -> " << a.out << " (train fingerprint "
              << fitted.data_fingerprint << ")\n";
    return 0;
}

// Shared by evaluate/sweep: load model, check optional schema override, load
// data with the model's schema, and split into evaluation subsets.
struct LoadedEval {
    FittedPipeline pipeline;
    Dataset full;
    std::vector<Dataset> subsets;
    std::vector<std::string> subset_ids;
    Dataset pooled;
    json fingerprints;
};

LoadedEval load_for_eval(const std::string& model_path, const std::string& data_path,
                         const std::string& schema_path, const SplitFlags& split) {
    LoadedEval ev;
    ev.pipeline = load_pipeline(model_path);
    if (!schema_path.empty()) {
        const FeatureSchema given = FeatureSchema::load(schema_path);
        if (given.hash() != ev.pipeline.schema.hash()) {
            throw SchemaError("schema hash mismatch: --schema file has " + given.hash() +
                              ", model artifact has " + ev.pipeline.schema.hash());
        }
    }
    ev.full = load_dataset(data_path, ev.pipeline.schema);
    ev.fingerprints["model"] = {{"path", model_path},
                                {"file", hex64(fingerprint_file(model_path))},
                                {"train_fingerprint", ev.pipeline.data_fingerprint}};
    ev.fingerprints["data"] = input_fingerprint(data_path, ev.full);

    if (split.no_split) {
        ev.subsets.push_back(ev.full);
        ev.subset_ids.push_back("all");
        ev.pooled = ev.full;
    } else {
        SplitResult sr = split_dataset(ev.full, split.spec);
        ev.pooled.schema = ev.full.schema;
        json evals = json::array();
        for (std::size_t k = 0; k < sr.eval_subsets.size(); ++k) {
            Dataset& sub = sr.eval_subsets[k];
            evals.push_back(hex64(dataset_fingerprint(sub)));
            ev.subset_ids.push_back("eval-" + std::to_string(k + 1));
            for (const FounderRecord& r : sub.records) {
                ev.pooled.records.push_back(r);
                auto lab = sub.labels.find(r.id);
                if (lab != sub.labels.end()) ev.pooled.labels[r.id] = lab->second;
            }
            ev.subsets.push_back(std::move(sub));
        }
        ev.fingerprints["eval_subsets"] = evals;
    }
    return ev;
}

std::string config_fingerprint(const FittedPipeline& pipeline) {
    return hex64(fnv1a64(pipeline.config.to_json()));
}

struct EvaluateArgs {
    std::string model, data, out_dir, schema_path;
    SplitFlags split;
};

int run_evaluate(const EvaluateArgs& a) {
    LoadedEval ev = load_for_eval(a.model, a.data, a.schema_path, a.split);

    EvaluationReport report;
    for (std::size_t k = 0; k < ev.subsets.size(); ++k) {
        report.rows.push_back(evaluate_subset(ev.pipeline, ev.subsets[k], ev.subset_ids[k]));
    }
    report.class_table = class_success_table(ev.pipeline, ev.pooled);
    report.sweep = sweep_threshold(ev.pipeline, ev.pooled, default_sweep_grid());
    report.sensitivity_table = sensitivity(ev.pipeline);
    report.config_fingerprint = config_fingerprint(ev.pipeline);

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "report.json", report.to_json() + "\n");
    write_text_file(dir / "report.txt", report.to_text());
    write_text_file(dir / "sweep.csv", sweep_to_csv(report.sweep));
    write_text_file(dir / "sensitivity.csv", report.sensitivity_table.to_csv());

    json cfg = json::parse(ev.pipeline.config.to_json());
    cfg["split"] = a.split.to_json();
    write_run_manifest(dir / "run.json", "evaluate", cfg, ev.fingerprints,
                       {"report.json", "report.txt", "sweep.csv", "sensitivity.csv"});
    std::cout << report.to_text();
    return 0;
}

struct SweepArgs {
    std::string model, data, out_dir, schema_path;
    std::vector<double> grid;
    SplitFlags split;
};

int run_sweep(const SweepArgs& a) {
    LoadedEval ev = load_for_eval(a.model, a.data, a.schema_path, a.split);
    const std::vector<double> grid = a.grid.empty() ? default_sweep_grid() : a.grid;
    std::vector<SweepRow> rows = sweep_threshold(ev.pipeline, ev.pooled, grid);

    EvaluationReport report;
    report.sweep = rows;
    report.config_fingerprint = config_fingerprint(ev.pipeline);

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "sweep.csv", sweep_to_csv(rows));
    write_text_file(dir / "sweep.json", report.to_json() + "\n");
    write_text_file(dir / "sweep.txt", report.to_text());

    json cfg = json::parse(ev.pipeline.config.to_json());
    cfg["split"] = a.split.to_json();
    cfg["grid"] = grid;
    write_run_manifest(dir / "run.json", "sweep", cfg, ev.fingerprints,
                       {"sweep.csv", "sweep.json", "sweep.txt"});
    std::cout << report.to_text();
    return 0;
}

struct SensitivityArgs {
    std::string model, data, out_dir, schema_path;
    bool stability = false;
    std::vector<double> fractions{0.0, 0.05, 0.10};
    int repeats = 2;
    std::uint64_t seed = 42;
    SplitFlags split;
};

int run_sensitivity(const SensitivityArgs& a) {
    FittedPipeline pipeline = load_pipeline(a.model);
    SensitivityTable table = sensitivity(pipeline);

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "sensitivity.csv", table.to_csv());

    EvaluationReport report;
    report.sensitivity_table = table;
    report.config_fingerprint = config_fingerprint(pipeline);
    write_text_file(dir / "sensitivity.json", report.to_json() + "\n");

    json inputs;
    inputs["model"] = {{"path", a.model}, {"file", hex64(fingerprint_file(a.model))}};
    std::vector<std::string> outputs{"sensitivity.csv", "sensitivity.json"};

    if (a.stability) {
        if (a.data.empty())
            throw ParamError("--stability requires --data (retrains on resampled subsets)");
        Dataset full = load_dataset(a.data, pipeline.schema);
        inputs["data"] = input_fingerprint(a.data, full);
        Dataset train = full;
        if (!a.split.no_split) {
            SplitResult sr = split_dataset(full, a.split.spec);
            train = std::move(sr.train);
        }
        StabilityResult st =
            sensitivity_stability(pipeline.config, train, a.fractions, a.repeats, a.seed);
        json sj;
        sj["fractions"] = a.fractions;
        sj["repeats"] = a.repeats;
        sj["seed"] = a.seed;
        json runs = json::array();
        for (const StabilityRun& run : st.runs) {
            json rows = json::array();
            for (const SensitivityRow& row : run.table.rows)
                rows.push_back({{"feature", row.feature}, {"share", row.share}});
            runs.push_back(
                {{"fraction", run.fraction}, {"repeat", run.repeat}, {"rows", rows}});
        }
        sj["runs"] = runs;
        sj["tau"] = st.tau;
        sj["mean_tau"] = st.mean_tau;
        sj["top1_consistent"] = st.top1_consistent;
        write_text_file(dir / "stability.json", sj.dump(2) + "\n");
        outputs.push_back("stability.json");
        std::cout << "stability mean tau " << st.mean_tau << " (top-1 "
                  << (st.top1_consistent ? "consistent" : "inconsistent") << ")\n";
    }

    json cfg = json::parse(pipeline.config.to_json());
    cfg["stability"] = a.stability;
    write_run_manifest(dir / "run.json", "sensitivity", cfg, inputs, outputs);
    std::cout << "sensitivity table -> " << (dir / "sensitivity.csv").string() << "\n";
    return 0;
}

struct AblateArgs {
    std::string suite, data, out_dir, schema_path;
    PipelineFlags pipeline;
    SplitFlags split;
};

int run_ablate(const AblateArgs& a) {
    const FeatureSchema schema = resolve_schema(a.schema_path);
    Dataset full = load_dataset(a.data, schema);
    const PipelineConfig cfg = a.pipeline.resolve();

    std::vector<AblationSuite> suites;
    if (a.suite == "all") {
        suites = {AblationSuite::llm_features, AblationSuite::embeddings,
                  AblationSuite::model_components, AblationSuite::feature_categories};
    } else {
        suites = {ablation_suite_from_name(a.suite)};
    }

    EvaluationReport report;
    for (AblationSuite suite : suites)
        report.ablations.push_back(run_ablation(suite, full, cfg, a.split.spec));
    report.config_fingerprint = hex64(fnv1a64(cfg.to_json()));

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "ablation.json", report.to_json() + "\n");
    write_text_file(dir / "ablation.txt", report.to_text());

    json cfg_json = json::parse(cfg.to_json());
    cfg_json["split"] = a.split.to_json();
    cfg_json["suite"] = a.suite;
    json inputs{{"data", input_fingerprint(a.data, full)}};
    write_run_manifest(dir / "run.json", "ablate", cfg_json, inputs,
                       {"ablation.json", "ablation.txt"});
    std::cout << report.to_text();
    return 0;
}

struct PredictArgs {
    std::string model, in, out, schema_path;
};

int run_predict(const PredictArgs& a) {
    FittedPipeline pipeline = load_pipeline(a.model);
    if (!a.schema_path.empty()) {
        const FeatureSchema given = FeatureSchema::load(a.schema_path);
        if (given.hash() != pipeline.schema.hash()) {
            throw SchemaError("schema hash mismatch: --schema file has " + given.hash() +
                              ", model artifact has " + pipeline.schema.hash());
        }
    }
    Dataset data = load_dataset(a.in, pipeline.schema);
    std::vector<Prediction> preds = predict(pipeline, data);

    std::string csv =
        "id,funding_usd,log10_estimate,success_prob,predicted_success,funding_class,"
        "low_range,error\n";
    std::size_t failures = 0;
    for (const Prediction& p : preds) {
        if (!p.error.empty()) {
            ++failures;
            csv += csv_quote(p.id) + ",,,,,,," + csv_quote(p.error) + "\n";
            continue;
        }
        csv += csv_quote(p.id) + ',' + format_double(p.funding_usd) + ',' +
               format_double(p.log10_estimate) + ',' + format_double(p.success_prob) + ',' +
               (p.predicted_success ? "1" : "0") + ',' + csv_quote(p.funding_class_label) + ',' +
               (p.low_range ? "1" : "0") + ",\n";
    }
    write_text_file(a.out, csv);

    json inputs;
    inputs["model"] = {{"path", a.model}, {"file", hex64(fingerprint_file(a.model))}};
    inputs["data"] = input_fingerprint(a.in, data);
    write_run_manifest(sibling(a.out, ".run.json"), "predict",
                       json::parse(pipeline.config.to_json()), inputs, {a.out});
    std::cout << "predicted " << preds.size() << " records (" << failures << " failed) -> "
              << a.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fundcast: founder-based startup funding and success prediction"};
    app.require_subcommand(1);
    std::string backend = "auto";
    app.add_option("--kernel-backend", backend, "Numeric kernel backend (auto|scalar|avx2)")
        ->capture_default_str();

    GenerateArgs gen;
    CLI::App* cgen = app.add_subcommand("generate", "Generate a calibrated synthetic dataset");
    cgen->add_option("--out", gen.out, "Output dataset CSV")->required();
    cgen->add_option("--ground-truth", gen.ground_truth,
                     "Ground-truth sidecar path (default: <out>.truth.json)");
    cgen->add_option("--preset", gen.preset, "Generator preset (default|strong|noiseless-top)")
        ->capture_default_str();
    cgen->add_option("--config", gen.config_path, "Generator config JSON file")
        ->check(CLI::ExistingFile);
    gen.opt_seed = cgen->add_option("--seed", gen.flag_values.seed, "Generator seed");
    gen.opt_n = cgen->add_option("--n", gen.flag_values.n_records, "Record count");
    gen.opt_rate =
        cgen->add_option("--positive-rate", gen.flag_values.positive_rate, "Success fraction");
    gen.opt_noise =
        cgen->add_option("--noise-sigma", gen.flag_values.noise_sigma, "Log10 noise sigma");

    EnrichArgs enr;
    CLI::App* cenr = app.add_subcommand("enrich", "Derive categorical features from free text");
    cenr->add_option("--in", enr.in, "Input dataset CSV")->required();
    cenr->add_option("--out", enr.out, "Output dataset CSV")->required();
    cenr->add_option("--provider", enr.provider, "Enrichment provider (mock|none|external)")
        ->capture_default_str();
    cenr->add_option("--cache", enr.cache_path, "JSON-lines response cache path");
    cenr->add_option("--schema", enr.schema_path, "Feature schema JSON (default: built-in)");

    TrainArgs trn;
    CLI::App* ctrn = app.add_subcommand("train", "Fit the stacked pipeline");
    ctrn->add_option("--data", trn.data, "Labeled dataset CSV")->required();
    ctrn->add_option("--out", trn.out, "Output pipeline artifact JSON")->required();
    ctrn->add_option("--schema", trn.schema_path, "Feature schema JSON (default: built-in)");
    trn.pipeline.add_to(ctrn);
    trn.split.add_to(ctrn);

    EvaluateArgs evl;
    CLI::App* cevl = app.add_subcommand("evaluate", "Evaluate a trained pipeline");
    cevl->add_option("--model", evl.model, "Pipeline artifact JSON")->required();
    cevl->add_option("--data", evl.data, "Labeled dataset CSV")->required();
    cevl->add_option("--out-dir", evl.out_dir, "Report output directory")->required();
    cevl->add_option("--schema", evl.schema_path, "Schema JSON to check against the artifact");
    evl.split.add_to(cevl);

    SweepArgs swp;
    CLI::App* cswp = app.add_subcommand("sweep", "Threshold sweep over the decision grid");
    cswp->add_option("--model", swp.model, "Pipeline artifact JSON")->required();
    cswp->add_option("--data", swp.data, "Labeled dataset CSV")->required();
    cswp->add_option("--out-dir", swp.out_dir, "Output directory")->required();
    cswp->add_option("--schema", swp.schema_path, "Schema JSON to check against the artifact");
    cswp->add_option("--grid", swp.grid, "Thresholds (comma-separated)")->delimiter(',');
    swp.split.add_to(cswp);

    SensitivityArgs sns;
    CLI::App* csns = app.add_subcommand("sensitivity", "Feature sensitivity and rank stability");
    csns->add_option("--model", sns.model, "Pipeline artifact JSON")->required();
    csns->add_option("--out-dir", sns.out_dir, "Output directory")->required();
    csns->add_flag("--stability", sns.stability, "Also run outlier-resampling stability");
    csns->add_option("--data", sns.data, "Labeled dataset CSV (required with --stability)");
    csns->add_option("--schema", sns.schema_path, "Schema JSON to check against the artifact");
    csns->add_option("--fractions", sns.fractions, "Outlier fractions (comma-separated)")
        ->delimiter(',');
    csns->add_option("--repeats", sns.repeats, "Repeats per fraction")->capture_default_str();
    csns->add_option("--seed", sns.seed, "Stability resampling seed")->capture_default_str();
    sns.split.add_to(csns);

    AblateArgs abl;
    CLI::App* cabl = app.add_subcommand("ablate", "Run an ablation suite");
    cabl->add_option("--suite", abl.suite,
                     "llm_features|embeddings|model_components|feature_categories|all")
        ->required();
    cabl->add_option("--data", abl.data, "Labeled dataset CSV")->required();
    cabl->add_option("--out-dir", abl.out_dir, "Output directory")->required();
    cabl->add_option("--schema", abl.schema_path, "Feature schema JSON (default: built-in)");
    abl.pipeline.add_to(cabl);
    abl.split.add_to(cabl);

    PredictArgs prd;
    CLI::App* cprd = app.add_subcommand("predict", "Score records with a trained pipeline");
    cprd->add_option("--model", prd.model, "Pipeline artifact JSON")->required();
    cprd->add_option("--in", prd.in, "Input dataset CSV (labels optional)")->required();
    cprd->add_option("--out", prd.out, "Output predictions CSV")->required();
    cprd->add_option("--schema", prd.schema_path, "Schema JSON to check against the artifact");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        apply_kernel_backend(backend);
        if (cgen->parsed()) return run_generate(gen);
        if (cenr->parsed()) return run_enrich(enr);
        if (ctrn->parsed()) return run_train(trn);
        if (cevl->parsed()) return run_evaluate(evl);
        if (cswp->parsed()) return run_sweep(swp);
        if (csns->parsed()) return run_sensitivity(sns);
        if (cabl->parsed()) return run_ablate(abl);
        if (cprd->parsed()) return run_predict(prd);
        std::cerr << "no subcommand given\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
