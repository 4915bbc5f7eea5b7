#include "fundcast/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "fundcast/classes.hpp"
#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"
#include "fundcast/rng.hpp"

namespace fundcast {

namespace {

// -------- feature marginal distributions ---------------------------------

struct CatDist {
    std::vector<double> probs;
};

const std::vector<double>& category_probs() {
    static const std::vector<double> p = {0.285, 0.225, 0.160, 0.110, 0.078,
                                          0.055, 0.038, 0.025, 0.014, 0.010};
    return p;
}

const std::map<std::string, std::vector<double>>& categorical_probs_table() {
    static const std::map<std::string, std::vector<double>> t = [] {
        std::map<std::string, std::vector<double>> m;
        m["category_list"] = category_probs();
        m["education_level"] = {0.20, 0.40, 0.25, 0.15};
        m["domain_expertise"] = {0.35, 0.30, 0.20, 0.15};
        m["skill_relevance"] = {0.15, 0.20, 0.30, 0.20, 0.15};
        return m;
    }();
    return t;
}

const std::vector<double>& llm_filler_probs() {
    static const std::vector<double> p = {0.15, 0.25, 0.30, 0.20, 0.10};
    return p;
}

const std::map<std::string, double>& boolean_probs_table() {
    static const std::map<std::string, double> t = {
        {"has_technical_cofounder", 0.55}, {"prior_exit", 0.18},
        {"is_b2b", 0.62},                  {"is_remote_first", 0.44},
        {"has_paying_customers", 0.51},    {"accelerator_alumni", 0.33},
        {"has_phd_on_team", 0.29},         {"raised_friends_family", 0.47},
        {"has_patent_pending", 0.22},      {"is_deep_tech", 0.31},
        {"has_advisory_board", 0.58},      {"repeat_founder_team", 0.26},
        {"has_press_coverage", 0.41},      {"international_presence", 0.24},
        {"has_mvp", 0.66},                 {"revenue_positive", 0.37},
        {"has_enterprise_pilot", 0.28},    {"university_spinout", 0.12},
        {"has_open_source", 0.35},         {"family_business_background", 0.15}};
    return t;
}

// Continuous feature families. kind: pois (lambda, +shift, cap),
// geom (p, cap), gamma (integer shape, scale).
struct ContDist {
    enum Kind { pois, geom, gamma } kind;
    double a = 0.0;  // lambda | p | shape
    double b = 0.0;  // shift  | -  | scale
    int cap = -1;    // -1 = uncapped
};

const std::map<std::string, ContDist>& continuous_dist_table() {
    static const std::map<std::string, ContDist> t = {
        {"number_of_founders", {ContDist::pois, 1.3, 1.0, 6}},
        {"previous_startups", {ContDist::geom, 0.5, 0.0, 8}},
        {"years_experience", {ContDist::gamma, 4.0, 2.25, -1}},
        {"team_size", {ContDist::pois, 6.0, 1.0, -1}},
        {"advisor_count", {ContDist::pois, 2.0, 0.0, -1}},
        {"patent_count", {ContDist::geom, 0.6, 0.0, -1}},
        {"media_mentions", {ContDist::pois, 3.0, 0.0, -1}},
        {"months_since_founding", {ContDist::gamma, 3.0, 8.0, -1}},
        {"competitor_count", {ContDist::pois, 5.0, 0.0, -1}},
        {"burn_rate_monthly", {ContDist::gamma, 2.0, 30.0, -1}},
        {"runway_months", {ContDist::gamma, 3.0, 6.0, -1}},
        {"customer_count", {ContDist::geom, 0.05, 0.0, -1}},
        {"mrr_thousands", {ContDist::gamma, 2.0, 10.0, -1}},
        {"github_stars", {ContDist::geom, 0.02, 0.0, -1}},
        {"conference_talks", {ContDist::pois, 1.0, 0.0, -1}}};
    return t;
}

double draw_continuous(Rng& rng, const ContDist& d) {
    double v = 0.0;
    switch (d.kind) {
        case ContDist::pois: v = rng.poisson(d.a) + d.b; break;
        case ContDist::geom: v = rng.geometric(d.a); break;
        case ContDist::gamma: v = rng.gamma_int(static_cast<int>(d.a), d.b); break;
    }
    if (d.cap >= 0) v = std::min(v, static_cast<double>(d.cap));
    return v;
}

double discrete_sigma(const std::vector<double>& pmf_value_pairs_probs,
                      const std::vector<double>& values) {
    double m = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        m += pmf_value_pairs_probs[i] * values[i];
        m2 += pmf_value_pairs_probs[i] * values[i] * values[i];
    }
    return std::sqrt(std::max(0.0, m2 - m * m));
}

double cont_sigma(const ContDist& d) {
    if (d.kind == ContDist::gamma) return std::sqrt(d.a) * d.b;
    // Capped/shifted discrete families: sum the pmf far enough out.
    std::vector<double> probs, values;
    double tail = 1.0;
    const int far = 200;
    for (int k = 0; k <= far; ++k) {
        double pk;
        if (d.kind == ContDist::pois) {
            pk = std::exp(-d.a + k * std::log(d.a) - std::lgamma(k + 1.0));
        } else {
            pk = std::pow(1.0 - d.a, k) * d.a;
        }
        double v = (d.kind == ContDist::pois) ? k + d.b : k;
        if (d.cap >= 0 && v >= d.cap) {
            probs.push_back(tail);
            values.push_back(d.cap);
            tail = 0.0;
            break;
        }
        probs.push_back(pk);
        values.push_back(v);
        tail -= pk;
    }
    if (tail > 0.0) {
        // Residual mass at the far tail; negligible but keep sums at 1.
        probs.push_back(tail);
        values.push_back(values.back() + 1.0);
    }
    return discrete_sigma(probs, values);
}

// -------- description text -------------------------------------------------

const std::vector<std::string>& filler_vocab() {
    static const std::vector<std::string> v = {
        "platform", "scalable", "automation", "insight", "workflow", "pipeline", "realtime",
        "analytics", "dashboard", "integration", "api", "cloud", "onprem", "latency", "edge",
        "mobile", "secure", "compliance", "audit", "growth", "retention", "conversion",
        "funnel", "pilot", "enterprise", "smb", "consumer", "marketplace", "network",
        "community", "subscription", "licensing", "margin", "unit", "economics", "churn",
        "cohort", "segment", "vertical", "horizontal", "stack", "microservices", "monolith",
        "database", "indexing", "search", "ranking", "recommendation", "personalization",
        "forecasting", "optimization", "scheduling", "routing", "dispatch", "inventory",
        "procurement", "billing", "invoicing", "payroll", "onboarding", "provisioning",
        "observability", "telemetry", "monitoring", "alerting", "incident", "resilience",
        "failover", "redundancy", "throughput", "bandwidth", "capacity", "utilization",
        "benchmark", "baseline", "experiment", "iteration", "roadmap", "milestone",
        "quarter", "sprint", "backlog", "launch", "rollout", "adoption", "activation",
        "engagement", "feedback", "survey", "interview", "discovery", "validation",
        "prototype", "beta", "release", "versioning", "migration", "refactor", "modular",
        "composable", "extensible", "interoperable", "standards", "protocol", "encryption",
        "identity", "authentication", "authorization", "governance", "privacy", "residency",
        "regional", "global", "localized", "multilingual", "accessibility", "usability",
        "ergonomic", "intuitive", "frictionless", "seamless", "turnkey", "managed",
        "selfserve", "whiteglove", "partner", "channel", "reseller", "alliance",
        "ecosystem", "developer", "sdk", "webhook", "eventdriven", "streaming", "batch",
        "ingestion", "transformation", "warehouse", "lakehouse", "catalog", "lineage",
        "quality", "stewardship", "annotation", "labeling", "training", "inference",
        "finetuning", "distillation", "quantization", "deployment", "orchestration",
        "containerized", "serverless", "autoscaling", "loadbalancing", "caching",
        "queueing", "replication", "sharding", "consistency", "durability", "availability",
        "reliability", "maintainability", "portability", "efficiency", "sustainability",
        "carbon", "footprint", "offset", "circular", "supply", "demand", "elasticity",
        "pricing", "packaging", "tiering", "freemium", "trial", "expansion", "upsell",
        "crosssell", "renewal", "advocacy", "referral", "viral", "organic", "paid",
        "attribution", "lifetime", "acquisition", "payback", "runway", "burn", "capital",
        "dilution", "valuation", "term", "sheet", "diligence", "cap", "table", "vesting",
        "cliff", "option", "pool", "secondary", "bridge", "tranche", "covenant"};
    return v;
}

std::string level_label_lower(const FeatureDecl& f, int v) {
    std::string s = f.levels[static_cast<std::size_t>(v)].first;
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string spaced(const std::string& name) {
    std::string s = name;
    std::replace(s.begin(), s.end(), '_', ' ');
    return s;
}

std::string make_description(const FeatureSchema& schema, const FounderRecord& rec,
                             const GeneratorConfig& cfg, Rng& rng) {
    int cat = static_cast<int>(rec.values.at("category_list"));
    std::string text = "Building " + cfg.category_phrases[static_cast<std::size_t>(cat)] + ".";
    for (const auto& f : schema.features) {
        if (f.origin != Origin::llm_derived) continue;
        int v = static_cast<int>(rec.values.at(f.name));
        text += " " + spaced(f.name) + ": " + level_label_lower(f, v) + ".";
    }
    const auto& vocab = filler_vocab();
    text += " Focus:";
    for (int t = 0; t < cfg.filler_tokens; ++t)
        text += " " + vocab[static_cast<std::size_t>(rng.below(vocab.size()))];
    text += ".";
    return text;
}

}  // namespace

// -------- config -----------------------------------------------------------

GeneratorConfig GeneratorConfig::defaults() {
    GeneratorConfig c;
    c.signal_weights = {{"category_list", 0.50},   {"number_of_founders", 0.18},
                        {"previous_startups", 0.10}, {"domain_expertise", 0.10},
                        {"skill_relevance", 0.05},   {"education_level", 0.02},
                        {"has_technical_cofounder", 0.12}, {"prior_exit", 0.10},
                        {"years_experience", 0.0}};
    c.class_success_probs = {{"100K-1M", 0.0127},
                             {"1M-10M", 0.0841},
                             {"10M-100M", 0.8089},
                             {"100M-1B", 0.9535},
                             {"1B+", 1.0}};
    c.category_phrases = {
        "payments infrastructure for cross border settlement",
        "clinical workflow platform for outpatient care",
        "developer productivity tooling for continuous delivery",
        "applied machine intelligence for document understanding",
        "headless storefront engine for niche retailers",
        "zero trust access layer for industrial networks",
        "freight orchestration network for middle mile",
        "adaptive learning companion for vocational training",
        "grid scale storage analytics for renewable operators",
        "protein design pipeline for therapeutic discovery"};
    return c;
}

GeneratorConfig GeneratorConfig::strong_signal() {
    GeneratorConfig c = defaults();
    c.noise_sigma = 0.015;
    return c;
}

GeneratorConfig GeneratorConfig::noiseless_top_feature() {
    GeneratorConfig c = defaults();
    c.noise_sigma = 0.0;
    for (auto& [name, w] : c.signal_weights)
        if (name != "category_list") w = 0.0;
    return c;
}

nlohmann::json GeneratorConfig::to_json() const {
    nlohmann::json j;
    j["n_records"] = n_records;
    j["positive_rate"] = positive_rate;
    j["signal_weights"] = signal_weights;
    j["noise_sigma"] = noise_sigma;
    j["class_success_probs"] = class_success_probs;
    j["category_phrases"] = category_phrases;
    j["filler_tokens"] = filler_tokens;
    j["base_level"] = base_level;
    j["seed"] = seed;
    return j;
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
    GeneratorConfig c = defaults();
    if (j.contains("n_records")) c.n_records = j["n_records"].get<int>();
    if (j.contains("positive_rate")) c.positive_rate = j["positive_rate"].get<double>();
    if (j.contains("signal_weights"))
        c.signal_weights = j["signal_weights"].get<std::map<std::string, double>>();
    if (j.contains("noise_sigma")) c.noise_sigma = j["noise_sigma"].get<double>();
    if (j.contains("class_success_probs"))
        c.class_success_probs = j["class_success_probs"].get<std::map<std::string, double>>();
    if (j.contains("category_phrases"))
        c.category_phrases = j["category_phrases"].get<std::vector<std::string>>();
    if (j.contains("filler_tokens")) c.filler_tokens = j["filler_tokens"].get<int>();
    if (j.contains("base_level")) c.base_level = j["base_level"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    return c;
}

// -------- ground truth -------------------------------------------------------

nlohmann::json GroundTruth::to_json() const {
    nlohmann::json j;
    j["base_level"] = base_level;
    j["calibration_shift"] = calibration_shift;
    j["effective_base"] = base_level + calibration_shift;
    j["signal_weights"] = signal_weights;
    j["class_success_probs"] = class_success_probs;
    j["feature_stddev"] = feature_stddev;
    nlohmann::json imp = nlohmann::json::array();
    for (const auto& [name, share] : planted_importance) imp.push_back({name, share});
    j["planted_importance"] = imp;
    j["seed"] = seed;
    j["n_records"] = n_records;
    j["positive_rate_target"] = positive_rate_target;
    j["positive_rate_realized"] = positive_rate_realized;
    return j;
}

void GroundTruth::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw GeneratorError("cannot write ground truth file: " + path);
    out << to_json().dump(2) << "\n";
}

// -------- generation ---------------------------------------------------------

double generated_feature_stddev(const std::string& feature) {
    const auto& cats = categorical_probs_table();
    auto ci = cats.find(feature);
    if (ci != cats.end()) {
        std::vector<double> values(ci->second.size());
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
        return discrete_sigma(ci->second, values);
    }
    const auto& bools = boolean_probs_table();
    auto bi = bools.find(feature);
    if (bi != bools.end()) return std::sqrt(bi->second * (1.0 - bi->second));
    const auto& conts = continuous_dist_table();
    auto di = conts.find(feature);
    if (di != conts.end()) return cont_sigma(di->second);
    // LLM filler scores share one distribution.
    std::vector<double> values(llm_filler_probs().size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
    return discrete_sigma(llm_filler_probs(), values);
}

std::vector<std::pair<std::string, double>> planted_importance(const GeneratorConfig& config) {
    std::vector<std::pair<std::string, double>> shares;
    double total = 0.0;
    for (const auto& [name, w] : config.signal_weights) {
        double s = std::abs(w) * generated_feature_stddev(name);
        shares.push_back({name, s});
        total += s;
    }
    if (total <= 0.0) return shares;
    for (auto& [name, s] : shares) s /= total;
    std::stable_sort(shares.begin(), shares.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return shares;
}

namespace {

void validate_config(const GeneratorConfig& c, const FeatureSchema& schema) {
    if (c.n_records < 1) throw GeneratorError("n_records must be >= 1");
    if (c.positive_rate <= 0.0 || c.positive_rate >= 1.0)
        throw GeneratorError("positive_rate must be in (0,1)");
    if (c.noise_sigma < 0.0) throw GeneratorError("noise_sigma must be >= 0");
    if (c.filler_tokens < 0) throw GeneratorError("filler_tokens must be >= 0");
    const auto* cat = schema.find("category_list");
    if (c.category_phrases.size() != cat->levels.size())
        throw GeneratorError("category_phrases must have one entry per category level");
    double prev = 0.0;
    for (const char* lab : kFundingClassLabels) {
        auto it = c.class_success_probs.find(lab);
        if (it == c.class_success_probs.end())
            throw GeneratorError(std::string("class_success_probs missing class: ") + lab);
        if (it->second < 0.0 || it->second > 1.0)
            throw GeneratorError("class probabilities must be within [0,1]");
        if (it->second < prev)
            throw GeneratorError("class_success_probs must be monotone non-decreasing");
        prev = it->second;
    }
    for (const auto& [name, w] : c.signal_weights) {
        (void)w;
        if (!schema.find(name))
            throw GeneratorError("signal weight references unknown feature: " + name);
    }
}

}  // namespace

Dataset generate_dataset(const GeneratorConfig& config) {
    return generate_dataset(config, nullptr);
}

Dataset generate_dataset(const GeneratorConfig& config, GroundTruth* gt) {
    FeatureSchema schema = default_schema();
    validate_config(config, schema);
    const int n = config.n_records;

    Dataset ds;
    ds.schema = schema;
    ds.records.resize(static_cast<std::size_t>(n));

    const auto& cats = categorical_probs_table();
    const auto& bools = boolean_probs_table();
    const auto& conts = continuous_dist_table();

    std::vector<double> logf0(static_cast<std::size_t>(n));
    int id_width = static_cast<int>(std::to_string(n).size());

    // Pass A: features, noise and description, one substream per record so
    // generation is order-deterministic (parallel blocks would agree).
    for (int i = 0; i < n; ++i) {
        auto& rec = ds.records[static_cast<std::size_t>(i)];
        std::string num = std::to_string(i + 1);
        rec.id = "S" + std::string(static_cast<std::size_t>(id_width) - num.size(), '0') + num;
        Rng rng(derive_seed(config.seed, "record", static_cast<std::uint64_t>(i)));

        for (const auto& f : schema.features) {
            switch (f.branch) {
                case Branch::categorical: {
                    auto it = cats.find(f.name);
                    const auto& probs = it != cats.end() ? it->second : llm_filler_probs();
                    rec.values[f.name] = rng.categorical(probs);
                    break;
                }
                case Branch::boolean_:
                    rec.values[f.name] = rng.bernoulli(bools.at(f.name)) ? 1.0 : 0.0;
                    break;
                case Branch::continuous:
                    rec.values[f.name] = draw_continuous(rng, conts.at(f.name));
                    break;
                case Branch::textual:
                    break;  // written below, after all values exist
            }
        }

        double signal = config.base_level;
        for (const auto& f : schema.features) {
            auto w = config.signal_weights.find(f.name);
            if (w != config.signal_weights.end())
                signal += w->second * rec.values.at(f.name);
        }
        logf0[static_cast<std::size_t>(i)] = signal + rng.normal(0.0, 1.0) * config.noise_sigma;

        rec.raw_text["description"] = make_description(schema, rec, config, rng);
    }

    // Calibrate a shared intercept shift so the expected positive rate matches.
    std::vector<double> probs_by_class(kFundingClassLabels.size());
    for (std::size_t c = 0; c < kFundingClassLabels.size(); ++c)
        probs_by_class[c] = config.class_success_probs.at(kFundingClassLabels[c]);
    auto mean_prob = [&](double shift) {
        double acc = 0.0;
        for (double lf : logf0)
            acc += probs_by_class[static_cast<std::size_t>(
                funding_class_index(std::pow(10.0, lf + shift)))];
        return acc / n;
    };
    double lo = -8.0, hi = 8.0;
    if (mean_prob(lo) > config.positive_rate || mean_prob(hi) < config.positive_rate)
        throw GeneratorError("positive_rate target unsatisfiable for this signal");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mean_prob(mid) >= config.positive_rate)
            hi = mid;
        else
            lo = mid;
    }
    const double shift = hi;

    std::vector<double> success_prob(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& rec = ds.records[static_cast<std::size_t>(i)];
        double funding = std::pow(10.0, logf0[static_cast<std::size_t>(i)] + shift);
        success_prob[static_cast<std::size_t>(i)] =
            probs_by_class[static_cast<std::size_t>(funding_class_index(funding))];
        ds.labels[rec.id].funding = funding;
    }

    // Pass B: success labels, rejection-adjusted toward the target rate, then
    // outcome fields consistent with the labels.
    std::vector<bool> success(static_cast<std::size_t>(n));
    double realized = 0.0;
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < 50 && !ok; ++attempt) {
        Rng rng(derive_seed(config.seed, "success", attempt));
        int pos = 0;
        for (int i = 0; i < n; ++i) {
            success[static_cast<std::size_t>(i)] =
                rng.bernoulli(success_prob[static_cast<std::size_t>(i)]);
            pos += success[static_cast<std::size_t>(i)] ? 1 : 0;
        }
        realized = static_cast<double>(pos) / n;
        if (std::abs(realized - config.positive_rate) <= 0.007) {
            ok = true;
            // Outcomes from the same attempt stream, in record order.
            for (int i = 0; i < n; ++i) {
                auto& rec = ds.records[static_cast<std::size_t>(i)];
                double funding = ds.labels.at(rec.id).funding;
                if (success[static_cast<std::size_t>(i)]) {
                    rec.total_raised = funding;
                    rec.ipo_valuation =
                        std::pow(10.0, rng.uniform(std::log10(6e8), std::log10(5e9)));
                } else {
                    rec.total_raised = std::min(std::max(funding, 1e5), 4e6);
                }
            }
        }
    }
    if (!ok)
        throw GeneratorError("could not hit positive_rate within +/-0.7pp after 50 redraws");
    for (int i = 0; i < n; ++i)
        ds.labels[ds.records[static_cast<std::size_t>(i)].id].success =
            success[static_cast<std::size_t>(i)];

    if (gt) {
        gt->base_level = config.base_level;
        gt->calibration_shift = shift;
        gt->signal_weights = config.signal_weights;
        gt->class_success_probs = config.class_success_probs;
        for (const auto& [name, w] : config.signal_weights)
            if (w != 0.0) gt->feature_stddev[name] = generated_feature_stddev(name);
        gt->planted_importance = planted_importance(config);
        gt->seed = config.seed;
        gt->n_records = n;
        gt->positive_rate_target = config.positive_rate;
        gt->positive_rate_realized = realized;
    }
    return ds;
}

}  // namespace fundcast
