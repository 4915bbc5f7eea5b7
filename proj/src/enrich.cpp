#include "fundcast/enrich.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"
#include <json.hpp>

namespace fundcast {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> tokens_of(const std::string& text) {
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            toks.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) toks.push_back(cur);
    return toks;
}

std::string spaced_name(const std::string& feature) {
    std::string s = feature;
    std::replace(s.begin(), s.end(), '_', ' ');
    return s;
}

// Explicit marker phrase: "<feature name with spaces>: <value>" terminated by
// '.' or ';'. Returns the value text when present.
std::optional<std::string> parse_marker(const std::string& feature, const std::string& prompt) {
    std::string hay = lower(prompt);
    std::string needle = spaced_name(feature) + ":";
    std::size_t pos = hay.find(needle);
    if (pos == std::string::npos) return std::nullopt;
    std::size_t start = pos + needle.size();
    std::size_t end = hay.find_first_of(".;", start);
    if (end == std::string::npos) end = hay.size();
    std::string value = trim(hay.substr(start, end - start));
    if (value.empty()) return std::nullopt;
    return value;
}

// Topic clusters used to judge founder-background / venture-domain overlap.
const std::vector<std::vector<std::string>>& domain_clusters() {
    static const std::vector<std::vector<std::string>> kClusters = {
        {"oncology", "cancer", "diagnostics", "clinical", "therapeutic", "biotech", "pharma",
         "protein", "drug"},
        {"health", "medical", "care", "hospital", "clinic", "patient", "telehealth"},
        {"payments", "banking", "fintech", "ledger", "settlement", "lending", "credit",
         "treasury"},
        {"security", "encryption", "firewall", "cyber", "threat", "phishing", "malware"},
        {"logistics", "freight", "shipping", "supply", "warehouse", "fleet", "delivery"},
        {"education", "learning", "training", "edtech", "curriculum", "tutoring", "teaching"},
        {"climate", "renewable", "solar", "carbon", "grid", "battery", "energy"},
        {"commerce", "retail", "storefront", "marketplace", "shopping", "merchandising"},
        {"developer", "devops", "tooling", "infrastructure", "api", "compiler", "kubernetes"},
        {"intelligence", "model", "analytics", "forecasting", "machine", "statistics",
         "data"},
        {"satellite", "aerospace", "imaging", "geospatial", "orbital"},
        {"restaurant", "hospitality", "catering", "culinary"},
    };
    return kClusters;
}

bool cluster_hit(const std::vector<std::string>& cluster, const std::set<std::string>& toks) {
    for (const auto& w : cluster)
        if (toks.count(w)) return true;
    return false;
}

// Alignment between the founder's background (text before the "startup"
// token) and the venture description (text after it). Clusters hit on both
// sides count as direct overlap.
std::string score_domain_expertise(const std::string& prompt) {
    std::vector<std::string> all = tokens_of(prompt);
    std::set<std::string> left, right;
    bool seen_split = false;
    for (const auto& t : all) {
        if (!seen_split && t == "startup") {
            seen_split = true;
            continue;
        }
        (seen_split ? right : left).insert(t);
    }
    if (!seen_split) right = left;

    int both = 0, either = 0;
    for (const auto& cluster : domain_clusters()) {
        bool l = cluster_hit(cluster, left);
        bool r = cluster_hit(cluster, right);
        if (l && r) ++both;
        if (l || r) ++either;
    }
    static const std::vector<std::string> kExperienceHints = {"phd", "yrs", "years", "decade",
                                                              "veteran", "professor"};
    bool experienced = false;
    std::set<std::string> allset(all.begin(), all.end());
    for (const auto& h : kExperienceHints)
        if (allset.count(h)) experienced = true;

    if (both >= 2) return "Strong Alignment";
    if (both == 1) return experienced ? "Strong Alignment" : "Moderate Alignment";
    if (either >= 1) return "Weak Alignment";
    return "No alignment";
}

// Generic 0..4 score: count distinct achievement keywords, capped at 4.
int score_scale(const std::string& prompt) {
    static const std::vector<std::string> kSignals = {
        "expert",   "senior", "lead",      "built",  "shipped", "launched",
        "scaled",   "patent", "published", "award",  "funded",  "profitable",
        "acquired", "growth", "flagship",  "proven",
    };
    std::vector<std::string> toks = tokens_of(prompt);
    std::set<std::string> set(toks.begin(), toks.end());
    int hits = 0;
    for (const auto& s : kSignals)
        if (set.count(s)) ++hits;
    return std::min(hits, 4);
}

}  // namespace

ProviderReply MockEnrichmentProvider::complete(const std::string& feature,
                                               const std::string& prompt,
                                               const std::vector<std::pair<std::string, int>>& domain) {
    (void)domain;
    if (auto marker = parse_marker(feature, prompt)) {
        return {true, *marker, ""};
    }
    if (feature == "domain_expertise") {
        return {true, score_domain_expertise(prompt), ""};
    }
    return {true, std::to_string(score_scale(prompt)), ""};
}

ExternalEnrichmentProvider::ExternalEnrichmentProvider() {
    const char* endpoint = std::getenv("FUNDCAST_LLM_ENDPOINT");
    const char* key = std::getenv("FUNDCAST_LLM_API_KEY");
    if (endpoint == nullptr || *endpoint == '\0' || key == nullptr || *key == '\0') {
        throw Error(
            "external provider requires FUNDCAST_LLM_ENDPOINT and FUNDCAST_LLM_API_KEY "
            "in the environment");
    }
    endpoint_ = endpoint;
    api_key_ = key;
}

ProviderReply ExternalEnrichmentProvider::complete(const std::string& feature,
                                                   const std::string& prompt,
                                                   const std::vector<std::pair<std::string, int>>& domain) {
    (void)feature;
    (void)prompt;
    (void)domain;
    // No HTTP transport ships in this build; the configured endpoint/key are
    // intentionally kept out of the message.
    return {false, "", "external provider transport is not implemented in this build"};
}

std::unique_ptr<EnrichmentProvider> make_enrichment_provider(const std::string& name) {
    if (name == "mock") return std::make_unique<MockEnrichmentProvider>();
    if (name == "external") return std::make_unique<ExternalEnrichmentProvider>();
    throw ParamError("unknown enrichment provider '" + name + "' (expected mock or external)");
}

EnrichmentResult validate_enrichment(const FeatureDecl& feature, const std::string& raw_response) {
    EnrichmentResult res;
    res.feature = feature.name;
    res.raw_response = raw_response;
    std::string text = trim(raw_response);
    if (text.empty()) {
        res.status = EnrichStatus::rejected;
        res.note = "empty response";
        return res;
    }
    // Integer form first.
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size()) {
        if (value >= 0 && static_cast<std::size_t>(value) < feature.levels.size()) {
            res.parsed_value = value;
            res.status = EnrichStatus::ok;
        } else {
            res.status = EnrichStatus::rejected;
            res.note = "integer " + text + " outside declared domain [0, " +
                       std::to_string(feature.levels.size() - 1) + "]";
        }
        return res;
    }
    // Level-label form, case-insensitive.
    if (auto idx = feature.level_of_label(text)) {
        res.parsed_value = static_cast<int>(*idx);
        res.status = EnrichStatus::ok;
        return res;
    }
    res.status = EnrichStatus::rejected;
    res.note = "response does not match any declared level";
    return res;
}

namespace {

std::string prompt_for(const FounderRecord& record, const std::string& feature) {
    auto it = record.raw_text.find(feature);
    if (it != record.raw_text.end()) return it->second;
    auto desc = record.raw_text.find("description");
    if (desc != record.raw_text.end()) return desc->second;
    return "";
}

EnrichmentResult enrich_one(FounderRecord& record, const FeatureDecl& decl,
                            EnrichmentProvider& provider, EnrichmentCache* cache,
                            bool* was_cache_hit) {
    std::string prompt = prompt_for(record, decl.name);
    std::string key;
    if (cache != nullptr) {
        key = EnrichmentCache::make_key(decl.name, prompt, provider.provider_id());
        if (auto hit = cache->lookup(key)) {
            if (was_cache_hit != nullptr) *was_cache_hit = true;
            EnrichmentResult res = validate_enrichment(decl, *hit);
            if (res.status == EnrichStatus::ok) {
                record.values[decl.name] = static_cast<double>(*res.parsed_value);
            }
            return res;
        }
    }
    ProviderReply reply;
    for (int attempt = 0; attempt < 3; ++attempt) {
        reply = provider.complete(decl.name, prompt, decl.levels);
        if (reply.ok) break;
    }
    if (!reply.ok) {
        EnrichmentResult res;
        res.feature = decl.name;
        res.status = EnrichStatus::provider_error;
        res.note = reply.error;
        return res;
    }
    if (cache != nullptr) cache->store(key, decl.name, reply.value);
    EnrichmentResult res = validate_enrichment(decl, reply.value);
    if (res.status == EnrichStatus::ok) {
        record.values[decl.name] = static_cast<double>(*res.parsed_value);
    }
    return res;
}

}  // namespace

std::map<std::string, EnrichmentResult> enrich_record(FounderRecord& record,
                                                      const FeatureSchema& schema,
                                                      EnrichmentProvider& provider) {
    std::map<std::string, EnrichmentResult> out;
    for (const auto& decl : schema.features) {
        if (decl.origin != Origin::llm_derived) continue;
        out[decl.name] = enrich_one(record, decl, provider, nullptr, nullptr);
    }
    return out;
}

EnrichmentCache::EnrichmentCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;  // absent cache file starts empty
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j.contains("value") ||
            !j["key"].is_string() || !j["value"].is_string()) {
            std::cerr << "warning: skipping corrupt cache line " << lineno << " in " << path_
                      << "\n";
            continue;
        }
        entries_[j["key"].get<std::string>()] = j["value"].get<std::string>();
    }
}

std::optional<std::string> EnrichmentCache::lookup(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EnrichmentCache::store(const std::string& key, const std::string& feature,
                            const std::string& value) {
    entries_[key] = value;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw Error("cannot append to enrichment cache at " + path_);
    json j;
    j["key"] = key;
    j["feature"] = feature;
    j["value"] = value;
    out << j.dump() << "\n";
}

std::string EnrichmentCache::make_key(const std::string& feature, const std::string& prompt,
                                      const std::string& provider_id) {
    std::string material = feature;
    material.push_back('\x1f');
    material += prompt;
    material.push_back('\x1f');
    material += provider_id;
    return hex64(fnv1a64(material));
}

std::map<std::string, EnrichmentResult> cached_enrich(FounderRecord& record,
                                                      const FeatureSchema& schema,
                                                      EnrichmentProvider& provider,
                                                      EnrichmentCache& cache) {
    std::map<std::string, EnrichmentResult> out;
    for (const auto& decl : schema.features) {
        if (decl.origin != Origin::llm_derived) continue;
        bool hit = false;
        out[decl.name] = enrich_one(record, decl, provider, &cache, &hit);
    }
    return out;
}

EnrichSummary enrich_dataset(Dataset& dataset, EnrichmentProvider& provider,
                             EnrichmentCache* cache) {
    EnrichSummary summary;
    for (auto& record : dataset.records) {
        for (const auto& decl : dataset.schema.features) {
            if (decl.origin != Origin::llm_derived) continue;
            bool hit = false;
            EnrichmentResult res = enrich_one(record, decl, provider, cache, &hit);
            if (hit) ++summary.cache_hits;
            switch (res.status) {
                case EnrichStatus::ok: ++summary.ok; break;
                case EnrichStatus::rejected: ++summary.rejected; break;
                case EnrichStatus::provider_error: ++summary.provider_error; break;
            }
        }
    }
    return summary;
}

}  // namespace fundcast
