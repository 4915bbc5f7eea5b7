#include "fundcast/schema.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"

namespace fundcast {

std::string branch_name(Branch b) {
    switch (b) {
        case Branch::categorical: return "categorical";
        case Branch::textual: return "textual";
        case Branch::continuous: return "continuous";
        case Branch::boolean_: return "boolean";
    }
    return "?";
}

Branch branch_from_name(const std::string& s) {
    if (s == "categorical") return Branch::categorical;
    if (s == "textual") return Branch::textual;
    if (s == "continuous") return Branch::continuous;
    if (s == "boolean") return Branch::boolean_;
    throw SchemaError("unknown branch: " + s);
}

std::string origin_name(Origin o) {
    return o == Origin::deterministic ? "deterministic" : "llm_derived";
}

Origin origin_from_name(const std::string& s) {
    if (s == "deterministic") return Origin::deterministic;
    if (s == "llm_derived") return Origin::llm_derived;
    throw SchemaError("unknown origin: " + s);
}

namespace {
std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}
}  // namespace

bool FeatureDecl::is_level(double v) const {
    if (!std::isfinite(v)) return false;
    double r = std::round(v);
    if (r != v) return false;
    int iv = static_cast<int>(r);
    return iv >= 0 && iv < static_cast<int>(levels.size());
}

std::optional<int> FeatureDecl::level_of_label(const std::string& label) const {
    std::string needle = lower(label);
    for (const auto& [lab, val] : levels)
        if (lower(lab) == needle) return val;
    return std::nullopt;
}

const FeatureDecl* FeatureSchema::find(const std::string& name) const {
    for (const auto& f : features)
        if (f.name == name) return &f;
    return nullptr;
}

std::vector<const FeatureDecl*> FeatureSchema::by_branch(Branch b) const {
    std::vector<const FeatureDecl*> out;
    for (const auto& f : features)
        if (f.branch == b) out.push_back(&f);
    return out;
}

std::vector<const FeatureDecl*> FeatureSchema::by_origin(Origin o) const {
    std::vector<const FeatureDecl*> out;
    for (const auto& f : features)
        if (f.origin == o) out.push_back(&f);
    return out;
}

void FeatureSchema::validate() const {
    std::set<std::string> seen;
    for (const auto& f : features) {
        if (f.name.empty()) throw SchemaError("feature with empty name");
        if (!seen.insert(f.name).second) throw SchemaError("duplicate feature name: " + f.name);
        if (f.branch == Branch::categorical) {
            if (f.levels.size() < 2)
                throw SchemaError("categorical feature needs >= 2 levels: " + f.name);
            for (std::size_t i = 0; i < f.levels.size(); ++i)
                if (f.levels[i].second != static_cast<int>(i))
                    throw SchemaError("levels must be consecutive integers from 0: " + f.name);
        } else if (!f.levels.empty()) {
            throw SchemaError("non-categorical feature declares levels: " + f.name);
        }
    }
}

nlohmann::json FeatureSchema::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : features) {
        nlohmann::json jf;
        jf["name"] = f.name;
        jf["branch"] = branch_name(f.branch);
        jf["origin"] = origin_name(f.origin);
        if (f.branch == Branch::categorical) {
            nlohmann::json lv = nlohmann::json::array();
            for (const auto& [lab, val] : f.levels) lv.push_back({lab, val});
            jf["levels"] = lv;
        }
        arr.push_back(jf);
    }
    return nlohmann::json{{"features", arr}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
    FeatureSchema s;
    if (!j.contains("features") || !j["features"].is_array())
        throw SchemaError("schema JSON missing 'features' array");
    for (const auto& jf : j["features"]) {
        FeatureDecl f;
        f.name = jf.at("name").get<std::string>();
        f.branch = branch_from_name(jf.at("branch").get<std::string>());
        f.origin = origin_from_name(jf.at("origin").get<std::string>());
        if (jf.contains("levels"))
            for (const auto& lv : jf["levels"])
                f.levels.emplace_back(lv.at(0).get<std::string>(), lv.at(1).get<int>());
        s.features.push_back(std::move(f));
    }
    s.validate();
    return s;
}

FeatureSchema FeatureSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open schema file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("schema file is not valid JSON: " + path + ": " + e.what());
    }
    return from_json(j);
}

void FeatureSchema::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write schema file: " + path);
    out << to_json().dump(2) << "\n";
}

std::string FeatureSchema::hash() const { return hex64(fnv1a64(to_json().dump())); }

namespace {

FeatureDecl categorical(std::string name, Origin origin,
                        std::vector<std::pair<std::string, int>> levels) {
    FeatureDecl f;
    f.name = std::move(name);
    f.branch = Branch::categorical;
    f.origin = origin;
    f.levels = std::move(levels);
    return f;
}

FeatureDecl scale5(std::string name, Origin origin) {
    return categorical(std::move(name), origin,
                       {{"0", 0}, {"1", 1}, {"2", 2}, {"3", 3}, {"4", 4}});
}

FeatureDecl plain(std::string name, Branch branch, Origin origin) {
    FeatureDecl f;
    f.name = std::move(name);
    f.branch = branch;
    f.origin = origin;
    return f;
}

}  // namespace

FeatureSchema default_schema() {
    FeatureSchema s;
    auto det = Origin::deterministic;
    auto llm = Origin::llm_derived;

    // --- categorical, deterministic (2)
    s.features.push_back(categorical("category_list", det,
                                     {{"fintech", 0},
                                      {"healthtech", 1},
                                      {"devtools", 2},
                                      {"ai_ml", 3},
                                      {"ecommerce", 4},
                                      {"cybersecurity", 5},
                                      {"logistics", 6},
                                      {"edtech", 7},
                                      {"climate", 8},
                                      {"biotech", 9}}));
    s.features.push_back(categorical("education_level", det,
                                     {{"Associate Degree or less", 0},
                                      {"Bachelor's Degree", 1},
                                      {"Master's Degree", 2},
                                      {"Doctoral Degree or more", 3}}));

    // --- categorical, LLM-derived (25)
    s.features.push_back(categorical("domain_expertise", llm,
                                     {{"No alignment", 0},
                                      {"Weak Alignment", 1},
                                      {"Moderate Alignment", 2},
                                      {"Strong Alignment", 3}}));
    s.features.push_back(scale5("skill_relevance", llm));
    for (const char* name :
         {"market_size_score", "novelty_score", "execution_signal", "technical_depth",
          "competitive_moat", "gtm_clarity", "team_completeness", "vision_ambition",
          "problem_urgency", "customer_validation", "network_strength", "fundraising_readiness",
          "product_maturity", "regulatory_risk", "talent_density", "market_timing",
          "traction_signal", "capital_efficiency", "founder_commitment", "storytelling_quality",
          "partnership_leverage", "defensibility", "expansion_potential"})
        s.features.push_back(scale5(name, llm));

    // --- continuous, deterministic (15)
    for (const char* name :
         {"number_of_founders", "previous_startups", "years_experience", "team_size",
          "advisor_count", "patent_count", "media_mentions", "months_since_founding",
          "competitor_count", "burn_rate_monthly", "runway_months", "customer_count",
          "mrr_thousands", "github_stars", "conference_talks"})
        s.features.push_back(plain(name, Branch::continuous, det));

    // --- boolean, deterministic (20)
    for (const char* name :
         {"has_technical_cofounder", "prior_exit", "is_b2b", "is_remote_first",
          "has_paying_customers", "accelerator_alumni", "has_phd_on_team",
          "raised_friends_family", "has_patent_pending", "is_deep_tech", "has_advisory_board",
          "repeat_founder_team", "has_press_coverage", "international_presence", "has_mvp",
          "revenue_positive", "has_enterprise_pilot", "university_spinout", "has_open_source",
          "family_business_background"})
        s.features.push_back(plain(name, Branch::boolean_, det));

    // --- textual, deterministic (1)
    s.features.push_back(plain("description", Branch::textual, det));

    s.validate();
    return s;
}

}  // namespace fundcast
