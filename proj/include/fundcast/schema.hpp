#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fundcast {

enum class Branch { categorical, textual, continuous, boolean_ };
enum class Origin { deterministic, llm_derived };

std::string branch_name(Branch b);
Branch branch_from_name(const std::string& s);
std::string origin_name(Origin o);
Origin origin_from_name(const std::string& s);

struct FeatureDecl {
    std::string name;
    Branch branch = Branch::continuous;
    Origin origin = Origin::deterministic;
    // Categorical only: ordered (label, integer) pairs, consecutive from 0.
    std::vector<std::pair<std::string, int>> levels;

    bool is_level(double v) const;
    std::optional<int> level_of_label(const std::string& label) const;  // case-insensitive
};

struct FeatureSchema {
    std::vector<FeatureDecl> features;

    const FeatureDecl* find(const std::string& name) const;
    std::vector<const FeatureDecl*> by_branch(Branch b) const;
    std::vector<const FeatureDecl*> by_origin(Origin o) const;

    // Throws SchemaError on violated invariants (duplicate names, bad levels).
    void validate() const;

    nlohmann::json to_json() const;
    static FeatureSchema from_json(const nlohmann::json& j);
    static FeatureSchema load(const std::string& path);
    void save(const std::string& path) const;

    // FNV-1a over the canonical JSON dump, as a hex string.
    std::string hash() const;

    // Copy with the features failing `keep` removed.
    template <typename Pred>
    FeatureSchema filtered(Pred keep) const {
        FeatureSchema out;
        for (const auto& f : features)
            if (keep(f)) out.features.push_back(f);
        return out;
    }
};

// The built-in 63-feature schema: 38 deterministic + 25 LLM-derived across
// the four branches (27 categorical, 15 continuous, 20 boolean, 1 textual).
FeatureSchema default_schema();

}  // namespace fundcast
