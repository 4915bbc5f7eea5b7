#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fundcast/schema.hpp"

namespace fundcast {

struct FounderRecord {
    std::string id;
    // Free text per textual/enrichable feature name.
    std::map<std::string, std::string> raw_text;
    // Structured values per feature name; absent key = missing value.
    std::map<std::string, double> values;
    std::optional<double> total_raised;
    std::optional<double> ipo_valuation;
    std::optional<double> acquisition_price;
};

struct Labels {
    double funding = 0.0;
    bool success = false;
};

struct Dataset {
    FeatureSchema schema;
    std::vector<FounderRecord> records;
    std::map<std::string, Labels> labels;  // keyed by record id

    bool fully_labeled() const;
    double success_rate() const;  // over labeled records
};

// True iff any outcome clears $500M. Throws MissingOutcome if all absent.
bool label_success(std::optional<double> total_raised, std::optional<double> ipo_valuation,
                   std::optional<double> acquisition_price);

// Labels for one record id; throws MetricError when the id is unlabeled.
const Labels& labels_for(const Dataset& dataset, const std::string& id);

struct Violation {
    std::string record_id;
    std::string kind;     // OutOfRange | NonFinite | NotBoolean | NegativeCurrency | ...
    std::string feature;  // empty when not feature-specific
    std::string message;
};

// Feature-domain checks only (no labels involved).
std::vector<Violation> validate_record(const FounderRecord& record, const FeatureSchema& schema);

// Record checks plus dataset-level rules: unique ids, label pairs complete,
// unsuccessful-class total_raised within [$100K, $4M].
std::vector<Violation> validate_dataset(const Dataset& dataset);

// Order-insensitive content fingerprint (ids, values, text, outcomes, labels).
std::uint64_t dataset_fingerprint(const Dataset& dataset);

}  // namespace fundcast
