#include "fundcast/record.hpp"

#include <cmath>
#include <set>

#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"

namespace fundcast {

namespace {
constexpr double kSuccessBar = 500e6;
constexpr double kUnsuccessfulLo = 1e5;
constexpr double kUnsuccessfulHi = 4e6;

std::uint64_t mix_double(std::uint64_t h, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    __builtin_memcpy(&bits, &v, sizeof(bits));
    return fnv1a64_mix(h, bits);
}
}  // namespace

bool Dataset::fully_labeled() const {
    for (const auto& r : records)
        if (!labels.count(r.id)) return false;
    return true;
}

double Dataset::success_rate() const {
    if (labels.empty()) return 0.0;
    std::size_t pos = 0;
    for (const auto& [id, lab] : labels) pos += lab.success ? 1 : 0;
    return static_cast<double>(pos) / static_cast<double>(labels.size());
}

bool label_success(std::optional<double> total_raised, std::optional<double> ipo_valuation,
                   std::optional<double> acquisition_price) {
    if (!total_raised && !ipo_valuation && !acquisition_price)
        throw MissingOutcome("label_success: all outcome fields absent");
    auto over = [](const std::optional<double>& v) { return v && *v > kSuccessBar; };
    return over(total_raised) || over(ipo_valuation) || over(acquisition_price);
}

std::vector<Violation> validate_record(const FounderRecord& record, const FeatureSchema& schema) {
    std::vector<Violation> out;
    for (const auto& f : schema.features) {
        auto it = record.values.find(f.name);
        if (it == record.values.end()) continue;  // absent is allowed; encoding imputes
        double v = it->second;
        if (!std::isfinite(v)) {
            out.push_back({record.id, "NonFinite", f.name, "value is not finite"});
            continue;
        }
        switch (f.branch) {
            case Branch::categorical:
                if (!f.is_level(v))
                    out.push_back({record.id, "OutOfRange", f.name,
                                   "value " + std::to_string(v) + " is not a declared level"});
                break;
            case Branch::boolean_:
                if (v != 0.0 && v != 1.0)
                    out.push_back({record.id, "NotBoolean", f.name, "boolean must be 0 or 1"});
                break;
            case Branch::continuous:
                break;  // finite already checked
            case Branch::textual:
                break;  // text lives in raw_text, a numeric value here is ignored
        }
    }
    auto check_currency = [&](const std::optional<double>& v, const char* name) {
        if (v && (!std::isfinite(*v) || *v < 0.0))
            out.push_back({record.id, "NegativeCurrency", name, "currency must be >= 0"});
    };
    check_currency(record.total_raised, "total_raised");
    check_currency(record.ipo_valuation, "ipo_valuation");
    check_currency(record.acquisition_price, "acquisition_price");
    return out;
}

std::vector<Violation> validate_dataset(const Dataset& dataset) {
    std::vector<Violation> out;
    std::set<std::string> seen;
    for (const auto& r : dataset.records) {
        if (!seen.insert(r.id).second)
            out.push_back({r.id, "DuplicateId", "", "record id not unique"});
        auto rec = validate_record(r, dataset.schema);
        out.insert(out.end(), rec.begin(), rec.end());
        auto lab = dataset.labels.find(r.id);
        if (lab != dataset.labels.end() && !lab->second.success) {
            if (r.total_raised &&
                (*r.total_raised < kUnsuccessfulLo || *r.total_raised > kUnsuccessfulHi))
                out.push_back({r.id, "UnsuccessfulFundingRange", "total_raised",
                               "unsuccessful class requires total_raised in [$100K, $4M]"});
        }
    }
    return out;
}

std::uint64_t dataset_fingerprint(const Dataset& dataset) {
    std::uint64_t h = fnv1a64(dataset.schema.hash());
    for (const auto& r : dataset.records) {
        h = fnv1a64(r.id, h);
        for (const auto& [k, v] : r.values) {
            h = fnv1a64(k, h);
            h = mix_double(h, v);
        }
        for (const auto& [k, t] : r.raw_text) {
            h = fnv1a64(k, h);
            h = fnv1a64(t, h);
        }
        for (const auto& opt : {r.total_raised, r.ipo_valuation, r.acquisition_price}) {
            h = fnv1a64_mix(h, opt.has_value() ? 1 : 0);
            if (opt) h = mix_double(h, *opt);
        }
        auto lab = dataset.labels.find(r.id);
        h = fnv1a64_mix(h, lab != dataset.labels.end() ? 1 : 0);
        if (lab != dataset.labels.end()) {
            h = mix_double(h, lab->second.funding);
            h = fnv1a64_mix(h, lab->second.success ? 1 : 0);
        }
    }
    return h;
}

const Labels& labels_for(const Dataset& dataset, const std::string& id) {
    auto it = dataset.labels.find(id);
    if (it == dataset.labels.end()) {
        throw MetricError("record '" + id + "' has no label entry");
    }
    return it->second;
}

}  // namespace fundcast
