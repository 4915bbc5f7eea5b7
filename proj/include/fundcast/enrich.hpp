#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fundcast/record.hpp"

namespace fundcast {

enum class EnrichStatus { ok, rejected, provider_error };

struct EnrichmentResult {
    std::string feature;
    std::string raw_response;
    std::optional<int> parsed_value;
    EnrichStatus status = EnrichStatus::provider_error;
    std::string note;  // rejection/error detail
};

struct ProviderReply {
    bool ok = false;
    std::string value;  // candidate value string when ok
    std::string error;  // failure detail when !ok
};

// Capability contract: (feature name, prompt text, allowed output domain) ->
// candidate value string. Implementations are total: they return a reply or
// signal failure through it, never throw for per-item trouble.
class EnrichmentProvider {
  public:
    virtual ~EnrichmentProvider() = default;
    virtual std::string provider_id() const = 0;
    virtual ProviderReply complete(const std::string& feature, const std::string& prompt,
                                   const std::vector<std::pair<std::string, int>>& domain) = 0;
};

// Pure offline provider: explicit "<feature>: <value>" marker phrases take
// priority; otherwise documented keyword rules (domain-cluster overlap for
// domain_expertise, keyword counting for 0-4 scales).
class MockEnrichmentProvider final : public EnrichmentProvider {
  public:
    std::string provider_id() const override { return "mock-rules/v1"; }
    ProviderReply complete(const std::string& feature, const std::string& prompt,
                           const std::vector<std::pair<std::string, int>>& domain) override;
};

// Interface stub for a real LLM endpoint. Reads configuration from the
// environment: FUNDCAST_LLM_ENDPOINT and FUNDCAST_LLM_API_KEY (values are
// never logged). Construction fails without them; calls report
// provider_error because no transport ships in this build.
class ExternalEnrichmentProvider final : public EnrichmentProvider {
  public:
    ExternalEnrichmentProvider();  // throws Error when env config is missing
    std::string provider_id() const override { return "external/v1"; }
    ProviderReply complete(const std::string& feature, const std::string& prompt,
                           const std::vector<std::pair<std::string, int>>& domain) override;

  private:
    std::string endpoint_;
    std::string api_key_;
};

std::unique_ptr<EnrichmentProvider> make_enrichment_provider(const std::string& name);

// Parse + domain-check a raw provider response for one feature. Accepts the
// declared integer or a (case-insensitive) level label; never clamps.
EnrichmentResult validate_enrichment(const FeatureDecl& feature, const std::string& raw_response);

// Enrich every llm_derived feature of one record. Prompt text comes from
// record.raw_text[feature] when present, else record.raw_text["description"].
// Provider failures retry up to 3 attempts, then surface as provider_error
// without aborting the batch. Structured values update only on ok.
std::map<std::string, EnrichmentResult> enrich_record(FounderRecord& record,
                                                      const FeatureSchema& schema,
                                                      EnrichmentProvider& provider);

// Append-only JSON-lines cache keyed by
// fnv64(feature \x1f prompt \x1f provider_id) as hex. Corrupt lines are
// skipped with a warning; hits bypass the provider entirely.
class EnrichmentCache {
  public:
    explicit EnrichmentCache(std::string path);
    std::optional<std::string> lookup(const std::string& key) const;
    void store(const std::string& key, const std::string& feature, const std::string& value);
    static std::string make_key(const std::string& feature, const std::string& prompt,
                                const std::string& provider_id);
    std::size_t size() const { return entries_.size(); }

  private:
    std::string path_;
    std::map<std::string, std::string> entries_;
};

std::map<std::string, EnrichmentResult> cached_enrich(FounderRecord& record,
                                                      const FeatureSchema& schema,
                                                      EnrichmentProvider& provider,
                                                      EnrichmentCache& cache);

struct EnrichSummary {
    int ok = 0;
    int rejected = 0;
    int provider_error = 0;
    int cache_hits = 0;
};

EnrichSummary enrich_dataset(Dataset& dataset, EnrichmentProvider& provider,
                             EnrichmentCache* cache);

}  // namespace fundcast
