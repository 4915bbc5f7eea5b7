#pragma once

#include <memory>
#include <string>
#include <vector>

namespace fundcast {

// Text -> fixed-width real vector. Implementations must be deterministic:
// identical text yields identical vectors.
class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    virtual int dim() const = 0;
    virtual std::vector<double> embed(const std::string& text) const = 0;
};

// Offline mock: hashed bag-of-tokens with hash-bit signs, L2-normalized.
// Lowercase [a-z0-9]+ tokenization; empty text -> zero vector.
class HashedEmbeddingProvider final : public EmbeddingProvider {
  public:
    explicit HashedEmbeddingProvider(int dim = 64);
    std::string id() const override;
    int dim() const override;
    std::vector<double> embed(const std::string& text) const override;

  private:
    int dim_;
};

// Embedding-free variant (width-0 block); the Table-8-style ablation arm.
class NoEmbeddingProvider final : public EmbeddingProvider {
  public:
    std::string id() const override { return "none"; }
    int dim() const override { return 0; }
    std::vector<double> embed(const std::string&) const override { return {}; }
};

// provider name: "mock" | "none". Throws EmbedError on anything else.
std::unique_ptr<EmbeddingProvider> make_embedding_provider(const std::string& name, int dim);
// Reconstruct from a serialized provider id (e.g. "mock-hash/v1/d64").
std::unique_ptr<EmbeddingProvider> embedding_provider_from_id(const std::string& id);

}  // namespace fundcast
