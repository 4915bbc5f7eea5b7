#include "fundcast/embedding.hpp"

#include <cctype>
#include <cmath>

#include "fundcast/errors.hpp"
#include "fundcast/fnv.hpp"

namespace fundcast {

HashedEmbeddingProvider::HashedEmbeddingProvider(int dim) : dim_(dim) {
    if (dim < 1) throw EmbedError("embedding dim must be >= 1");
}

std::string HashedEmbeddingProvider::id() const { return "mock-hash/v1/d" + std::to_string(dim_); }

int HashedEmbeddingProvider::dim() const { return dim_; }

std::vector<double> HashedEmbeddingProvider::embed(const std::string& text) const {
    std::vector<double> v(static_cast<std::size_t>(dim_), 0.0);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        std::uint64_t h = fnv1a64(token);
        std::size_t idx = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim_));
        double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
        v[idx] += sign;
        token.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c))
            token += static_cast<char>(std::tolower(c));
        else
            flush();
    }
    flush();
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 > 0.0) {
        double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
    }
    return v;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const std::string& name, int dim) {
    if (name == "mock") return std::make_unique<HashedEmbeddingProvider>(dim);
    if (name == "none") return std::make_unique<NoEmbeddingProvider>();
    throw EmbedError("unknown embedding provider: " + name);
}

std::unique_ptr<EmbeddingProvider> embedding_provider_from_id(const std::string& id) {
    if (id == "none") return std::make_unique<NoEmbeddingProvider>();
    const std::string prefix = "mock-hash/v1/d";
    if (id.rfind(prefix, 0) == 0) {
        int dim = std::stoi(id.substr(prefix.size()));
        return std::make_unique<HashedEmbeddingProvider>(dim);
    }
    throw EmbedError("unknown embedding provider id: " + id);
}

}  // namespace fundcast
