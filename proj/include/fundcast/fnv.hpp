#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fundcast {

// FNV-1a 64-bit. Used for content fingerprints, cache keys and seed
// derivation; stable across platforms by construction.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a64_mix(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= kFnvPrime;
    }
    return h;
}

std::string hex64(std::uint64_t v);

// Deterministic substream derivation: one master seed, distinct tags.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
    return fnv1a64_mix(fnv1a64(tag), master);
}
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
    return fnv1a64_mix(derive_seed(master, tag), index);
}

std::uint64_t fingerprint_file(const std::string& path);

}  // namespace fundcast
