#pragma once

#include <cstdint>
#include <string_view>

namespace ctxpress {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a per-document random stream: mixes the run seed with the doc id.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view doc_id) {
    return splitmix64(seed ^ fnv1a64(doc_id));
}

}  // namespace ctxpress
