#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ctxpress/embedder.hpp"

namespace ctxpress {

/// Content-addressed on-disk vector store. One file per vector:
/// "CXEV", u32 dimension, u64 reserved, then dimension little-endian f32.
/// Writes go through a temp file and an atomic rename, so concurrent writers
/// of the same key leave one complete file behind.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::filesystem::path dir);

    static std::string key(std::string_view fingerprint, std::size_t dimension,
                           std::string_view text);

    std::optional<Embedding> get(const std::string& key, std::size_t dimension) const;
    void put(const std::string& key, const Embedding& vector) const;

    std::filesystem::path path_for(const std::string& key) const;

private:
    std::filesystem::path dir_;
};

/// Serialized form of one cache entry.
std::string encode_vector_file(const Embedding& vector);
/// Returns nullopt on bad magic, truncated payload, or a dimension other than `dimension`.
std::optional<Embedding> decode_vector_file(std::string_view bytes, std::size_t dimension);

}  // namespace ctxpress
