#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxpress/segmenter.hpp"

namespace ctxpress {

/// Dense sentence or query vector. Stored vectors are unit-norm.
using Embedding = std::vector<float>;

/// Throws ZeroVector when the norm is below 1e-12.
Embedding l2_normalize(std::span<const double> v);
Embedding l2_normalize(std::span<const float> v);

/// Dot product accumulated in double. Throws DimensionMismatch.
double cosine(std::span<const float> a, std::span<const float> b);

/// Unit-norm arithmetic mean. Throws ZeroVector if the mean vanishes.
Embedding document_centroid(std::span<const Embedding> embeddings);

/// Deterministic unit basis vector e_{key mod d}.
Embedding basis_vector(std::size_t key, std::size_t dimension);

enum class ProviderKind { LocalHash, RemoteHttp };

inline constexpr const char* kApiKeyEnv = "CTXPRESS_EMBED_API_KEY";

struct ProviderConfig {
    ProviderKind kind = ProviderKind::LocalHash;
    std::size_t dimension = 256;
    std::size_t max_input_tokens = 512;
    std::size_t batch_size = 64;
    std::size_t parallelism = 1;
    // local-hash
    bool bigram_features = true;
    // remote-http
    std::string endpoint;
    std::string api_key_env = kApiKeyEnv;
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{200};
    std::chrono::seconds timeout{30};
    // empty disables the persistent cache
    std::string cache_dir;
};

class EmbeddingCache;

class EmbeddingProvider {
public:
    EmbeddingProvider(const ProviderConfig& config, Tokenizer tokenizer);
    virtual ~EmbeddingProvider();

    /// One unit-norm vector per input, order-aligned. Inputs are cut to
    /// max_input_tokens first. A text whose raw vector is zero gets
    /// basis_vector(position) and is never cached.
    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const;

    Embedding embed_one(std::string_view text) const;

    std::size_t dimension() const noexcept { return config_.dimension; }
    const ProviderConfig& config() const noexcept { return config_; }

    /// Identifies the vector space for cache keying.
    virtual std::string fingerprint() const = 0;

protected:
    /// Raw (unnormalized) vectors for already-truncated texts.
    virtual std::vector<std::vector<double>> encode(std::span<const std::string> texts) const = 0;

    ProviderConfig config_;

private:
    Tokenizer tokenizer_;
    std::unique_ptr<EmbeddingCache> cache_;
};

/// Offline provider: signed feature hashing of lowercased unigrams (and,
/// optionally, adjacent bigrams) after punctuation and stopword removal.
class LocalHashProvider final : public EmbeddingProvider {
public:
    explicit LocalHashProvider(const ProviderConfig& config, Tokenizer tokenizer = Tokenizer{});

    std::string fingerprint() const override;

    /// Feature multiset for a text, exposed for tests.
    std::vector<std::string> features(std::string_view text) const;

protected:
    std::vector<std::vector<double>> encode(std::span<const std::string> texts) const override;
};

/// HTTP provider: POST {"inputs": [...]} -> {"vectors": [[...]]}, bearer
/// credential from the configured environment variable.
class RemoteHttpProvider final : public EmbeddingProvider {
public:
    explicit RemoteHttpProvider(const ProviderConfig& config, Tokenizer tokenizer = Tokenizer{});

    std::string fingerprint() const override;

protected:
    std::vector<std::vector<double>> encode(std::span<const std::string> texts) const override;

private:
    std::vector<std::vector<double>> post_batch(std::span<const std::string> texts) const;

    std::string base_url_;
    std::string path_;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config,
                                                 Tokenizer tokenizer = Tokenizer{});

bool is_stopword(std::string_view lowercase_token);

}  // namespace ctxpress
