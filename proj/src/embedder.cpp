#include "ctxpress/embedder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "ctxpress/embedding_cache.hpp"
#include "ctxpress/errors.hpp"
#include "ctxpress/hashing.hpp"

namespace ctxpress {
namespace {

constexpr double kZeroNorm = 1e-12;

template <typename T>
Embedding normalize_impl(std::span<const T> v) {
    double sq = 0.0;
    for (const T x : v) sq += static_cast<double>(x) * static_cast<double>(x);
    const double norm = std::sqrt(sq);
    if (!(norm >= kZeroNorm) || !std::isfinite(norm)) throw ZeroVector();
    Embedding out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = static_cast<float>(static_cast<double>(v[i]) / norm);
    return out;
}

}  // namespace

Embedding l2_normalize(std::span<const double> v) { return normalize_impl(v); }
Embedding l2_normalize(std::span<const float> v) { return normalize_impl(v); }

double cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return std::clamp(dot, -1.0, 1.0);
}

Embedding document_centroid(std::span<const Embedding> embeddings) {
    if (embeddings.empty()) throw ZeroVector();
    const std::size_t d = embeddings.front().size();
    std::vector<double> mean(d, 0.0);
    for (const auto& e : embeddings) {
        if (e.size() != d) throw DimensionMismatch(d, e.size());
        for (std::size_t i = 0; i < d; ++i) mean[i] += e[i];
    }
    for (auto& m : mean) m /= static_cast<double>(embeddings.size());
    return l2_normalize(std::span<const double>(mean));
}

Embedding basis_vector(std::size_t key, std::size_t dimension) {
    Embedding e(dimension, 0.0f);
    if (dimension > 0) e[key % dimension] = 1.0f;
    return e;
}

bool is_stopword(std::string_view token) {
    static const std::unordered_set<std::string_view> kStopwords = {
        "a",     "an",    "and",   "are",  "as",    "at",    "be",    "been",  "but",
        "by",    "for",   "from",  "had",  "has",   "have",  "he",    "her",   "his",
        "i",     "if",    "in",    "into", "is",    "it",    "its",   "of",    "on",
        "or",    "our",   "she",   "so",   "than",  "that",  "the",   "their", "them",
        "then",  "there", "these", "they", "this",  "those", "to",    "was",   "we",
        "were",  "what",  "when",  "which", "while", "who",  "will",  "with",  "would",
        "you",   "your",  "not",   "no",   "can",   "do",    "does",  "did",   "also",
        "such",  "may",   "more",  "most", "other", "some",  "any",   "all",   "each"};
    return kStopwords.count(token) > 0;
}

EmbeddingProvider::EmbeddingProvider(const ProviderConfig& config, Tokenizer tokenizer)
    : config_(config), tokenizer_(std::move(tokenizer)) {
    if (config_.dimension == 0) throw ConfigError("embedding dimension must be positive");
    if (config_.batch_size == 0) config_.batch_size = 1;
    if (config_.parallelism == 0) config_.parallelism = 1;
    if (!config_.cache_dir.empty()) cache_ = std::make_unique<EmbeddingCache>(config_.cache_dir);
}

EmbeddingProvider::~EmbeddingProvider() = default;

std::vector<Embedding> EmbeddingProvider::embed_batch(const std::vector<std::string>& texts) const {
    const std::size_t d = config_.dimension;
    std::vector<std::string> truncated;
    truncated.reserve(texts.size());
    for (const auto& t : texts)
        truncated.emplace_back(tokenizer_.truncate(t, config_.max_input_tokens));

    std::vector<Embedding> out(texts.size());
    std::vector<std::string> keys(texts.size());
    std::vector<std::size_t> misses;
    const std::string fp = cache_ ? fingerprint() : std::string{};
    for (std::size_t i = 0; i < truncated.size(); ++i) {
        if (cache_) {
            keys[i] = EmbeddingCache::key(fp, d, truncated[i]);
            if (auto hit = cache_->get(keys[i], d)) {
                out[i] = std::move(*hit);
                continue;
            }
        }
        misses.push_back(i);
    }
    if (misses.empty()) return out;

    std::vector<std::string> pending;
    pending.reserve(misses.size());
    for (auto i : misses) pending.push_back(truncated[i]);
    const auto raw = encode(pending);
    if (raw.size() != pending.size())
        throw ProviderUnavailable("provider returned " + std::to_string(raw.size()) +
                                  " vectors for " + std::to_string(pending.size()) + " inputs");

    for (std::size_t m = 0; m < misses.size(); ++m) {
        const std::size_t i = misses[m];
        if (raw[m].size() != d) throw DimensionMismatch(d, raw[m].size());
        for (double x : raw[m])
            if (!std::isfinite(x)) throw ProviderUnavailable("provider returned a non-finite value");
        try {
            out[i] = l2_normalize(std::span<const double>(raw[m]));
        } catch (const ZeroVector&) {
            out[i] = basis_vector(i, d);
            continue;
        }
        if (cache_) cache_->put(keys[i], out[i]);
    }
    return out;
}

Embedding EmbeddingProvider::embed_one(std::string_view text) const {
    return embed_batch({std::string(text)}).front();
}

LocalHashProvider::LocalHashProvider(const ProviderConfig& config, Tokenizer tokenizer)
    : EmbeddingProvider(config, std::move(tokenizer)) {}

std::string LocalHashProvider::fingerprint() const {
    return config_.bigram_features ? "local-hash/uni+bi" : "local-hash/uni";
}

std::vector<std::string> LocalHashProvider::features(std::string_view text) const {
    std::vector<std::string> words;
    for (const auto& span : whitespace_punct_spans(text)) {
        if (span.punct) continue;
        std::string w(text.substr(span.begin, span.end - span.begin));
        for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!is_stopword(w)) words.push_back(std::move(w));
    }
    std::vector<std::string> feats;
    for (const auto& w : words) feats.push_back("u:" + w);
    if (config_.bigram_features)
        for (std::size_t i = 1; i < words.size(); ++i)
            feats.push_back("b:" + words[i - 1] + ' ' + words[i]);
    return feats;
}

std::vector<std::vector<double>> LocalHashProvider::encode(std::span<const std::string> texts) const {
    const std::size_t d = config_.dimension;
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        std::vector<double> v(d, 0.0);
        for (const auto& f : features(t)) {
            const std::uint64_t h = fnv1a64(f);
            const double sign = (splitmix64(h) >> 63) ? -1.0 : 1.0;
            v[h % d] += sign;
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config, Tokenizer tokenizer) {
    switch (config.kind) {
        case ProviderKind::LocalHash:
            return std::make_unique<LocalHashProvider>(config, std::move(tokenizer));
        case ProviderKind::RemoteHttp:
            return std::make_unique<RemoteHttpProvider>(config, std::move(tokenizer));
    }
    throw ConfigError("unknown provider kind");
}

}  // namespace ctxpress
