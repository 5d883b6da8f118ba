#include <algorithm>
#include <cstdlib>
#include <future>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ctxpress/embedder.hpp"
#include "ctxpress/errors.hpp"

namespace ctxpress {
namespace {

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("embedding endpoint must include a scheme: " + url);
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

RemoteHttpProvider::RemoteHttpProvider(const ProviderConfig& config, Tokenizer tokenizer)
    : EmbeddingProvider(config, std::move(tokenizer)) {
    if (config_.endpoint.empty()) throw ConfigError("remote-http provider needs an endpoint URL");
    std::tie(base_url_, path_) = split_endpoint(config_.endpoint);
}

std::string RemoteHttpProvider::fingerprint() const { return "remote-http@" + config_.endpoint; }

std::vector<std::vector<double>> RemoteHttpProvider::post_batch(
    std::span<const std::string> texts) const {
    nlohmann::json body;
    body["inputs"] = std::vector<std::string>(texts.begin(), texts.end());
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error = "no attempt made";
    auto backoff = config_.initial_backoff;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(base_url_);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP status " + std::to_string(res->status);
            if (retryable(res->status)) continue;
            break;
        }
        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("vectors") || !parsed["vectors"].is_array()) {
            last_error = "malformed response body";
            continue;
        }
        std::vector<std::vector<double>> vectors;
        try {
            vectors = parsed["vectors"].get<std::vector<std::vector<double>>>();
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("malformed vectors: ") + e.what();
            continue;
        }
        if (vectors.size() != texts.size()) {
            last_error = "response has " + std::to_string(vectors.size()) + " vectors for " +
                         std::to_string(texts.size()) + " inputs";
            continue;
        }
        for (const auto& v : vectors)
            if (v.size() != config_.dimension) throw DimensionMismatch(config_.dimension, v.size());
        return vectors;
    }
    throw ProviderUnavailable("embedding endpoint " + config_.endpoint + " failed: " + last_error);
}

std::vector<std::vector<double>> RemoteHttpProvider::encode(std::span<const std::string> texts) const {
    const std::size_t batch = config_.batch_size;
    const std::size_t n_batches = (texts.size() + batch - 1) / batch;
    std::vector<std::vector<std::vector<double>>> results(n_batches);

    // Waves of at most `parallelism` concurrent requests; each batch writes
    // its own slot so the output keeps input order.
    for (std::size_t wave = 0; wave < n_batches; wave += config_.parallelism) {
        const std::size_t wave_end = std::min(n_batches, wave + config_.parallelism);
        std::vector<std::future<std::vector<std::vector<double>>>> inflight;
        for (std::size_t b = wave; b < wave_end; ++b) {
            const auto first = b * batch;
            const auto count = std::min(batch, texts.size() - first);
            inflight.push_back(std::async(std::launch::async, [this, texts, first, count] {
                return post_batch(texts.subspan(first, count));
            }));
        }
        for (std::size_t b = wave; b < wave_end; ++b) results[b] = inflight[b - wave].get();
    }

    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (auto& r : results)
        for (auto& v : r) out.push_back(std::move(v));
    return out;
}

}  // namespace ctxpress
