// Synthetic inputs shared by the unit and acceptance suites.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctxpress/embedder.hpp"
#include "ctxpress/graph_builder.hpp"
#include "ctxpress/segmenter.hpp"

namespace synth {

inline ctxpress::Embedding random_unit(std::mt19937_64& rng, std::size_t d) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(d);
    for (auto& x : v) x = g(rng);
    return ctxpress::l2_normalize(std::span<const double>(v));
}

inline std::vector<ctxpress::Embedding> random_units(std::mt19937_64& rng, std::size_t n,
                                                     std::size_t d) {
    std::vector<ctxpress::Embedding> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_unit(rng, d));
    return out;
}

// Points scattered around `clusters` random centers with the given noise.
inline std::vector<ctxpress::Embedding> clustered(std::mt19937_64& rng, std::size_t n,
                                                  std::size_t d, std::size_t clusters,
                                                  double noise) {
    std::vector<ctxpress::Embedding> centers;
    for (std::size_t c = 0; c < clusters; ++c) centers.push_back(random_unit(rng, d));
    std::normal_distribution<double> g(0.0, noise);
    std::uniform_int_distribution<std::size_t> pick(0, clusters - 1);
    std::vector<ctxpress::Embedding> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = centers[pick(rng)];
        std::vector<double> v(d);
        for (std::size_t j = 0; j < d; ++j) v[j] = c[j] + g(rng);
        out.push_back(ctxpress::l2_normalize(std::span<const double>(v)));
    }
    return out;
}

// Random spanning tree plus extra edges, weights drawn from [0.05, 1).
inline ctxpress::HybridGraph random_connected_graph(std::mt19937_64& rng, std::size_t n,
                                                    double extra_edge_prob) {
    std::uniform_real_distribution<double> w(0.05, 1.0), u(0.0, 1.0);
    std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
    std::vector<ctxpress::Edge> edges;
    auto add = [&](std::size_t a, std::size_t b) {
        if (a == b || has[a][b]) return;
        has[a][b] = has[b][a] = true;
        ctxpress::Edge e;
        e.i = std::min(a, b);
        e.j = std::max(a, b);
        e.w_sem = w(rng);
        e.lambda = e.w_sem;
        e.semantic = true;
        edges.push_back(e);
    };
    for (std::size_t v = 1; v < n; ++v) add(v, std::uniform_int_distribution<std::size_t>(0, v - 1)(rng));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (u(rng) < extra_edge_prob) add(a, b);
    return ctxpress::HybridGraph(n, std::move(edges));
}

// Unit-weight graph from an edge list.
inline ctxpress::HybridGraph graph_of(std::size_t n,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                      double lambda = 1.0) {
    std::vector<ctxpress::Edge> edges;
    for (auto [a, b] : pairs) {
        ctxpress::Edge e;
        e.i = std::min(a, b);
        e.j = std::max(a, b);
        e.w_sem = lambda;
        e.lambda = lambda;
        e.semantic = true;
        edges.push_back(e);
    }
    return ctxpress::HybridGraph(n, std::move(edges));
}

inline const std::vector<std::string>& lexicon() {
    static const std::vector<std::string> words = [] {
        std::vector<std::string> w;
        const char* syll[] = {"ka", "lo", "mi", "ra", "tu", "ve", "zo", "ne", "pa", "si", "do", "fu"};
        for (const char* a : syll)
            for (const char* b : syll)
                for (const char* c : syll) w.push_back(std::string(a) + b + c);
        return w;
    }();
    return words;
}

// Random document of n sentences made of nonsense words, each 3-24 words long.
inline std::string random_document(std::mt19937_64& rng, std::size_t n) {
    const auto& words = lexicon();
    std::uniform_int_distribution<std::size_t> len(3, 24), pick(0, words.size() - 1);
    std::string text;
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t l = len(rng);
        for (std::size_t w = 0; w < l; ++w) {
            std::string word = words[pick(rng)];
            if (w == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
            text += word;
            text += w + 1 == l ? ". " : " ";
        }
    }
    return text;
}

// Document of `per_topic * topics` sentences where topic t draws only from
// its own vocabulary, so sentences of different topics share no token.
// Topics appear in contiguous blocks.
inline ctxpress::RawDocument topic_document(std::uint64_t seed, std::size_t topics,
                                            std::size_t per_topic, std::size_t vocab_per_topic = 10,
                                            std::size_t words_per_sentence = 7) {
    std::mt19937_64 rng(seed);
    const auto& words = lexicon();
    ctxpress::RawDocument doc;
    doc.doc_id = "topics-" + std::to_string(seed);
    for (std::size_t t = 0; t < topics; ++t) {
        std::uniform_int_distribution<std::size_t> pick(0, vocab_per_topic - 1);
        for (std::size_t s = 0; s < per_topic; ++s) {
            for (std::size_t w = 0; w < words_per_sentence; ++w) {
                std::string word = words[t * vocab_per_topic + pick(rng)];
                if (w == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
                doc.text += word;
                doc.text += w + 1 == words_per_sentence ? ". " : " ";
            }
        }
    }
    return doc;
}

}  // namespace synth
