#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxpress/embedder.hpp"
#include "ctxpress/graph_builder.hpp"
#include "ctxpress/topic_skeleton.hpp"

namespace ctxpress {

struct ScoringWeights {
    double task = 0.45;
    double rep = 0.30;
    double bridge = 0.20;
    double cycle = 0.05;

    /// Throws ConfigError on a negative weight.
    void validate() const;
    bool sums_to_one(double tol = 1e-9) const;

    friend bool operator==(const ScoringWeights&, const ScoringWeights&) = default;
};

struct ScoreCard {
    std::vector<double> task;
    std::vector<double> rep;
    std::vector<double> bridge;
    std::vector<double> cycle;  // 0 or 1
    std::vector<double> composite;
    ScoringWeights weights;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return composite.size(); }
};

inline constexpr std::size_t kDefaultMaxCycles = 200;

/// cos(e_i, query) when a query is given, else cos(e_i, centroid); clamped to [0, 1].
std::vector<double> task_relevance(std::span<const Embedding> sentences,
                                   const std::optional<Embedding>& query,
                                   std::span<const float> centroid);

/// ceil(sqrt(n)) clamped to [1, n].
std::size_t default_bridge_samples(std::size_t n);

/// `count` distinct source nodes drawn from a stream seeded with `seed`, sorted.
std::vector<std::size_t> sample_sources(std::size_t n, std::size_t count, std::uint64_t seed);

/// Brandes dependency accumulation from the given sources over shortest paths
/// with edge length 1 / (lambda + eps). Unscaled; with every node as a source
/// this is betweenness summed over ordered (s, t) pairs.
std::vector<double> brandes_betweenness(const HybridGraph& graph,
                                        std::span<const std::size_t> sources);

/// Brandes over `n_samples` sampled sources, scaled by N / n_samples.
std::vector<double> sampled_betweenness(const HybridGraph& graph, std::size_t n_samples,
                                        std::uint64_t seed);

/// Affine map onto [0, 1]; a constant vector maps to all zeros.
std::vector<double> min_max_normalize(std::vector<double> values);

std::vector<double> bridge_centrality(const HybridGraph& graph, std::size_t n_samples,
                                      std::uint64_t seed);

/// Fundamental cycles of a BFS spanning forest (roots and neighbors visited in
/// ascending order), each as a sorted node list, ordered by length, then
/// smallest member, then lexicographically.
std::vector<std::vector<std::size_t>> cycle_basis(const HybridGraph& graph);

/// 1 for nodes on any of the first `max_cycles` basis cycles, else 0.
std::vector<double> cycle_coverage(const HybridGraph& graph,
                                   std::size_t max_cycles = kDefaultMaxCycles);

std::vector<double> composite(std::span<const double> task, std::span<const double> rep,
                              std::span<const double> bridge, std::span<const double> cycle,
                              const ScoringWeights& weights);

struct ScoringOptions {
    std::size_t bridge_samples = 0;  // 0 selects default_bridge_samples(N)
    std::size_t max_cycles = kDefaultMaxCycles;
    std::uint64_t sampling_seed = 2026;
};

ScoreCard score_sentences(std::span<const Embedding> embeddings,
                          const std::optional<Embedding>& query, const HybridGraph& graph,
                          const TopicModel& topics, const ScoringWeights& weights,
                          const ScoringOptions& options = {});

}  // namespace ctxpress
