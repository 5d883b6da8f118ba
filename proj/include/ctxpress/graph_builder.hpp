#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "ctxpress/embedder.hpp"
#include "ctxpress/hnsw.hpp"

namespace ctxpress {

struct GraphConfig {
    std::size_t k = 8;
    std::size_t delta = 1;
    double alpha = 0.25;
    double beta = 0.75;
    std::size_t ann_threshold = 2000;
    HnswParams ann;

    /// Throws ConfigError unless alpha, beta >= 0, alpha + beta = 1 (1e-9), k >= 1.
    void validate() const;
};

/// Shortest-path length of an edge is 1 / (lambda + kDistanceEpsilon).
inline constexpr double kDistanceEpsilon = 1e-6;

using NeighborLists = std::vector<std::vector<Neighbor>>;

/// Undirected pair i < j with one weight.
struct WeightedPair {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 0.0;

    friend bool operator==(const WeightedPair&, const WeightedPair&) = default;
};

struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double w_sem = 0.0;
    double w_seq = 0.0;
    double lambda = 0.0;
    bool semantic = false;
    bool sequential = false;

    double length() const { return 1.0 / (lambda + kDistanceEpsilon); }
};

struct Adjacent {
    std::size_t node = 0;
    std::size_t edge = 0;
};

/// Sparse undirected hybrid sentence graph. Edges are sorted by (i, j) and
/// adjacency lists by neighbor index. Immutable once built.
class HybridGraph {
public:
    HybridGraph() = default;
    HybridGraph(std::size_t n, std::vector<Edge> edges);

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::span<const Adjacent> neighbors(std::size_t node) const { return adjacency_[node]; }
    const Edge* find_edge(std::size_t a, std::size_t b) const;

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<Adjacent>> adjacency_;
};

/// Top-k by cosine, self excluded, ties by ascending index; k' = min(k, N-1).
NeighborLists knn_exact(std::span<const Embedding> embeddings, std::size_t k);

/// Same contract as knn_exact via an HNSW index; recall may be below 1.
NeighborLists knn_approx(std::span<const Embedding> embeddings, std::size_t k,
                         const HnswParams& params);

/// Exact search up to ann_threshold nodes, approximate beyond.
NeighborLists knn(std::span<const Embedding> embeddings, const GraphConfig& config);

/// Keeps (i, j) iff each lists the other; weight = raw cos(e_i, e_j).
std::vector<WeightedPair> mutual_filter(const NeighborLists& lists,
                                        std::span<const Embedding> embeddings);

/// Pairs with 1 <= |i - j| <= delta, weight exp(-|i - j|).
std::vector<WeightedPair> sequential_edges(std::size_t n, std::size_t delta);

/// Union of both edge sets with lambda = alpha * max(0, w_sem) + beta * w_seq.
/// A set whose fusion weight is zero is left out of the union.
HybridGraph fuse(std::size_t n, const std::vector<WeightedPair>& semantic,
                 const std::vector<WeightedPair>& sequential, const GraphConfig& config);

HybridGraph build_graph(std::span<const Embedding> embeddings, const GraphConfig& config);

nlohmann::json graph_to_json(const HybridGraph& graph, const GraphConfig& config);

}  // namespace ctxpress
