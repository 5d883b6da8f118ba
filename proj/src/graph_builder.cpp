#include "ctxpress/graph_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ctxpress/errors.hpp"

namespace ctxpress {
namespace {

bool ranks_before(const Neighbor& a, const Neighbor& b) {
    return a.similarity > b.similarity || (a.similarity == b.similarity && a.index < b.index);
}

}  // namespace

void GraphConfig::validate() const {
    if (k < 1) throw ConfigError("k must be at least 1");
    if (alpha < 0.0 || beta < 0.0) throw ConfigError("alpha and beta must be non-negative");
    if (std::abs(alpha + beta - 1.0) > 1e-9)
        throw ConfigError("alpha + beta must equal 1 (got " + std::to_string(alpha + beta) + ")");
}

HybridGraph::HybridGraph(std::size_t n, std::vector<Edge> edges)
    : edges_(std::move(edges)), adjacency_(n) {
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return a.i < b.i || (a.i == b.i && a.j < b.j); });
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        adjacency_[edges_[e].i].push_back({edges_[e].j, e});
        adjacency_[edges_[e].j].push_back({edges_[e].i, e});
    }
    for (auto& adj : adjacency_)
        std::sort(adj.begin(), adj.end(),
                  [](const Adjacent& a, const Adjacent& b) { return a.node < b.node; });
}

const Edge* HybridGraph::find_edge(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    const auto it = std::lower_bound(
        edges_.begin(), edges_.end(), std::pair{a, b}, [](const Edge& e, const std::pair<std::size_t, std::size_t>& p) {
            return e.i < p.first || (e.i == p.first && e.j < p.second);
        });
    if (it == edges_.end() || it->i != a || it->j != b) return nullptr;
    return &*it;
}

NeighborLists knn_exact(std::span<const Embedding> embeddings, std::size_t k) {
    const std::size_t n = embeddings.size();
    NeighborLists lists(n);
    if (n < 2) return lists;
    const std::size_t kk = std::min(k, n - 1);
    std::vector<Neighbor> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row.push_back({j, cosine(embeddings[i], embeddings[j])});
        std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk), row.end(),
                          ranks_before);
        lists[i].assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk));
    }
    return lists;
}

NeighborLists knn_approx(std::span<const Embedding> embeddings, std::size_t k,
                         const HnswParams& params) {
    const std::size_t n = embeddings.size();
    NeighborLists lists(n);
    if (n < 2) return lists;
    const std::size_t kk = std::min(k, n - 1);
    const HnswIndex index(embeddings, params);
    for (std::size_t i = 0; i < n; ++i) {
        auto found = index.search(embeddings[i], kk + 1);
        auto& out = lists[i];
        for (const auto& nb : found) {
            if (nb.index == i) continue;
            // Re-score with the exact cosine so edge weights match the exact path.
            out.push_back({nb.index, cosine(embeddings[i], embeddings[nb.index])});
        }
        std::sort(out.begin(), out.end(), ranks_before);
        if (out.size() > kk) out.resize(kk);
    }
    return lists;
}

NeighborLists knn(std::span<const Embedding> embeddings, const GraphConfig& config) {
    if (embeddings.size() > config.ann_threshold) return knn_approx(embeddings, config.k, config.ann);
    return knn_exact(embeddings, config.k);
}

std::vector<WeightedPair> mutual_filter(const NeighborLists& lists,
                                        std::span<const Embedding> embeddings) {
    std::vector<WeightedPair> edges;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        for (const auto& nb : lists[i]) {
            const std::size_t j = nb.index;
            if (j <= i || j >= lists.size()) continue;
            const auto& back = lists[j];
            const bool mutual = std::any_of(back.begin(), back.end(),
                                            [i](const Neighbor& x) { return x.index == i; });
            if (mutual) edges.push_back({i, j, cosine(embeddings[i], embeddings[j])});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const WeightedPair& a, const WeightedPair& b) {
        return a.i < b.i || (a.i == b.i && a.j < b.j);
    });
    return edges;
}

std::vector<WeightedPair> sequential_edges(std::size_t n, std::size_t delta) {
    std::vector<WeightedPair> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 1; d <= delta && i + d < n; ++d)
            edges.push_back({i, i + d, std::exp(-static_cast<double>(d))});
    return edges;
}

HybridGraph fuse(std::size_t n, const std::vector<WeightedPair>& semantic,
                 const std::vector<WeightedPair>& sequential, const GraphConfig& config) {
    config.validate();
    std::map<std::pair<std::size_t, std::size_t>, Edge> merged;
    auto slot = [&](const WeightedPair& p) -> Edge& {
        if (p.i == p.j || p.i >= n || p.j >= n)
            throw Error("edge (" + std::to_string(p.i) + "," + std::to_string(p.j) + ") is invalid");
        const auto key = std::minmax(p.i, p.j);
        auto& e = merged[key];
        e.i = key.first;
        e.j = key.second;
        return e;
    };
    if (config.alpha > 0.0) {
        for (const auto& p : semantic) {
            auto& e = slot(p);
            e.semantic = true;
            e.w_sem = p.weight;
        }
    }
    if (config.beta > 0.0) {
        for (const auto& p : sequential) {
            auto& e = slot(p);
            e.sequential = true;
            e.w_seq = p.weight;
        }
    }
    std::vector<Edge> edges;
    edges.reserve(merged.size());
    for (auto& [key, e] : merged) {
        e.lambda = config.alpha * std::max(0.0, e.w_sem) + config.beta * e.w_seq;
        edges.push_back(e);
    }
    return HybridGraph(n, std::move(edges));
}

HybridGraph build_graph(std::span<const Embedding> embeddings, const GraphConfig& config) {
    config.validate();
    const std::size_t n = embeddings.size();
    std::vector<WeightedPair> semantic;
    if (n >= 2) semantic = mutual_filter(knn(embeddings, config), embeddings);
    return fuse(n, semantic, sequential_edges(n, config.delta), config);
}

nlohmann::json graph_to_json(const HybridGraph& graph, const GraphConfig& config) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : graph.edges())
        edges.push_back({{"i", e.i}, {"j", e.j}, {"w_sem", e.w_sem}, {"w_seq", e.w_seq},
                         {"lambda", e.lambda}});
    return {{"nodes", graph.node_count()},
            {"edges", std::move(edges)},
            {"config",
             {{"k", config.k},
              {"delta", config.delta},
              {"alpha", config.alpha},
              {"beta", config.beta},
              {"ann_threshold", config.ann_threshold}}}};
}

}  // namespace ctxpress
