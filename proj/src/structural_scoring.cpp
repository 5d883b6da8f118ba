#include "ctxpress/structural_scoring.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "ctxpress/errors.hpp"
#include "ctxpress/random.hpp"

namespace ctxpress {
namespace {

constexpr double kTieTolerance = 1e-12;

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= kTieTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace

void ScoringWeights::validate() const {
    if (task < 0.0 || rep < 0.0 || bridge < 0.0 || cycle < 0.0)
        throw ConfigError("scoring weights must be non-negative");
}

bool ScoringWeights::sums_to_one(double tol) const {
    return std::abs(task + rep + bridge + cycle - 1.0) <= tol;
}

std::vector<double> task_relevance(std::span<const Embedding> sentences,
                                   const std::optional<Embedding>& query,
                                   std::span<const float> centroid) {
    const std::span<const float> anchor = query ? std::span<const float>(*query) : centroid;
    std::vector<double> out;
    out.reserve(sentences.size());
    for (const auto& e : sentences) out.push_back(std::clamp(cosine(e, anchor), 0.0, 1.0));
    return out;
}

std::size_t default_bridge_samples(std::size_t n) {
    if (n == 0) return 0;
    const auto s = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    return std::clamp<std::size_t>(s, 1, n);
}

std::vector<std::size_t> sample_sources(std::size_t n, std::size_t count, std::uint64_t seed) {
    count = std::min(count, n);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    if (count < n) {
        Rng rng(seed);
        for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
        pool.resize(count);
    }
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<double> brandes_betweenness(const HybridGraph& graph,
                                        std::span<const std::size_t> sources) {
    const std::size_t n = graph.node_count();
    std::vector<double> centrality(n, 0.0);
    std::vector<double> dist(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<std::size_t> settled;
    std::vector<bool> done(n);
    using Item = std::pair<double, std::size_t>;

    for (const std::size_t s : sources) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(done.begin(), done.end(), false);
        for (auto& p : preds) p.clear();
        settled.clear();

        dist[s] = 0.0;
        sigma[s] = 1.0;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.push({0.0, s});
        while (!heap.empty()) {
            const auto [dv, v] = heap.top();
            heap.pop();
            if (done[v] || dv > dist[v]) continue;
            done[v] = true;
            settled.push_back(v);
            for (const auto& adj : graph.neighbors(v)) {
                const std::size_t w = adj.node;
                if (done[w]) continue;
                const double alt = dv + graph.edges()[adj.edge].length();
                if (std::isinf(dist[w]) || (alt < dist[w] && !nearly_equal(alt, dist[w]))) {
                    dist[w] = alt;
                    sigma[w] = sigma[v];
                    preds[w].assign(1, v);
                    heap.push({alt, w});
                } else if (nearly_equal(alt, dist[w])) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = settled.rbegin(); it != settled.rend(); ++it) {
            const std::size_t w = *it;
            for (const std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) centrality[w] += delta[w];
        }
    }
    return centrality;
}

std::vector<double> sampled_betweenness(const HybridGraph& graph, std::size_t n_samples,
                                        std::uint64_t seed) {
    const std::size_t n = graph.node_count();
    if (n == 0) return {};
    n_samples = std::clamp<std::size_t>(n_samples, 1, n);
    const auto sources = sample_sources(n, n_samples, seed);
    auto raw = brandes_betweenness(graph, sources);
    const double scale = static_cast<double>(n) / static_cast<double>(n_samples);
    for (auto& r : raw) r *= scale;
    return raw;
}

std::vector<double> min_max_normalize(std::vector<double> values) {
    if (values.empty()) return values;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double min = *lo;
    const double range = *hi - min;
    for (auto& v : values) v = range > 0.0 ? (v - min) / range : 0.0;
    return values;
}

std::vector<double> bridge_centrality(const HybridGraph& graph, std::size_t n_samples,
                                      std::uint64_t seed) {
    return min_max_normalize(sampled_betweenness(graph, n_samples, seed));
}

std::vector<std::vector<std::size_t>> cycle_basis(const HybridGraph& graph) {
    const std::size_t n = graph.node_count();
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent(n, kNone);
    std::vector<std::size_t> parent_edge(n, kNone);
    std::vector<std::size_t> depth(n, 0);
    std::vector<bool> seen(n, false);
    std::vector<bool> tree_edge(graph.edges().size(), false);

    for (std::size_t root = 0; root < n; ++root) {
        if (seen[root]) continue;
        seen[root] = true;
        std::deque<std::size_t> queue{root};
        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop_front();
            for (const auto& adj : graph.neighbors(v)) {
                if (seen[adj.node]) continue;
                seen[adj.node] = true;
                parent[adj.node] = v;
                parent_edge[adj.node] = adj.edge;
                depth[adj.node] = depth[v] + 1;
                tree_edge[adj.edge] = true;
                queue.push_back(adj.node);
            }
        }
    }

    std::vector<std::vector<std::size_t>> cycles;
    for (std::size_t e = 0; e < graph.edges().size(); ++e) {
        if (tree_edge[e]) continue;
        std::size_t a = graph.edges()[e].i;
        std::size_t b = graph.edges()[e].j;
        std::vector<std::size_t> cycle;
        while (depth[a] > depth[b]) {
            cycle.push_back(a);
            a = parent[a];
        }
        while (depth[b] > depth[a]) {
            cycle.push_back(b);
            b = parent[b];
        }
        while (a != b) {
            cycle.push_back(a);
            cycle.push_back(b);
            a = parent[a];
            b = parent[b];
        }
        cycle.push_back(a);
        std::sort(cycle.begin(), cycle.end());
        cycles.push_back(std::move(cycle));
    }
    std::sort(cycles.begin(), cycles.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;  // sorted lists: first element is the smallest member
    });
    return cycles;
}

std::vector<double> cycle_coverage(const HybridGraph& graph, std::size_t max_cycles) {
    std::vector<double> marks(graph.node_count(), 0.0);
    const auto cycles = cycle_basis(graph);
    for (std::size_t c = 0; c < cycles.size() && c < max_cycles; ++c)
        for (auto v : cycles[c]) marks[v] = 1.0;
    return marks;
}

std::vector<double> composite(std::span<const double> task, std::span<const double> rep,
                              std::span<const double> bridge, std::span<const double> cycle,
                              const ScoringWeights& w) {
    const std::size_t n = task.size();
    if (rep.size() != n || bridge.size() != n || cycle.size() != n)
        throw Error("score components have different lengths");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = w.task * task[i] + w.rep * rep[i] + w.bridge * bridge[i] + w.cycle * cycle[i];
    return out;
}

ScoreCard score_sentences(std::span<const Embedding> embeddings,
                          const std::optional<Embedding>& query, const HybridGraph& graph,
                          const TopicModel& topics, const ScoringWeights& weights,
                          const ScoringOptions& options) {
    weights.validate();
    const std::size_t n = embeddings.size();
    if (graph.node_count() != n || topics.labels.size() != n)
        throw Error("graph, topics and embeddings disagree on sentence count");

    ScoreCard card;
    card.weights = weights;
    if (!weights.sums_to_one())
        card.warnings.push_back("scoring weights sum to " +
                                std::to_string(weights.task + weights.rep + weights.bridge +
                                               weights.cycle) +
                                ", not 1");

    Embedding centroid;
    try {
        centroid = document_centroid(embeddings);
    } catch (const ZeroVector&) {
        centroid.assign(embeddings.front().size(), 0.0f);
        card.warnings.push_back("document centroid is the zero vector");
    }
    card.task = task_relevance(embeddings, query, centroid);
    card.rep.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        card.rep.push_back(representativeness(embeddings[i], topics, topics.labels[i]));
    const std::size_t samples =
        options.bridge_samples == 0 ? default_bridge_samples(n) : options.bridge_samples;
    card.bridge = bridge_centrality(graph, samples, options.sampling_seed);
    card.cycle = cycle_coverage(graph, options.max_cycles);
    card.composite = composite(card.task, card.rep, card.bridge, card.cycle, weights);
    return card;
}

}  // namespace ctxpress
