#include "ctxpress/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_set>

#include "ctxpress/errors.hpp"
#include "ctxpress/random.hpp"

namespace ctxpress {
namespace {

struct WorseFirst {
    template <typename C>
    bool operator()(const C& a, const C& b) const {
        return a.sim > b.sim || (a.sim == b.sim && a.id < b.id);
    }
};

struct BetterFirst {
    template <typename C>
    bool operator()(const C& a, const C& b) const {
        return a.sim < b.sim || (a.sim == b.sim && a.id > b.id);
    }
};

}  // namespace

HnswIndex::HnswIndex(std::span<const Embedding> vectors, const HnswParams& params)
    : vectors_(vectors), params_(params) {
    if (params_.max_degree < 2) throw IndexBuildFailure("max_degree must be at least 2");
    if (vectors_.empty()) return;
    const std::size_t d = vectors_.front().size();
    for (const auto& v : vectors_)
        if (v.size() != d) throw IndexBuildFailure("vectors have inconsistent dimensions");

    Rng rng(params_.seed);
    const double level_mult = 1.0 / std::log(static_cast<double>(std::max<std::size_t>(2, max_links(1))));
    links_.resize(vectors_.size());
    for (std::uint32_t id = 0; id < vectors_.size(); ++id) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        const int level = std::min(16, static_cast<int>(-std::log(u) * level_mult));
        insert(id, level);
    }
}

double HnswIndex::similarity(std::span<const float> q, std::uint32_t id) const {
    const auto& v = vectors_[id];
    double dot = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) dot += static_cast<double>(q[i]) * v[i];
    return dot;
}

std::uint32_t HnswIndex::greedy_descend(std::span<const float> q, std::uint32_t entry,
                                        int from_level, int to_level) const {
    std::uint32_t cur = entry;
    double cur_sim = similarity(q, cur);
    for (int level = from_level; level > to_level; --level) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (auto nb : links_[cur][level]) {
                const double s = similarity(q, nb);
                if (s > cur_sim || (s == cur_sim && nb < cur)) {
                    cur = nb;
                    cur_sim = s;
                    improved = true;
                }
            }
        }
    }
    return cur;
}

std::vector<HnswIndex::Candidate> HnswIndex::search_layer(std::span<const float> q,
                                                          std::uint32_t entry, std::size_t ef,
                                                          int level) const {
    std::unordered_set<std::uint32_t> visited{entry};
    std::priority_queue<Candidate, std::vector<Candidate>, BetterFirst> frontier;
    std::priority_queue<Candidate, std::vector<Candidate>, WorseFirst> best;
    const Candidate start{similarity(q, entry), entry};
    frontier.push(start);
    best.push(start);
    while (!frontier.empty()) {
        const Candidate c = frontier.top();
        frontier.pop();
        if (best.size() >= ef && c.sim < best.top().sim) break;
        for (auto nb : links_[c.id][level]) {
            if (!visited.insert(nb).second) continue;
            const double s = similarity(q, nb);
            if (best.size() < ef || s > best.top().sim) {
                frontier.push({s, nb});
                best.push({s, nb});
                if (best.size() > ef) best.pop();
            }
        }
    }
    std::vector<Candidate> out;
    out.reserve(best.size());
    while (!best.empty()) {
        out.push_back(best.top());
        best.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

// Diversity heuristic: keep a candidate only if it is closer to the base
// node than to every neighbor already kept; backfill with the rest.
std::vector<std::uint32_t> HnswIndex::select_neighbors(std::vector<Candidate> candidates,
                                                       std::size_t max_links) const {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return a.sim > b.sim || (a.sim == b.sim && a.id < b.id);
    });
    std::vector<std::uint32_t> kept;
    std::vector<std::uint32_t> pruned;
    for (const auto& c : candidates) {
        if (kept.size() >= max_links) break;
        bool diverse = true;
        for (auto k : kept) {
            if (similarity(vectors_[c.id], k) > c.sim) {
                diverse = false;
                break;
            }
        }
        (diverse ? kept : pruned).push_back(c.id);
    }
    for (auto p : pruned) {
        if (kept.size() >= max_links) break;
        kept.push_back(p);
    }
    return kept;
}

void HnswIndex::link(std::uint32_t from, std::uint32_t to, int level) {
    auto& adj = links_[from][level];
    adj.push_back(to);
    const std::size_t cap = max_links(level);
    if (adj.size() <= cap) return;
    std::vector<Candidate> cands;
    cands.reserve(adj.size());
    for (auto nb : adj) cands.push_back({similarity(vectors_[from], nb), nb});
    adj = select_neighbors(std::move(cands), cap);
}

void HnswIndex::insert(std::uint32_t id, int level) {
    links_[id].resize(static_cast<std::size_t>(level) + 1);
    if (top_level_ < 0) {
        entry_ = id;
        top_level_ = level;
        return;
    }
    const std::span<const float> q = vectors_[id];
    std::uint32_t cur = greedy_descend(q, entry_, top_level_, level);
    for (int l = std::min(level, top_level_); l >= 0; --l) {
        auto cands = search_layer(q, cur, params_.ef_construction, l);
        cur = cands.front().id;
        const auto chosen = select_neighbors(cands, max_links(l));
        links_[id][l] = chosen;
        for (auto nb : chosen) link(nb, id, l);
    }
    if (level > top_level_) {
        top_level_ = level;
        entry_ = id;
    }
}

std::vector<Neighbor> HnswIndex::search(std::span<const float> query, std::size_t k) const {
    if (top_level_ < 0 || k == 0) return {};
    const std::uint32_t start = greedy_descend(query, entry_, top_level_, 0);
    auto found = search_layer(query, start, std::max(params_.ef_search, k), 0);
    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        return a.sim > b.sim || (a.sim == b.sim && a.id < b.id);
    });
    std::vector<Neighbor> out;
    for (std::size_t i = 0; i < found.size() && i < k; ++i) out.push_back({found[i].id, found[i].sim});
    return out;
}

}  // namespace ctxpress
