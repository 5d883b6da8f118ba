#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctxpress/embedder.hpp"

namespace ctxpress {

struct HnswParams {
    std::size_t max_degree = 32;       // layer-0 fanout; upper layers use half
    std::size_t ef_construction = 128;
    std::size_t ef_search = 128;
    std::uint64_t seed = 2026;
};

struct Neighbor {
    std::size_t index = 0;
    double similarity = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Hierarchical navigable small-world index over unit vectors, scored by
/// inner product. Insertion is sequential so the structure depends only on
/// the input order and the seed.
class HnswIndex {
public:
    HnswIndex(std::span<const Embedding> vectors, const HnswParams& params);

    /// Up to `k` nearest stored vectors to `query`, best first.
    std::vector<Neighbor> search(std::span<const float> query, std::size_t k) const;

    std::size_t size() const noexcept { return vectors_.size(); }

private:
    struct Candidate {
        double sim;
        std::uint32_t id;
    };

    double similarity(std::span<const float> q, std::uint32_t id) const;
    std::uint32_t greedy_descend(std::span<const float> q, std::uint32_t entry, int from_level,
                                 int to_level) const;
    std::vector<Candidate> search_layer(std::span<const float> q, std::uint32_t entry,
                                        std::size_t ef, int level) const;
    std::vector<std::uint32_t> select_neighbors(std::vector<Candidate> candidates,
                                                std::size_t max_links) const;
    void insert(std::uint32_t id, int level);
    void link(std::uint32_t from, std::uint32_t to, int level);

    std::size_t max_links(int level) const {
        return level == 0 ? params_.max_degree : std::max<std::size_t>(1, params_.max_degree / 2);
    }

    std::span<const Embedding> vectors_;
    HnswParams params_;
    std::vector<std::vector<std::vector<std::uint32_t>>> links_;  // [node][level] -> ids
    std::uint32_t entry_ = 0;
    int top_level_ = -1;
};

}  // namespace ctxpress
