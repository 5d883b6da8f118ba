#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctxpress/embedder.hpp"

namespace ctxpress {

struct TopicModel {
    std::size_t k = 0;
    std::vector<std::size_t> labels;
    /// Unit-norm cluster directions. A cluster whose members average to the
    /// zero vector keeps an all-zero centroid.
    std::vector<Embedding> centroids;
    double inertia = 0.0;
    std::size_t iterations = 0;
    /// Set when K > 1 but the input has a single distinct vector.
    bool degenerate = false;
};

struct KMeansOptions {
    std::size_t batch_size = 256;
    std::size_t max_iters = 100;
    double tolerance = 1e-4;
    std::uint64_t seed = 2026;
};

/// round(sqrt(n)) with halves rounded up, clamped to [1, n].
std::size_t choose_k(std::size_t n);

/// Minibatch k-means with k-means++ seeding and per-center 1/count learning
/// rates. Final labels are nearest-center assignments; final centroids are the
/// normalized member means. Empty clusters take the point farthest from its
/// own centroid.
TopicModel fit_minibatch_kmeans(std::span<const Embedding> embeddings, std::size_t k,
                                const KMeansOptions& options = {});

/// cos(e, centroid[label]) clamped to [0, 1].
double representativeness(std::span<const float> embedding, const TopicModel& model,
                          std::size_t label);

}  // namespace ctxpress
