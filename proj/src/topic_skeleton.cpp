#include "ctxpress/topic_skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctxpress/errors.hpp"
#include "ctxpress/random.hpp"

namespace ctxpress {
namespace {

using Point = std::vector<double>;

double sq_dist(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::size_t nearest(const Point& x, const std::vector<Point>& centers, double* dist = nullptr) {
    std::size_t best = 0;
    double best_d = sq_dist(x, centers[0]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
        const double d = sq_dist(x, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist) *dist = best_d;
    return best;
}

std::vector<Point> kmeans_pp(const std::vector<Point>& xs, std::size_t k, Rng& rng) {
    const std::size_t n = xs.size();
    std::vector<Point> centers;
    std::vector<bool> chosen(n, false);
    std::size_t first = rng.below(n);
    centers.push_back(xs[first]);
    chosen[first] = true;
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(xs[i], centers[0]);
    while (centers.size() < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = n;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (d2[i] > 0.0 && acc > r) {
                    pick = i;
                    break;
                }
            }
            if (pick == n)
                for (std::size_t i = n; i-- > 0;)
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
        } else {
            // Fewer distinct points than clusters: seed with duplicates.
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
            if (pick == n) pick = 0;
        }
        chosen[pick] = true;
        centers.push_back(xs[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(xs[i], centers.back()));
    }
    return centers;
}

Embedding normalized_or_zero(const Point& p) {
    try {
        return l2_normalize(std::span<const double>(p));
    } catch (const ZeroVector&) {
        return Embedding(p.size(), 0.0f);
    }
}

}  // namespace

std::size_t choose_k(std::size_t n) {
    if (n == 0) return 1;
    const auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)) + 0.5));
    return std::clamp<std::size_t>(k, 1, n);
}

TopicModel fit_minibatch_kmeans(std::span<const Embedding> embeddings, std::size_t k,
                                const KMeansOptions& options) {
    const std::size_t n = embeddings.size();
    if (n == 0) throw Error("cannot cluster an empty embedding set");
    if (k < 1 || k > n) throw Error("cluster count must be in [1, N]");
    const std::size_t d = embeddings.front().size();

    std::vector<Point> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (embeddings[i].size() != d) throw DimensionMismatch(d, embeddings[i].size());
        xs[i].assign(embeddings[i].begin(), embeddings[i].end());
    }

    TopicModel model;
    model.k = k;
    model.labels.assign(n, 0);

    const bool all_identical =
        std::all_of(xs.begin(), xs.end(), [&](const Point& p) { return p == xs.front(); });
    if (k == 1 || all_identical) {
        Point mean(d, 0.0);
        for (const auto& x : xs)
            for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
        for (auto& m : mean) m /= static_cast<double>(n);
        for (const auto& x : xs) model.inertia += sq_dist(x, mean);
        model.centroids.assign(k, normalized_or_zero(mean));
        model.degenerate = k > 1;
        return model;
    }

    Rng rng(options.seed);
    std::vector<Point> centers = kmeans_pp(xs, k, rng);
    std::vector<double> counts(k, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> batch;
    std::vector<std::size_t> batch_labels;

    for (std::size_t it = 0; it < options.max_iters; ++it) {
        batch.clear();
        if (n <= options.batch_size) {
            batch = order;
        } else {
            // Partial Fisher-Yates draw without replacement.
            for (std::size_t b = 0; b < options.batch_size; ++b) {
                const std::size_t r = b + rng.below(n - b);
                std::swap(order[b], order[r]);
                batch.push_back(order[b]);
            }
        }
        const std::vector<Point> before = centers;
        batch_labels.resize(batch.size());
        for (std::size_t b = 0; b < batch.size(); ++b) batch_labels[b] = nearest(xs[batch[b]], centers);
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const std::size_t c = batch_labels[b];
            counts[c] += 1.0;
            const double lr = 1.0 / counts[c];
            for (std::size_t j = 0; j < d; ++j) centers[c][j] += lr * (xs[batch[b]][j] - centers[c][j]);
        }
        model.iterations = it + 1;
        double max_shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) max_shift = std::max(max_shift, std::sqrt(sq_dist(before[c], centers[c])));
        if (max_shift < options.tolerance) break;
    }

    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) model.labels[i] = nearest(xs[i], centers, &dist[i]);

    std::vector<std::size_t> sizes(k, 0);
    for (auto l : model.labels) ++sizes[l];
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] > 0) continue;
        std::size_t far = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (sizes[model.labels[i]] < 2) continue;
            if (far == n || dist[i] > dist[far]) far = i;
        }
        if (far == n) break;
        --sizes[model.labels[far]];
        model.labels[far] = c;
        ++sizes[c];
        centers[c] = xs[far];
        dist[far] = 0.0;
    }

    std::vector<Point> means(k, Point(d, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) means[model.labels[i]][j] += xs[i][j];
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
            means[c] = centers[c];
            continue;
        }
        for (auto& m : means[c]) m /= static_cast<double>(sizes[c]);
    }
    for (std::size_t i = 0; i < n; ++i) model.inertia += sq_dist(xs[i], means[model.labels[i]]);
    model.centroids.reserve(k);
    for (const auto& m : means) model.centroids.push_back(normalized_or_zero(m));
    return model;
}

double representativeness(std::span<const float> embedding, const TopicModel& model,
                          std::size_t label) {
    if (label >= model.centroids.size()) throw Error("cluster label out of range");
    return std::clamp(cosine(embedding, model.centroids[label]), 0.0, 1.0);
}

}  // namespace ctxpress
