#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "ctxpress/topic_skeleton.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace ctxpress;

TEST_CASE("choose_k rounds the square root") {
    CHECK(choose_k(100) == 10);
    CHECK(choose_k(1) == 1);
    CHECK(choose_k(10) == 3);
    CHECK(choose_k(30) == 5);
    CHECK(choose_k(2) == 1);
}

TEST_CASE("single cluster uses the normalized mean") {
    const std::vector<Embedding> e{{1, 0}, {0, 1}};
    const auto m = fit_minibatch_kmeans(e, 1);
    CHECK(m.labels == std::vector<std::size_t>{0, 0});
    CHECK(m.centroids[0][0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(m.centroids[0][1] == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("antipodal pair under one cluster has zero representativeness") {
    const std::vector<Embedding> e{{1, 0}, {-1, 0}};
    const auto m = fit_minibatch_kmeans(e, 1);
    CHECK(representativeness(e[0], m, 0) == 0.0);
    CHECK(representativeness(e[1], m, 0) == 0.0);
}

TEST_CASE("two separated clouds match the Lloyd oracle partition") {
    std::mt19937_64 rng(21);
    std::vector<Embedding> e;
    std::normal_distribution<double> g(0.0, 0.05);
    for (int i = 0; i < 40; ++i) {
        const bool left = i % 3 == 0;
        std::vector<double> v{left ? 1.0 : 0.0, left ? 0.0 : 1.0, 0.0};
        for (auto& x : v) x += g(rng);
        e.push_back(l2_normalize(std::span<const double>(v)));
    }
    const auto m = fit_minibatch_kmeans(e, 2);
    const auto o = oracle::lloyd(e, {{1, 0, 0}, {0, 1, 0}});
    // Same partition up to label permutation.
    std::map<std::size_t, std::size_t> mapping;
    for (std::size_t i = 0; i < e.size(); ++i) {
        auto [it, inserted] = mapping.emplace(m.labels[i], o[i]);
        CHECK(it->second == o[i]);
    }
    CHECK(mapping.size() == 2);
}

TEST_CASE("same seed gives identical models") {
    std::mt19937_64 rng(22);
    const auto e = synth::clustered(rng, 300, 16, 6, 0.2);
    const auto a = fit_minibatch_kmeans(e, 17);
    const auto b = fit_minibatch_kmeans(e, 17);
    CHECK(a.labels == b.labels);
    CHECK(a.centroids == b.centroids);
    KMeansOptions other;
    other.seed = 7;
    const auto c = fit_minibatch_kmeans(e, 17, other);
    CHECK(c.labels.size() == e.size());
}

TEST_CASE("labels are nearest centroids and every cluster is non-empty") {
    std::mt19937_64 rng(23);
    const auto e = synth::clustered(rng, 120, 8, 4, 0.3);
    const auto m = fit_minibatch_kmeans(e, 11);
    std::vector<std::size_t> count(m.k, 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
        ++count[m.labels[i]];
        for (std::size_t c = 0; c < m.k; ++c)
            CHECK(oracle::dot(e[i], m.centroids[c]) <= oracle::dot(e[i], m.centroids[m.labels[i]]) + 1e-9);
    }
    for (auto c : count) CHECK(c > 0);
}

TEST_CASE("representativeness matches cosine to the assigned centroid") {
    std::mt19937_64 rng(24);
    const auto e = synth::clustered(rng, 12, 16, 3, 0.1);
    const auto m = fit_minibatch_kmeans(e, 3);
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double expected = std::clamp(oracle::dot(e[i], m.centroids[m.labels[i]]), 0.0, 1.0);
        CHECK(representativeness(e[i], m, m.labels[i]) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(representativeness(m.centroids[0], m, 0) == doctest::Approx(1.0));
}

TEST_CASE("identical inputs with several clusters are flagged degenerate") {
    const std::vector<Embedding> e(9, Embedding{0.6f, 0.8f});
    const auto m = fit_minibatch_kmeans(e, 3);
    CHECK(m.degenerate);
    CHECK(m.labels.size() == 9);
}
