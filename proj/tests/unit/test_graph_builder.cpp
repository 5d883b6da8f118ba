#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "ctxpress/errors.hpp"
#include "ctxpress/graph_builder.hpp"
#include "ctxpress/hnsw.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace ctxpress;

namespace {

std::vector<std::size_t> ids(const std::vector<Neighbor>& l) {
    std::vector<std::size_t> out;
    for (const auto& n : l) out.push_back(n.index);
    return out;
}

std::set<std::pair<std::size_t, std::size_t>> pair_set(const std::vector<WeightedPair>& p) {
    std::set<std::pair<std::size_t, std::size_t>> s;
    for (const auto& x : p) s.emplace(x.i, x.j);
    return s;
}

}  // namespace

TEST_CASE("knn on two nodes") {
    const std::vector<Embedding> e{{1, 0}, {0.6f, 0.8f}};
    const auto l = knn_exact(e, 8);
    CHECK(ids(l[0]) == std::vector<std::size_t>{1});
    CHECK(ids(l[1]) == std::vector<std::size_t>{0});
}

TEST_CASE("knn ties resolve to the lowest index") {
    const std::vector<Embedding> e{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const auto l = knn_exact(e, 1);
    CHECK(ids(l[0]) == std::vector<std::size_t>{1});
    CHECK(ids(l[1]) == std::vector<std::size_t>{0});
    CHECK(ids(l[2]) == std::vector<std::size_t>{0});
}

TEST_CASE("knn matches the full-sort oracle") {
    std::mt19937_64 rng(5);
    const auto e = synth::random_units(rng, 50, 16);
    const auto l = knn_exact(e, 5);
    const auto o = oracle::knn_lists(e, 5);
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(ids(l[i]) == o[i]);
}

TEST_CASE("knn routes small inputs to the exact path") {
    std::mt19937_64 rng(6);
    const auto e = synth::random_units(rng, 300, 16);
    GraphConfig cfg;
    cfg.ann_threshold = 2000;
    const auto routed = knn(e, cfg);
    const auto exact = knn_exact(e, cfg.k);
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(routed[i] == exact[i]);
}

TEST_CASE("hnsw retrieves exact duplicates as mutual nearest neighbors") {
    std::mt19937_64 rng(8);
    auto e = synth::random_units(rng, 200, 16);
    e.push_back(e[17]);
    const auto l = knn_approx(e, 1, HnswParams{});
    CHECK(ids(l[17]) == std::vector<std::size_t>{200});
    CHECK(ids(l[200]) == std::vector<std::size_t>{17});
}

TEST_CASE("hnsw recall on clustered data") {
    std::mt19937_64 rng(9);
    const auto e = synth::clustered(rng, 1500, 32, 20, 0.15);
    const auto approx = knn_approx(e, 8, HnswParams{});
    const auto exact = knn_exact(e, 8);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        std::set<std::size_t> truth;
        for (const auto& n : exact[i]) truth.insert(n.index);
        for (const auto& n : approx[i]) hits += truth.count(n.index);
    }
    CHECK(static_cast<double>(hits) / (8.0 * e.size()) >= 0.95);
}

TEST_CASE("mutual filter keeps only reciprocal pairs") {
    // 0 and 1 point at each other; 2 points at 1 but 1 does not point back.
    NeighborLists lists{{{1, 0.9}}, {{0, 0.9}}, {{1, 0.5}}};
    const std::vector<Embedding> e{{1, 0}, {1, 0}, {0.6f, 0.8f}};
    const auto m = mutual_filter(lists, e);
    REQUIRE(m.size() == 1);
    CHECK(m[0].i == 0);
    CHECK(m[0].j == 1);

    const std::vector<Embedding> two{{1, 0}, {0.6f, 0.8f}};
    const auto p = mutual_filter(knn_exact(two, 1), two);
    REQUIRE(p.size() == 1);
    CHECK(p[0].weight == doctest::Approx(0.6));
}

TEST_CASE("mutual filter matches the brute-force oracle") {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 5; ++t) {
        const auto e = synth::random_units(rng, 30, 8);
        CHECK(pair_set(mutual_filter(knn_exact(e, 4), e)) == oracle::mutual_pairs(e, 4));
    }
}

TEST_CASE("sequential edges") {
    const auto s = sequential_edges(4, 1);
    REQUIRE(s.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s[i].i == i);
        CHECK(s[i].j == i + 1);
        CHECK(s[i].weight == doctest::Approx(0.367879).epsilon(1e-6));
    }
    CHECK(sequential_edges(4, 0).empty());
    const auto s2 = sequential_edges(5, 2);
    CHECK(s2.size() == 7);
    std::size_t far = 0;
    for (const auto& p : s2)
        if (p.j - p.i == 2) {
            ++far;
            CHECK(p.weight == doctest::Approx(std::exp(-2.0)));
        }
    CHECK(far == 3);
}

TEST_CASE("fusion arithmetic") {
    GraphConfig cfg;
    const std::vector<WeightedPair> sem{{0, 2, 0.8}, {0, 1, 0.8}};
    const auto g = fuse(3, sem, sequential_edges(3, 1), cfg);
    const Edge* only_sem = g.find_edge(0, 2);
    REQUIRE(only_sem);
    CHECK(only_sem->lambda == doctest::Approx(0.2));
    const Edge* both = g.find_edge(1, 0);
    REQUIRE(both);
    CHECK(both->lambda == doctest::Approx(0.25 * 0.8 + 0.75 * std::exp(-1.0)));
    CHECK(both->lambda == doctest::Approx(0.475909).epsilon(1e-6));
    CHECK(both->semantic);
    CHECK(both->sequential);
    const Edge* only_seq = g.find_edge(1, 2);
    REQUIRE(only_seq);
    CHECK(only_seq->lambda == doctest::Approx(0.75 * std::exp(-1.0)));
    CHECK(g.edges().size() == 3);
}

TEST_CASE("negative semantic weight contributes nothing") {
    GraphConfig cfg;
    const auto g = fuse(2, {{0, 1, -0.4}}, {}, cfg);
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges()[0].lambda == 0.0);
    CHECK(g.edges()[0].length() == doctest::Approx(1e6));
}

TEST_CASE("graph config validation") {
    GraphConfig cfg;
    cfg.alpha = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.beta = 0.5;
    CHECK_NOTHROW(cfg.validate());
    cfg.k = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("built graph is symmetric and has no self-loops") {
    std::mt19937_64 rng(12);
    const auto e = synth::random_units(rng, 40, 8);
    const auto g = build_graph(e, GraphConfig{});
    for (const auto& edge : g.edges()) {
        CHECK(edge.i < edge.j);
        CHECK(g.find_edge(edge.j, edge.i) == &edge);
    }
    std::size_t degree = 0;
    for (std::size_t v = 0; v < g.node_count(); ++v) degree += g.neighbors(v).size();
    CHECK(degree == 2 * g.edges().size());
}

TEST_CASE("graph json export") {
    const std::vector<Embedding> e{{1, 0}, {0.6f, 0.8f}, {0, 1}};
    const auto j = graph_to_json(build_graph(e, GraphConfig{}), GraphConfig{});
    CHECK(j["nodes"] == 3);
    CHECK(j["edges"].size() == build_graph(e, GraphConfig{}).edges().size());
}
