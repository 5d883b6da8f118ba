#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "ctxpress/embedder.hpp"
#include "ctxpress/embedding_cache.hpp"
#include "ctxpress/errors.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace ctxpress;

namespace {

double norm(const Embedding& v) {
    double s = 0;
    for (float x : v) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("l2_normalize") {
    const std::vector<double> v{3, 4};
    const auto n = l2_normalize(std::span<const double>(v));
    CHECK(n[0] == doctest::Approx(0.6));
    CHECK(n[1] == doctest::Approx(0.8));
    const std::vector<float> u{0.6f, 0.8f};
    CHECK(l2_normalize(std::span<const float>(u)) == Embedding{0.6f, 0.8f});
    const std::vector<double> z{0, 0};
    CHECK_THROWS_AS(l2_normalize(std::span<const double>(z)), ZeroVector);
}

TEST_CASE("cosine") {
    const Embedding a{1, 0, 0}, b{0, 1, 0};
    CHECK(cosine(a, b) == 0.0);
    CHECK(cosine(a, a) == doctest::Approx(1.0));
    CHECK_THROWS_AS(cosine(a, Embedding{1, 0}), DimensionMismatch);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const auto x = synth::random_unit(rng, 64), y = synth::random_unit(rng, 64);
        CHECK(cosine(x, y) == doctest::Approx(oracle::dot(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("document_centroid") {
    const std::vector<Embedding> one{{0.6f, 0.8f}};
    CHECK(document_centroid(one) == one[0]);
    const std::vector<Embedding> anti{{1, 0}, {-1, 0}};
    CHECK_THROWS_AS(document_centroid(anti), ZeroVector);
    const std::vector<Embedding> three{{1, 0, 0}, {0, 1, 0}, {0.6f, 0.8f, 0}};
    const auto c = document_centroid(three);
    const double mx = (1 + 0 + 0.6) / 3, my = (0 + 1 + 0.8) / 3;
    const double nm = std::hypot(mx, my);
    CHECK(c[0] == doctest::Approx(mx / nm));
    CHECK(c[1] == doctest::Approx(my / nm));
    CHECK(c[2] == 0.0f);
}

TEST_CASE("local-hash vectors are unit-norm and deterministic") {
    LocalHashProvider p(ProviderConfig{});
    const auto v = p.embed_batch({"x", "x", "The river rose quickly after the storm.", "!!!"});
    REQUIRE(v.size() == 4);
    CHECK(v[0] == v[1]);
    for (const auto& e : v) {
        CHECK(e.size() == 256);
        CHECK(norm(e) == doctest::Approx(1.0).epsilon(1e-6));
    }
    LocalHashProvider q(ProviderConfig{});
    CHECK(q.embed_one("The river rose quickly after the storm.") == v[2]);
}

TEST_CASE("word order matters only with bigram features") {
    ProviderConfig uni;
    uni.bigram_features = false;
    LocalHashProvider pu(uni);
    CHECK(pu.embed_one("alpha beta") == pu.embed_one("beta alpha"));
    auto fu = pu.features("alpha beta");
    std::sort(fu.begin(), fu.end());
    CHECK(fu == std::vector<std::string>{"u:alpha", "u:beta"});

    LocalHashProvider pb(ProviderConfig{});
    CHECK(pb.embed_one("alpha beta") != pb.embed_one("beta alpha"));
    CHECK(pb.features("alpha beta") != pb.features("beta alpha"));
}

TEST_CASE("features drop stopwords and punctuation and lowercase") {
    ProviderConfig uni;
    uni.bigram_features = false;
    LocalHashProvider p(uni);
    CHECK(p.features("The Cat, and the DOG!") == std::vector<std::string>{"u:cat", "u:dog"});
}

TEST_CASE("texts without features fall back to a basis vector") {
    LocalHashProvider p(ProviderConfig{});
    const auto v = p.embed_batch({"real words here", "the of and", "."});
    CHECK(v[1] == basis_vector(1, 256));
    CHECK(v[2] == basis_vector(2, 256));
}

TEST_CASE("inputs are truncated before encoding") {
    ProviderConfig cfg;
    cfg.max_input_tokens = 4;
    LocalHashProvider p(cfg);
    CHECK(p.embed_one("alpha beta gamma delta epsilon zeta") == p.embed_one("alpha beta gamma delta"));
}

TEST_CASE("vector file round trip and rejection of corrupt entries") {
    const Embedding v{0.25f, -0.5f, 1.0f};
    const auto bytes = encode_vector_file(v);
    CHECK(bytes.size() == 4 + 4 + 8 + 12);
    CHECK(bytes.substr(0, 4) == "CXEV");
    CHECK(decode_vector_file(bytes, 3) == v);
    CHECK_FALSE(decode_vector_file(bytes, 4).has_value());
    CHECK_FALSE(decode_vector_file(bytes.substr(0, bytes.size() - 1), 3).has_value());
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_FALSE(decode_vector_file(bad, 3).has_value());
}

TEST_CASE("cached vectors are bit-identical to fresh ones") {
    const auto dir = std::filesystem::temp_directory_path() / "ctxpress_cache_unit";
    std::filesystem::remove_all(dir);
    ProviderConfig cfg;
    cfg.cache_dir = dir.string();
    const std::vector<std::string> texts{"Gamma rays burst.", "Delta waves sleep.", "the"};
    const auto fresh = LocalHashProvider(ProviderConfig{}).embed_batch(texts);
    const auto cold = LocalHashProvider(cfg).embed_batch(texts);
    const auto warm = LocalHashProvider(cfg).embed_batch(texts);
    CHECK(cold == fresh);
    CHECK(warm == fresh);
    std::size_t files = 0;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file()) ++files;
    CHECK(files == 2);  // the stopword-only text is a fallback and never cached
    CHECK(EmbeddingCache::key("a", 256, "t") != EmbeddingCache::key("a", 128, "t"));
    CHECK(EmbeddingCache::key("a", 256, "t") != EmbeddingCache::key("b", 256, "t"));
    std::filesystem::remove_all(dir);
}
