#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ctxpress/embedder.hpp"
#include "ctxpress/segmenter.hpp"
#include "ctxpress/selector.hpp"
#include "ctxpress/structural_scoring.hpp"
#include "ctxpress/topic_skeleton.hpp"

namespace ctxpress {

struct EvalReport {
    double cr = 0.0;
    bool budget_ok = true;
    double topic_coverage = 0.0;
    double bridge_retention = 0.0;
    double cycle_retention = 0.0;
    std::optional<double> rouge1;
    std::optional<double> rouge2;
    std::optional<double> rougeL;
};

/// tokens_selected / tokens_total.
double compression_ratio(std::size_t tokens_selected, std::size_t tokens_total);

/// Fraction of the k clusters with at least one selected member.
double topic_coverage(std::span<const std::size_t> labels, std::span<const std::size_t> selected,
                      std::size_t k);

struct Retention {
    double bridge = 0.0;
    double cycle = 0.0;
};

/// Median of the nonzero bridge scores; nullopt when all are zero.
std::optional<double> default_bridge_threshold(std::span<const double> bridge);

/// Fractions of the selection that are bridge nodes (score strictly above the
/// threshold) and cycle-covered nodes. Empty selection gives zeros.
Retention structure_retention(const ScoreCard& card, std::span<const std::size_t> selected,
                              std::optional<double> bridge_threshold = std::nullopt);

enum class RougeVariant { One, Two, L };

/// F1 over lowercased whitespace-punct tokens, no stemming. Two texts with no
/// n-grams of the requested order score 1.
double rouge(std::string_view candidate, std::string_view reference, RougeVariant variant);

/// Length of the longest common subsequence.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// First three sentences, each kept only if it still fits the budget.
CompressionResult baseline_lead3(std::span<const Sentence> sentences, const BudgetSpec& budget);

struct TextRankScores {
    std::vector<double> scores;
    std::size_t iterations = 0;
    bool converged = false;
};

/// PageRank power iteration over the dense clamped-cosine similarity graph.
/// Dangling nodes spread their mass uniformly, so scores sum to 1.
TextRankScores textrank_scores(std::span<const Embedding> embeddings, double damping = 0.85,
                               double tol = 1e-6, std::size_t max_iters = 100);

/// TextRank ranking followed by the shared greedy budget walk with NMS off.
CompressionResult baseline_textrank(std::span<const Sentence> sentences,
                                    std::span<const Embedding> embeddings,
                                    const BudgetSpec& budget, double damping = 0.85,
                                    double tol = 1e-6, std::size_t max_iters = 100);

/// Full report for one selection against the document's topic model and score card.
EvalReport evaluate(const CompressionResult& result, const TopicModel& topics,
                    const ScoreCard& card, std::optional<std::string_view> reference);

}  // namespace ctxpress
