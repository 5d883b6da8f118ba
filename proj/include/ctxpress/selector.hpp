#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxpress/embedder.hpp"
#include "ctxpress/segmenter.hpp"
#include "ctxpress/structural_scoring.hpp"

namespace ctxpress {

enum class BudgetMode { Absolute, Ratio };

struct BudgetSpec {
    BudgetMode mode = BudgetMode::Ratio;
    std::size_t tokens = 0;  // absolute mode
    double ratio = 0.30;     // ratio mode

    void validate() const;
    /// Absolute tokens, or floor(ratio * total_tokens).
    std::size_t effective(std::size_t total_tokens) const;

    static BudgetSpec absolute(std::size_t tokens) { return {BudgetMode::Absolute, tokens, 0.0}; }
    static BudgetSpec of_ratio(double ratio) { return {BudgetMode::Ratio, 0, ratio}; }
};

struct SelectionConfig {
    double tau = 0.92;
    bool nms_enabled = true;

    void validate() const;
};

enum class Verdict { Selected, BudgetSkipped, NmsSuppressed, NotReached };

std::string_view to_string(Verdict v);

struct CompressionResult {
    std::vector<std::size_t> selected_indices;
    std::string compressed_text;
    std::size_t tokens_used = 0;
    std::size_t tokens_total = 0;
    std::size_t budget_tokens = 0;
    BudgetSpec budget;
    std::vector<Verdict> verdicts;  // one per sentence, by original index
    std::vector<std::string> warnings;
    bool budget_too_small = false;

    // Filled in by the pipeline.
    std::optional<ScoreCard> scores;
    std::vector<std::size_t> labels;
};

/// Indices by descending score, ties by ascending index.
std::vector<std::size_t> rank(std::span<const double> scores);

/// Walks `order` once: a candidate that would overflow the budget is skipped
/// (the walk continues), and with NMS on a candidate whose cosine to any
/// already-selected sentence is >= tau is suppressed. Once the budget is
/// exhausted the remaining candidates are marked NotReached.
CompressionResult greedy_select(std::span<const Sentence> sentences,
                                std::span<const Embedding> embeddings,
                                std::span<const std::size_t> order, const BudgetSpec& budget,
                                const SelectionConfig& config);

/// Selected sentence texts in index order joined by single spaces.
std::string reassemble(std::span<const Sentence> sentences, std::span<const std::size_t> indices);

std::size_t total_tokens(std::span<const Sentence> sentences);

}  // namespace ctxpress
