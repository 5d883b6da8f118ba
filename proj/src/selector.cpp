#include "ctxpress/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctxpress/errors.hpp"

namespace ctxpress {

void BudgetSpec::validate() const {
    if (mode == BudgetMode::Ratio && !(ratio > 0.0 && ratio <= 1.0))
        throw ConfigError("compression ratio must be in (0, 1]");
}

std::size_t BudgetSpec::effective(std::size_t total) const {
    if (mode == BudgetMode::Absolute) return tokens;
    return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(total)));
}

void SelectionConfig::validate() const {
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("NMS threshold tau must be in (0, 1]");
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Selected: return "selected";
        case Verdict::BudgetSkipped: return "budget-skipped";
        case Verdict::NmsSuppressed: return "nms-suppressed";
        case Verdict::NotReached: return "not-reached";
    }
    return "unknown";
}

std::vector<std::size_t> rank(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

std::size_t total_tokens(std::span<const Sentence> sentences) {
    std::size_t total = 0;
    for (const auto& s : sentences) total += s.token_count;
    return total;
}

CompressionResult greedy_select(std::span<const Sentence> sentences,
                                std::span<const Embedding> embeddings,
                                std::span<const std::size_t> order, const BudgetSpec& budget,
                                const SelectionConfig& config) {
    budget.validate();
    if (config.nms_enabled) config.validate();
    const std::size_t n = sentences.size();
    if (order.size() != n) throw Error("candidate order must be a permutation of the sentences");
    if (config.nms_enabled && embeddings.size() != n)
        throw Error("NMS needs one embedding per sentence");

    CompressionResult result;
    result.budget = budget;
    result.tokens_total = total_tokens(sentences);
    result.budget_tokens = budget.effective(result.tokens_total);
    result.verdicts.assign(n, Verdict::NotReached);

    std::vector<bool> seen(n, false);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t i = order[pos];
        if (i >= n || seen[i]) throw Error("candidate order must be a permutation of the sentences");
        seen[i] = true;
        if (result.tokens_used == result.budget_tokens) continue;  // stays NotReached
        if (result.tokens_used + sentences[i].token_count > result.budget_tokens) {
            result.verdicts[i] = Verdict::BudgetSkipped;
            continue;
        }
        if (config.nms_enabled) {
            const bool redundant = std::any_of(
                result.selected_indices.begin(), result.selected_indices.end(),
                [&](std::size_t j) { return cosine(embeddings[i], embeddings[j]) >= config.tau; });
            if (redundant) {
                result.verdicts[i] = Verdict::NmsSuppressed;
                continue;
            }
        }
        result.verdicts[i] = Verdict::Selected;
        result.selected_indices.push_back(i);
        result.tokens_used += sentences[i].token_count;
    }

    std::sort(result.selected_indices.begin(), result.selected_indices.end());
    result.compressed_text = reassemble(sentences, result.selected_indices);
    if (n > 0 && result.selected_indices.empty()) {
        result.budget_too_small = true;
        result.warnings.push_back("BudgetTooSmall: no sentence fits the budget of " +
                                  std::to_string(result.budget_tokens) + " tokens");
    }
    return result;
}

std::string reassemble(std::span<const Sentence> sentences, std::span<const std::size_t> indices) {
    std::string out;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (k) out.push_back(' ');
        out += sentences[indices[k]].text;
    }
    return out;
}

}  // namespace ctxpress
