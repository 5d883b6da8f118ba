#include "ctxpress/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "ctxpress/errors.hpp"

namespace ctxpress {
namespace {

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& toks,
                                                            std::size_t n) {
    std::map<std::vector<std::string>, std::size_t> counts;
    for (std::size_t i = 0; i + n <= toks.size(); ++i)
        ++counts[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                          toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return counts;
}

double rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
               std::size_t n) {
    const std::size_t cand_total = cand.size() >= n ? cand.size() - n + 1 : 0;
    const std::size_t ref_total = ref.size() >= n ? ref.size() - n + 1 : 0;
    if (cand_total == 0 && ref_total == 0) return 1.0;
    if (cand_total == 0 || ref_total == 0) return 0.0;
    const auto cc = ngram_counts(cand, n);
    const auto rc = ngram_counts(ref, n);
    std::size_t overlap = 0;
    for (const auto& [gram, count] : cc) {
        const auto it = rc.find(gram);
        if (it != rc.end()) overlap += std::min(count, it->second);
    }
    return f1(static_cast<double>(overlap) / static_cast<double>(cand_total),
              static_cast<double>(overlap) / static_cast<double>(ref_total));
}

}  // namespace

double compression_ratio(std::size_t tokens_selected, std::size_t tokens_total) {
    if (tokens_total == 0) throw Error("compression ratio needs a non-empty document");
    return static_cast<double>(tokens_selected) / static_cast<double>(tokens_total);
}

double topic_coverage(std::span<const std::size_t> labels, std::span<const std::size_t> selected,
                      std::size_t k) {
    if (k == 0) return 0.0;
    std::set<std::size_t> hit;
    for (auto i : selected) hit.insert(labels[i]);
    return static_cast<double>(hit.size()) / static_cast<double>(k);
}

std::optional<double> default_bridge_threshold(std::span<const double> bridge) {
    std::vector<double> nonzero;
    for (double b : bridge)
        if (b > 0.0) nonzero.push_back(b);
    if (nonzero.empty()) return std::nullopt;
    std::sort(nonzero.begin(), nonzero.end());
    const std::size_t m = nonzero.size();
    return m % 2 ? nonzero[m / 2] : 0.5 * (nonzero[m / 2 - 1] + nonzero[m / 2]);
}

Retention structure_retention(const ScoreCard& card, std::span<const std::size_t> selected,
                              std::optional<double> bridge_threshold) {
    if (selected.empty()) return {};
    const auto threshold = bridge_threshold ? bridge_threshold : default_bridge_threshold(card.bridge);
    std::size_t bridges = 0;
    std::size_t cycles = 0;
    for (auto i : selected) {
        if (threshold && card.bridge[i] > *threshold) ++bridges;
        if (card.cycle[i] > 0.5) ++cycles;
    }
    const double m = static_cast<double>(selected.size());
    return {static_cast<double>(bridges) / m, static_cast<double>(cycles) / m};
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge(std::string_view candidate, std::string_view reference, RougeVariant variant) {
    const auto cand = lexical_tokens(candidate);
    const auto ref = lexical_tokens(reference);
    switch (variant) {
        case RougeVariant::One: return rouge_n(cand, ref, 1);
        case RougeVariant::Two: return rouge_n(cand, ref, 2);
        case RougeVariant::L: {
            if (cand.empty() && ref.empty()) return 1.0;
            if (cand.empty() || ref.empty()) return 0.0;
            const double lcs = static_cast<double>(lcs_length(cand, ref));
            return f1(lcs / static_cast<double>(cand.size()), lcs / static_cast<double>(ref.size()));
        }
    }
    return 0.0;
}

CompressionResult baseline_lead3(std::span<const Sentence> sentences, const BudgetSpec& budget) {
    budget.validate();
    const std::size_t n = sentences.size();
    CompressionResult result;
    result.budget = budget;
    result.tokens_total = total_tokens(sentences);
    result.budget_tokens = budget.effective(result.tokens_total);
    result.verdicts.assign(n, Verdict::NotReached);
    for (std::size_t i = 0; i < std::min<std::size_t>(3, n); ++i) {
        if (result.tokens_used + sentences[i].token_count > result.budget_tokens) {
            result.verdicts[i] = Verdict::BudgetSkipped;
            continue;
        }
        result.verdicts[i] = Verdict::Selected;
        result.selected_indices.push_back(i);
        result.tokens_used += sentences[i].token_count;
    }
    result.compressed_text = reassemble(sentences, result.selected_indices);
    if (n > 0 && result.selected_indices.empty()) {
        result.budget_too_small = true;
        result.warnings.push_back("BudgetTooSmall: no lead sentence fits the budget of " +
                                  std::to_string(result.budget_tokens) + " tokens");
    }
    return result;
}

TextRankScores textrank_scores(std::span<const Embedding> embeddings, double damping, double tol,
                               std::size_t max_iters) {
    const std::size_t n = embeddings.size();
    TextRankScores out;
    if (n == 0) return out;
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    std::vector<double> out_weight(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = std::max(0.0, cosine(embeddings[i], embeddings[j]));
            w[i][j] = w[j][i] = s;
            out_weight[i] += s;
            out_weight[j] += s;
        }
    const double base = (1.0 - damping) / static_cast<double>(n);
    std::vector<double> p(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    for (std::size_t it = 0; it < max_iters; ++it) {
        double dangling = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (out_weight[j] <= 0.0) dangling += p[j];
        for (std::size_t i = 0; i < n; ++i) {
            double in = dangling / static_cast<double>(n);
            for (std::size_t j = 0; j < n; ++j)
                if (w[j][i] > 0.0) in += w[j][i] / out_weight[j] * p[j];
            next[i] = base + damping * in;
        }
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff += std::abs(next[i] - p[i]);
        std::swap(p, next);
        out.iterations = it + 1;
        if (diff < tol) {
            out.converged = true;
            break;
        }
    }
    out.scores = std::move(p);
    return out;
}

CompressionResult baseline_textrank(std::span<const Sentence> sentences,
                                    std::span<const Embedding> embeddings,
                                    const BudgetSpec& budget, double damping, double tol,
                                    std::size_t max_iters) {
    const auto tr = textrank_scores(embeddings, damping, tol, max_iters);
    const auto order = rank(tr.scores);
    auto result = greedy_select(sentences, embeddings, order, budget, SelectionConfig{1.0, false});
    if (!tr.converged && sentences.size() > 1)
        result.warnings.push_back("NonConvergence: TextRank stopped after " +
                                  std::to_string(tr.iterations) + " iterations");
    return result;
}

EvalReport evaluate(const CompressionResult& result, const TopicModel& topics,
                    const ScoreCard& card, std::optional<std::string_view> reference) {
    EvalReport report;
    report.cr = result.tokens_total ? compression_ratio(result.tokens_used, result.tokens_total) : 0.0;
    report.budget_ok = result.tokens_used <= result.budget_tokens;
    report.topic_coverage = topic_coverage(topics.labels, result.selected_indices, topics.k);
    const auto retention = structure_retention(card, result.selected_indices);
    report.bridge_retention = retention.bridge;
    report.cycle_retention = retention.cycle;
    if (reference) {
        report.rouge1 = rouge(result.compressed_text, *reference, RougeVariant::One);
        report.rouge2 = rouge(result.compressed_text, *reference, RougeVariant::Two);
        report.rougeL = rouge(result.compressed_text, *reference, RougeVariant::L);
    }
    return report;
}

}  // namespace ctxpress
