#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxpress/config.hpp"
#include "ctxpress/embedder.hpp"
#include "ctxpress/segmenter.hpp"

namespace ctxpress {

enum class Method { Ours, TextRank, Lead3 };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Corpus means for one (configuration, method, ratio) cell. ROUGE means
/// cover only documents that carry a reference.
struct MetricMeans {
    double cr = 0.0;
    double topic_coverage = 0.0;
    double bridge_retention = 0.0;
    double cycle_retention = 0.0;
    std::optional<double> rouge1;
    std::optional<double> rouge2;
    std::optional<double> rougeL;
    std::size_t n_docs = 0;
    std::size_t n_failed = 0;
};

struct SweepRow {
    std::string method;
    double rho = 0.0;
    MetricMeans metrics;
};

/// Every method at every ratio. Each document is analyzed once; baselines are
/// evaluated against the same topic model and score card. Rows are ordered
/// by method, then ratio, in the order given.
std::vector<SweepRow> budget_sweep(std::span<const RawDocument> corpus,
                                   std::span<const double> ratios, std::span<const Method> methods,
                                   const PipelineConfig& config, const EmbeddingProvider& provider,
                                   std::vector<std::string>* diagnostics = nullptr);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

struct AblationRow {
    std::string variant;
    PipelineConfig config;
    MetricMeans metrics;
};

/// Full model plus each single-component ablation.
std::vector<AblationRow> ablation_grid(std::span<const RawDocument> corpus,
                                       const PipelineConfig& base,
                                       const EmbeddingProvider& provider,
                                       std::vector<std::string>* diagnostics = nullptr);

void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows);

struct SensitivitySetting {
    std::string grid;     // k, tau, delta, weights
    std::string setting;  // row label
    PipelineConfig config;
};

/// The hyperparameter grids: k in {4,6,8,12}, tau in {0.88,0.90,0.92,0.95},
/// delta in {0,1,2,3}, and the 13-row joint weight scan.
std::vector<SensitivitySetting> sensitivity_settings(const PipelineConfig& base,
                                                     std::span<const std::string> grids = {});

struct SensitivityRow {
    SensitivitySetting setting;
    MetricMeans metrics;
};

std::vector<SensitivityRow> sensitivity_sweep(std::span<const RawDocument> corpus,
                                              const PipelineConfig& base,
                                              const EmbeddingProvider& provider,
                                              std::span<const std::string> grids = {},
                                              std::vector<std::string>* diagnostics = nullptr);

void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityRow> rows);

/// Runs the full pipeline with `config` over the corpus and averages metrics.
MetricMeans evaluate_corpus(std::span<const RawDocument> corpus, const PipelineConfig& config,
                            const EmbeddingProvider& provider,
                            std::vector<std::string>* diagnostics = nullptr);

}  // namespace ctxpress
