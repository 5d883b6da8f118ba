#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ctxpress/embedder.hpp"
#include "ctxpress/graph_builder.hpp"
#include "ctxpress/segmenter.hpp"
#include "ctxpress/selector.hpp"
#include "ctxpress/structural_scoring.hpp"
#include "ctxpress/topic_skeleton.hpp"

namespace ctxpress {

inline constexpr std::uint64_t kDefaultSeed = 2026;

/// Component switches for ablation runs.
enum class Ablation { NoSeq, NoRep, NoBridge, NoCycle, NoNms };

std::string_view to_string(Ablation a);
/// Accepts no_seq, no_rep, no_bridge, no_cycle, no_nms. Throws ConfigError.
Ablation parse_ablation(std::string_view name);

struct PipelineConfig {
    TokenizerSpec tokenizer;
    SegmenterOptions segmenter;
    ProviderConfig provider;
    GraphConfig graph;
    KMeansOptions clustering;
    ScoringWeights weights;
    ScoringOptions scoring;
    BudgetSpec budget;
    SelectionConfig selection;
    std::uint64_t seed = kDefaultSeed;
    std::set<Ablation> ablations;
    std::optional<std::string> query;

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// Config with ablations folded in and the run seed propagated:
/// no_seq -> alpha = 1, beta = 0; no_rep / no_bridge / no_cycle -> that
/// weight = 0; no_nms -> NMS off. Nothing else changes.
PipelineConfig effective_config(const PipelineConfig& config);

/// Parses the TOML-style key/value format on top of `base`.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config_file(const std::string& path, PipelineConfig base = {});

nlohmann::json config_to_json(const PipelineConfig& config);

}  // namespace ctxpress
