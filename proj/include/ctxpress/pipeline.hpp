#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctxpress/config.hpp"
#include "ctxpress/embedder.hpp"
#include "ctxpress/evaluation.hpp"
#include "ctxpress/graph_builder.hpp"
#include "ctxpress/segmenter.hpp"
#include "ctxpress/selector.hpp"
#include "ctxpress/structural_scoring.hpp"
#include "ctxpress/topic_skeleton.hpp"

namespace ctxpress {

/// Everything computed about a document before selection.
struct DocumentAnalysis {
    std::vector<Sentence> sentences;
    std::vector<Embedding> embeddings;
    std::optional<Embedding> query;
    HybridGraph graph;
    TopicModel topics;
    ScoreCard scores;
};

struct DocumentOutcome {
    std::string doc_id;
    CompressionResult result;
    EvalReport report;
};

/// segment -> embed -> graph -> cluster -> score. `config` must already be
/// effective (see effective_config). Module errors surface as StageError.
DocumentAnalysis analyze(const RawDocument& doc, const PipelineConfig& config,
                         const EmbeddingProvider& provider);

/// Greedy selection over an existing analysis, with the audit attached.
CompressionResult select(const DocumentAnalysis& analysis, const PipelineConfig& config);

/// Full pipeline including evaluation. Applies ablations itself.
DocumentOutcome compress_document(const RawDocument& doc, const PipelineConfig& config,
                                  const EmbeddingProvider& provider);
DocumentOutcome compress_document(const RawDocument& doc, const PipelineConfig& config);

nlohmann::json outcome_to_json(const DocumentOutcome& outcome);

/// One line of a JSONL corpus: either a document or a parse diagnostic.
struct CorpusEntry {
    std::size_t line = 0;
    std::optional<RawDocument> doc;
    std::string error;
};

/// Reads {doc_id, text, query?, reference?} objects, one per line. Blank
/// lines are ignored; malformed lines become entries with an error.
std::vector<CorpusEntry> read_corpus(std::istream& in);
std::vector<CorpusEntry> read_corpus_file(const std::filesystem::path& path);

struct RunSummary {
    std::size_t processed = 0;
    std::size_t failed = 0;

    bool ok() const noexcept { return failed == 0; }
};

/// Writes <out_dir>/<doc_id>.json per document and <out_dir>/summary.csv.
/// Failures are logged to `log` and the run continues.
RunSummary run_corpus(const std::filesystem::path& corpus_path, const PipelineConfig& config,
                      const std::filesystem::path& out_dir, std::size_t jobs, std::ostream& log);

/// File-system safe stem for a doc id.
std::string result_file_stem(const std::string& doc_id);

}  // namespace ctxpress
