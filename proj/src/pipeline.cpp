#include "ctxpress/pipeline.hpp"

#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ctxpress/errors.hpp"
#include "ctxpress/hashing.hpp"

namespace ctxpress {
namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::string csv_number(std::optional<double> v) {
    if (!v) return {};
    std::ostringstream os;
    os << std::setprecision(6) << std::fixed << *v;
    return os.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
}

}  // namespace

DocumentAnalysis analyze(const RawDocument& doc, const PipelineConfig& config,
                         const EmbeddingProvider& provider) {
    DocumentAnalysis a;
    const Tokenizer tokenizer = stage("tokenizer", [&] { return Tokenizer(config.tokenizer); });
    a.sentences = stage("segment", [&] { return segment(doc, tokenizer, config.segmenter); });

    std::vector<std::string> texts;
    texts.reserve(a.sentences.size());
    for (const auto& s : a.sentences) texts.push_back(s.text);
    a.embeddings = stage("embed", [&] { return provider.embed_batch(texts); });
    const auto& query = doc.query ? doc.query : config.query;
    if (query && !query->empty()) a.query = stage("embed", [&] { return provider.embed_one(*query); });

    a.graph = stage("graph", [&] { return build_graph(a.embeddings, config.graph); });
    a.topics = stage("cluster", [&] {
        return fit_minibatch_kmeans(a.embeddings, choose_k(a.sentences.size()), config.clustering);
    });
    a.scores = stage("score", [&] {
        ScoringOptions opts = config.scoring;
        opts.sampling_seed = derive_stream_seed(config.scoring.sampling_seed, doc.doc_id);
        return score_sentences(a.embeddings, a.query, a.graph, a.topics, config.weights, opts);
    });
    return a;
}

CompressionResult select(const DocumentAnalysis& analysis, const PipelineConfig& config) {
    auto result = stage("select", [&] {
        const auto order = rank(analysis.scores.composite);
        return greedy_select(analysis.sentences, analysis.embeddings, order, config.budget,
                             config.selection);
    });
    result.scores = analysis.scores;
    result.labels = analysis.topics.labels;
    return result;
}

DocumentOutcome compress_document(const RawDocument& doc, const PipelineConfig& config,
                                  const EmbeddingProvider& provider) {
    const PipelineConfig eff = effective_config(config);
    stage("config", [&] { eff.validate(); return 0; });
    const auto analysis = analyze(doc, eff, provider);
    DocumentOutcome out{doc.doc_id, select(analysis, eff), {}};
    out.report = stage("evaluate", [&] {
        return evaluate(out.result, analysis.topics, analysis.scores,
                        doc.reference ? std::optional<std::string_view>(*doc.reference) : std::nullopt);
    });
    return out;
}

DocumentOutcome compress_document(const RawDocument& doc, const PipelineConfig& config) {
    const auto provider = stage("embed", [&] {
        return make_provider(config.provider, Tokenizer(config.tokenizer));
    });
    return compress_document(doc, config, *provider);
}

nlohmann::json outcome_to_json(const DocumentOutcome& o) {
    const auto& r = o.result;
    nlohmann::json budget = {{"mode", r.budget.mode == BudgetMode::Ratio ? "ratio" : "absolute"},
                             {"effective_tokens", r.budget_tokens},
                             {"total_tokens", r.tokens_total}};
    if (r.budget.mode == BudgetMode::Ratio) budget["ratio"] = r.budget.ratio;
    else budget["tokens"] = r.budget.tokens;

    nlohmann::json scores = nlohmann::json::array();
    nlohmann::json weights = nullptr;
    std::vector<std::string> warnings = r.warnings;
    if (r.scores) {
        const auto& c = *r.scores;
        for (std::size_t i = 0; i < c.size(); ++i)
            scores.push_back({{"task", c.task[i]},
                              {"rep", c.rep[i]},
                              {"bridge", c.bridge[i]},
                              {"cycle", c.cycle[i]},
                              {"composite", c.composite[i]}});
        weights = {{"task", c.weights.task},
                   {"rep", c.weights.rep},
                   {"bridge", c.weights.bridge},
                   {"cycle", c.weights.cycle}};
        warnings.insert(warnings.end(), c.warnings.begin(), c.warnings.end());
    }
    nlohmann::json verdicts = nlohmann::json::array();
    for (auto v : r.verdicts) verdicts.push_back(std::string(to_string(v)));

    nlohmann::json eval = {{"cr", o.report.cr},
                           {"budget_ok", o.report.budget_ok},
                           {"topic_coverage", o.report.topic_coverage},
                           {"bridge_retention", o.report.bridge_retention},
                           {"cycle_retention", o.report.cycle_retention}};
    if (o.report.rouge1) {
        eval["rouge1"] = *o.report.rouge1;
        eval["rouge2"] = *o.report.rouge2;
        eval["rougeL"] = *o.report.rougeL;
    }
    return {{"doc_id", o.doc_id},
            {"selected_indices", r.selected_indices},
            {"compressed_text", r.compressed_text},
            {"tokens_used", r.tokens_used},
            {"budget", budget},
            {"audit",
             {{"scores", scores},
              {"weights", weights},
              {"labels", r.labels},
              {"verdicts", verdicts},
              {"warnings", warnings}}},
            {"eval", eval}};
}

std::vector<CorpusEntry> read_corpus(std::istream& in) {
    std::vector<CorpusEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        CorpusEntry entry;
        entry.line = lineno;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            entry.error = "line " + std::to_string(lineno) + ": not a JSON object";
        } else if (!j.contains("doc_id") || !j["doc_id"].is_string() || !j.contains("text") ||
                   !j["text"].is_string()) {
            entry.error = "line " + std::to_string(lineno) + ": needs string fields doc_id and text";
        } else {
            RawDocument doc;
            doc.doc_id = j["doc_id"].get<std::string>();
            doc.text = j["text"].get<std::string>();
            if (j.contains("query") && j["query"].is_string()) doc.query = j["query"].get<std::string>();
            if (j.contains("reference") && j["reference"].is_string())
                doc.reference = j["reference"].get<std::string>();
            entry.doc = std::move(doc);
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<CorpusEntry> read_corpus_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read corpus '" + path.string() + "'");
    return read_corpus(in);
}

std::string result_file_stem(const std::string& doc_id) {
    std::string stem;
    for (unsigned char c : doc_id)
        stem.push_back(std::isalnum(c) || c == '-' || c == '_' || c == '.' ? static_cast<char>(c) : '_');
    if (stem.empty() || stem.front() == '.') stem.insert(0, "doc");
    if (stem != doc_id) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(doc_id)));
        stem += "-" + std::string(buf, 8);
    }
    return stem;
}

RunSummary run_corpus(const std::filesystem::path& corpus_path, const PipelineConfig& config,
                      const std::filesystem::path& out_dir, std::size_t jobs, std::ostream& log) {
    const auto entries = read_corpus_file(corpus_path);
    std::filesystem::create_directories(out_dir);
    const auto provider = make_provider(config.provider, Tokenizer(config.tokenizer));

    struct Slot {
        std::optional<DocumentOutcome> outcome;
        std::string error;
        std::size_t n_sentences = 0;
    };
    std::vector<Slot> slots(entries.size());
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!entries[i].doc) {
            slots[i].error = entries[i].error;
        } else if (!seen_ids.insert(entries[i].doc->doc_id).second) {
            slots[i].error = "line " + std::to_string(entries[i].line) + ": duplicate doc_id '" +
                             entries[i].doc->doc_id + "'";
        }
    }

    std::mutex log_mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            if (!slots[i].error.empty()) continue;
            const auto& doc = *entries[i].doc;
            try {
                auto outcome = compress_document(doc, config, *provider);
                slots[i].n_sentences = outcome.result.verdicts.size();
                std::ofstream out(out_dir / (result_file_stem(doc.doc_id) + ".json"));
                out << outcome_to_json(outcome).dump(2) << '\n';
                if (!out) throw Error("cannot write result file");
                slots[i].outcome = std::move(outcome);
                std::lock_guard lock(log_mu);
                log << "[ok] " << doc.doc_id << '\n';
            } catch (const std::exception& e) {
                slots[i].error = doc.doc_id + ": " + e.what();
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, entries.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    RunSummary summary;
    std::ofstream csv(out_dir / "summary.csv");
    csv << "doc_id,status,n_sentences,tokens_total,tokens_used,cr,topic_coverage,"
           "bridge_retention,cycle_retention,rouge1,rouge2,rougeL\n";
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const auto& s = slots[i];
        if (!s.outcome) {
            ++summary.failed;
            log << "[failed] " << s.error << '\n';
            const std::string id = entries[i].doc ? entries[i].doc->doc_id
                                                  : "line " + std::to_string(entries[i].line);
            csv << csv_field(id) << ",failed,,,,,,,,,,\n";
            continue;
        }
        ++summary.processed;
        const auto& o = *s.outcome;
        csv << csv_field(o.doc_id) << ",ok," << s.n_sentences << ',' << o.result.tokens_total << ','
            << o.result.tokens_used << ',' << csv_number(o.report.cr) << ','
            << csv_number(o.report.topic_coverage) << ',' << csv_number(o.report.bridge_retention)
            << ',' << csv_number(o.report.cycle_retention) << ',' << csv_number(o.report.rouge1)
            << ',' << csv_number(o.report.rouge2) << ',' << csv_number(o.report.rougeL) << '\n';
    }
    log << "processed " << summary.processed << ", failed " << summary.failed << '\n';
    return summary;
}

}  // namespace ctxpress
