// Command-line front end: compress, run, sweep, ablate, sensitivity.

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxpress/config.hpp"
#include "ctxpress/errors.hpp"
#include "ctxpress/pipeline.hpp"
#include "ctxpress/sweeps.hpp"

namespace {

using namespace ctxpress;

struct Overrides {
    std::string config_file;
    std::optional<double> budget_ratio;
    std::optional<std::size_t> budget_tokens;
    std::optional<std::size_t> k;
    std::optional<std::size_t> delta;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> tau;
    std::vector<double> weights;
    std::vector<std::string> ablate;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> provider;
    std::optional<std::string> endpoint;
    std::optional<std::size_t> dimension;
    std::optional<std::string> query;
    std::optional<std::string> cache_dir;
    std::optional<std::string> vocab;

    void attach(CLI::App& app) {
        app.add_option("--config", config_file, "TOML-style config file");
        auto* ratio = app.add_option("--budget-ratio", budget_ratio, "Compression ratio rho in (0,1]");
        app.add_option("--budget-tokens", budget_tokens, "Absolute token budget")->excludes(ratio);
        app.add_option("--k", k, "Semantic neighbors per sentence");
        app.add_option("--delta", delta, "Sequential edge window");
        app.add_option("--alpha", alpha, "Semantic fusion weight");
        app.add_option("--beta", beta, "Sequential fusion weight");
        app.add_option("--tau", tau, "NMS cosine threshold");
        app.add_option("--weights", weights, "task,rep,bridge,cycle")->delimiter(',')->expected(4);
        app.add_option("--ablate", ablate, "no_seq,no_rep,no_bridge,no_cycle,no_nms")->delimiter(',');
        app.add_option("--seed", seed, "Random seed");
        app.add_option("--provider", provider, "local-hash or remote-http")
            ->check(CLI::IsMember({"local-hash", "remote-http"}));
        app.add_option("--endpoint", endpoint, "Embedding service URL (remote-http)");
        app.add_option("--dimension", dimension, "Embedding dimension");
        app.add_option("--query", query, "Task query (per-document query fields take precedence)");
        app.add_option("--cache-dir", cache_dir, "Embedding cache directory");
        app.add_option("--vocab", vocab, "Vocabulary file for subword token counting");
    }

    PipelineConfig resolve() const {
        PipelineConfig c = config_file.empty() ? PipelineConfig{} : load_config_file(config_file);
        if (budget_ratio) c.budget = BudgetSpec::of_ratio(*budget_ratio);
        if (budget_tokens) c.budget = BudgetSpec::absolute(*budget_tokens);
        if (k) c.graph.k = *k;
        if (delta) c.graph.delta = *delta;
        if (alpha && beta) {
            c.graph.alpha = *alpha;
            c.graph.beta = *beta;
        } else if (alpha) {
            c.graph.alpha = *alpha;
            c.graph.beta = 1.0 - *alpha;
        } else if (beta) {
            c.graph.beta = *beta;
            c.graph.alpha = 1.0 - *beta;
        }
        if (tau) c.selection.tau = *tau;
        if (!weights.empty()) c.weights = {weights[0], weights[1], weights[2], weights[3]};
        if (!ablate.empty()) {
            c.ablations.clear();
            for (const auto& a : ablate) c.ablations.insert(parse_ablation(a));
        }
        if (seed) c.seed = *seed;
        if (provider) c.provider.kind = *provider == "remote-http" ? ProviderKind::RemoteHttp : ProviderKind::LocalHash;
        if (endpoint) c.provider.endpoint = *endpoint;
        if (dimension) c.provider.dimension = *dimension;
        if (query) c.query = *query;
        if (cache_dir) c.provider.cache_dir = *cache_dir;
        if (vocab) {
            c.tokenizer.kind = TokenizerKind::VocabFile;
            c.tokenizer.vocab_path = *vocab;
        }
        c.validate();
        return c;
    }
};

std::vector<RawDocument> load_documents(const std::string& path) {
    std::vector<RawDocument> docs;
    for (auto& e : read_corpus_file(path)) {
        if (e.doc) docs.push_back(std::move(*e.doc));
        else std::cerr << "[skipped] " << e.error << '\n';
    }
    return docs;
}

void write_to(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

void report(const std::vector<std::string>& diagnostics) {
    for (const auto& d : diagnostics) std::cerr << "[failed] " << d << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ctxpress: budgeted, structure-aware sentence selection for long contexts"};
    app.require_subcommand(1);

    Overrides compress_o, run_o, sweep_o, ablate_o, sens_o;

    auto* compress_cmd = app.add_subcommand("compress", "Compress one document (file or stdin)");
    compress_o.attach(*compress_cmd);
    std::string input, output, doc_id = "stdin", reference_file, graph_dump;
    compress_cmd->add_option("--input", input, "Input text file (default: stdin)");
    compress_cmd->add_option("--output", output, "Result JSON path (default: stdout)");
    compress_cmd->add_option("--doc-id", doc_id, "Document id");
    compress_cmd->add_option("--reference", reference_file, "Reference summary file for ROUGE");
    compress_cmd->add_option("--dump-graph", graph_dump, "Write the hybrid graph as JSON");
    bool text_only = false;
    compress_cmd->add_flag("--text", text_only, "Print only the compressed text");

    auto* run_cmd = app.add_subcommand("run", "Compress every document of a JSONL corpus");
    run_o.attach(*run_cmd);
    std::string corpus, out_dir;
    std::size_t jobs = 1;
    run_cmd->add_option("--corpus", corpus, "JSONL corpus")->required();
    run_cmd->add_option("--out", out_dir, "Output directory")->required();
    run_cmd->add_option("--jobs", jobs, "Parallel documents")->check(CLI::PositiveNumber);

    auto* sweep_cmd = app.add_subcommand("sweep", "Quality-budget table across methods and ratios");
    sweep_o.attach(*sweep_cmd);
    std::string sweep_corpus, sweep_out;
    std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<std::string> methods{"ours", "textrank", "lead3"};
    sweep_cmd->add_option("--corpus", sweep_corpus, "JSONL corpus")->required();
    sweep_cmd->add_option("--ratios", ratios, "Compression ratios")->delimiter(',');
    sweep_cmd->add_option("--methods", methods, "ours,textrank,lead3")->delimiter(',');
    sweep_cmd->add_option("--out", sweep_out, "CSV path (default: stdout)");

    auto* ablate_cmd = app.add_subcommand("ablate", "Component ablation table");
    ablate_o.attach(*ablate_cmd);
    std::string ablate_corpus, ablate_out;
    ablate_cmd->add_option("--corpus", ablate_corpus, "JSONL corpus")->required();
    ablate_cmd->add_option("--out", ablate_out, "CSV path (default: stdout)");

    auto* sens_cmd = app.add_subcommand("sensitivity", "Hyperparameter sensitivity grids");
    sens_o.attach(*sens_cmd);
    std::string sens_corpus, sens_out;
    std::vector<std::string> grids;
    sens_cmd->add_option("--corpus", sens_corpus, "JSONL corpus")->required();
    sens_cmd->add_option("--grids", grids, "Subset of k,tau,delta,weights")->delimiter(',');
    sens_cmd->add_option("--out", sens_out, "CSV path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*compress_cmd) {
            const auto cfg = compress_o.resolve();
            RawDocument doc;
            doc.doc_id = doc_id;
            if (input.empty()) {
                doc.text.assign(std::istreambuf_iterator<char>(std::cin), {});
            } else {
                std::ifstream in(input);
                if (!in) throw Error("cannot read '" + input + "'");
                doc.text.assign(std::istreambuf_iterator<char>(in), {});
            }
            if (!reference_file.empty()) {
                std::ifstream in(reference_file);
                if (!in) throw Error("cannot read '" + reference_file + "'");
                doc.reference = std::string(std::istreambuf_iterator<char>(in), {});
            }
            const auto provider = make_provider(cfg.provider, Tokenizer(cfg.tokenizer));
            if (!graph_dump.empty()) {
                const auto eff = effective_config(cfg);
                const auto analysis = analyze(doc, eff, *provider);
                write_to(graph_dump, graph_to_json(analysis.graph, eff.graph).dump(2) + "\n");
            }
            const auto outcome = compress_document(doc, cfg, *provider);
            for (const auto& w : outcome.result.warnings) std::cerr << "warning: " << w << '\n';
            write_to(output, text_only ? outcome.result.compressed_text + "\n"
                                       : outcome_to_json(outcome).dump(2) + "\n");
            return 0;
        }
        if (*run_cmd) {
            const auto summary = run_corpus(corpus, run_o.resolve(), out_dir, jobs, std::cerr);
            return summary.ok() ? 0 : 1;
        }
        if (*sweep_cmd) {
            const auto cfg = sweep_o.resolve();
            const auto provider = make_provider(cfg.provider, Tokenizer(cfg.tokenizer));
            std::vector<Method> ms;
            for (const auto& m : methods) ms.push_back(parse_method(m));
            std::vector<std::string> diagnostics;
            const auto rows = budget_sweep(load_documents(sweep_corpus), ratios, ms, cfg, *provider, &diagnostics);
            std::ostringstream csv;
            write_sweep_csv(csv, rows);
            write_to(sweep_out, csv.str());
            report(diagnostics);
            return diagnostics.empty() ? 0 : 1;
        }
        if (*ablate_cmd) {
            const auto cfg = ablate_o.resolve();
            const auto provider = make_provider(cfg.provider, Tokenizer(cfg.tokenizer));
            std::vector<std::string> diagnostics;
            const auto rows = ablation_grid(load_documents(ablate_corpus), cfg, *provider, &diagnostics);
            std::ostringstream csv;
            write_ablation_csv(csv, rows);
            write_to(ablate_out, csv.str());
            report(diagnostics);
            return diagnostics.empty() ? 0 : 1;
        }
        if (*sens_cmd) {
            const auto cfg = sens_o.resolve();
            const auto provider = make_provider(cfg.provider, Tokenizer(cfg.tokenizer));
            std::vector<std::string> diagnostics;
            const auto rows = sensitivity_sweep(load_documents(sens_corpus), cfg, *provider, grids, &diagnostics);
            std::ostringstream csv;
            write_sensitivity_csv(csv, rows);
            write_to(sens_out, csv.str());
            report(diagnostics);
            return diagnostics.empty() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
