#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctxpress/config.hpp"
#include "ctxpress/errors.hpp"
#include "ctxpress/pipeline.hpp"
#include "ctxpress/sweeps.hpp"
#include "synth.hpp"

using namespace ctxpress;

namespace {

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("default configuration") {
    const PipelineConfig c;
    CHECK(c.graph.k == 8);
    CHECK(c.graph.delta == 1);
    CHECK(c.graph.alpha == 0.25);
    CHECK(c.graph.beta == 0.75);
    CHECK(c.selection.tau == 0.92);
    CHECK(c.budget.mode == BudgetMode::Ratio);
    CHECK(c.budget.ratio == 0.30);
    CHECK(c.weights == ScoringWeights{0.45, 0.30, 0.20, 0.05});
    CHECK(c.seed == 2026);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config parsing") {
    const auto c = parse_config(R"(
# comment
seed = 7
ablations = ["no_seq", "no_nms"]

[graph]
k = 6
alpha = 0.4
beta = 0.6

[budget]
tokens = 120

[selection]
tau = 0.9
)");
    CHECK(c.seed == 7);
    CHECK(c.graph.k == 6);
    CHECK(c.graph.alpha == 0.4);
    CHECK(c.budget.mode == BudgetMode::Absolute);
    CHECK(c.budget.tokens == 120);
    CHECK(c.selection.tau == 0.9);
    CHECK(c.ablations == std::set<Ablation>{Ablation::NoSeq, Ablation::NoNms});
    CHECK_THROWS_AS(parse_config("[graph]\nkay = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("ablations = [\"no_everything\"]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[graph]\nk = -1\n"), ConfigError);
}

TEST_CASE("ablations fold into the effective configuration") {
    PipelineConfig c;
    c.seed = 99;
    c.ablations = {Ablation::NoSeq, Ablation::NoBridge, Ablation::NoNms};
    const auto e = effective_config(c);
    CHECK(e.graph.alpha == 1.0);
    CHECK(e.graph.beta == 0.0);
    CHECK(e.weights.bridge == 0.0);
    CHECK(e.weights.task == 0.45);
    CHECK(e.weights.rep == 0.30);
    CHECK(e.weights.cycle == 0.05);
    CHECK_FALSE(e.selection.nms_enabled);
    CHECK(e.clustering.seed == 99);
    CHECK(e.scoring.sampling_seed == 99);
}

TEST_CASE("compress_document produces a consistent outcome") {
    const auto doc = synth::topic_document(3, 3, 10);
    const auto a = compress_document(doc, PipelineConfig{});
    const auto b = compress_document(doc, PipelineConfig{});
    CHECK(outcome_to_json(a).dump() == outcome_to_json(b).dump());
    CHECK(a.result.tokens_used <= a.result.budget_tokens);
    CHECK(a.report.cr <= 0.30);
    CHECK(a.report.budget_ok);
    REQUIRE(a.result.scores.has_value());
    CHECK(a.result.scores->size() == a.result.verdicts.size());

    const auto j = outcome_to_json(a);
    for (const char* key : {"doc_id", "selected_indices", "compressed_text", "tokens_used", "budget", "audit", "eval"})
        CHECK(j.contains(key));
    CHECK(j["audit"]["scores"].size() == a.result.verdicts.size());
    CHECK_FALSE(j["eval"].contains("rouge1"));
}

TEST_CASE("reference enables rouge; query drives task relevance") {
    auto doc = synth::topic_document(4, 2, 6);
    doc.reference = doc.text;
    PipelineConfig c;
    c.budget = BudgetSpec::of_ratio(1.0);
    c.selection.nms_enabled = false;
    const auto full = compress_document(doc, c);
    CHECK(full.report.rouge1 == doctest::Approx(1.0));
    CHECK(full.report.rougeL == doctest::Approx(1.0));

    const auto sentences = segment(doc, 3);
    doc.query = sentences[7].text;
    const auto q = compress_document(doc, PipelineConfig{});
    CHECK(q.result.scores->task[7] == doctest::Approx(1.0));
}

TEST_CASE("stage errors name the failing stage") {
    try {
        compress_document(RawDocument{"empty", "   ", {}, {}}, PipelineConfig{});
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(std::string(e.stage()) == "segment");
    }
}

TEST_CASE("corpus reader reports malformed lines") {
    std::istringstream in(
        "{\"doc_id\": \"a\", \"text\": \"One two three. Four five six.\"}\n"
        "\n"
        "not json\n"
        "{\"text\": \"missing id\"}\n"
        "{\"doc_id\": \"b\", \"text\": \"Seven eight nine.\", \"query\": \"q\", \"reference\": \"r\"}\n");
    const auto entries = read_corpus(in);
    REQUIRE(entries.size() == 4);
    CHECK(entries[0].doc->doc_id == "a");
    CHECK_FALSE(entries[1].doc.has_value());
    CHECK(entries[1].line == 3);
    CHECK_FALSE(entries[2].doc.has_value());
    CHECK(entries[3].doc->query == "q");
    CHECK(entries[3].doc->reference == "r");
}

TEST_CASE("corpus run writes per-document results and a summary") {
    const auto dir = fresh_dir("ctxpress_run_unit");
    std::filesystem::create_directories(dir);
    const auto corpus = dir / "corpus.jsonl";
    {
        std::ofstream out(corpus);
        out << nlohmann::json{{"doc_id", "d/1"}, {"text", synth::topic_document(1, 2, 5).text}}.dump() << '\n';
        out << nlohmann::json{{"doc_id", "empty"}, {"text", ""}}.dump() << '\n';
        out << nlohmann::json{{"doc_id", "d2"}, {"text", synth::topic_document(2, 2, 5).text}}.dump() << '\n';
    }
    std::ostringstream log;
    const auto summary = run_corpus(corpus, PipelineConfig{}, dir / "out", 2, log);
    CHECK(summary.processed == 2);
    CHECK(summary.failed == 1);
    CHECK_FALSE(summary.ok());
    CHECK(std::filesystem::exists(dir / "out" / (result_file_stem("d/1") + ".json")));
    CHECK(std::filesystem::exists(dir / "out" / "d2.json"));
    std::ifstream csv(dir / "out" / "summary.csv");
    std::stringstream ss;
    ss << csv.rdbuf();
    CHECK(count_lines(ss.str()) == 4);
    CHECK(log.str().find("empty") != std::string::npos);
    CHECK(ss.str().find("empty,failed") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep and ablation tables have the expected shape") {
    const std::vector<RawDocument> corpus{synth::topic_document(5, 3, 6), synth::topic_document(6, 2, 8)};
    LocalHashProvider provider(ProviderConfig{});
    const std::vector<double> ratios{0.1, 0.3, 0.5};
    const std::vector<Method> methods{Method::Ours, Method::TextRank, Method::Lead3};
    const auto rows = budget_sweep(corpus, ratios, methods, PipelineConfig{}, provider);
    CHECK(rows.size() == 9);
    for (const auto& r : rows) {
        CHECK(r.metrics.n_docs == 2);
        CHECK(r.metrics.cr <= r.rho + 1e-12);
    }
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    CHECK(count_lines(csv.str()) == 10);

    const auto abl = ablation_grid(corpus, PipelineConfig{}, provider);
    CHECK(abl.size() == 6);
    std::ostringstream acsv;
    write_ablation_csv(acsv, abl);
    CHECK(count_lines(acsv.str()) == 7);
}

TEST_CASE("identity sweep against the original text") {
    auto doc = synth::topic_document(8, 2, 5);
    doc.reference = doc.text;
    const std::vector<RawDocument> corpus{doc};
    PipelineConfig c;
    c.ablations = {Ablation::NoNms};
    LocalHashProvider provider(ProviderConfig{});
    const std::vector<double> ratios{1.0};
    const std::vector<Method> methods{Method::Ours};
    const auto rows = budget_sweep(corpus, ratios, methods, c, provider);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].metrics.cr <= 1.0);
    CHECK(*rows[0].metrics.rouge1 == doctest::Approx(1.0));
}

TEST_CASE("sensitivity settings cover the four grids") {
    const auto all = sensitivity_settings(PipelineConfig{});
    std::map<std::string, std::size_t> per_grid;
    for (const auto& s : all) {
        ++per_grid[s.grid];
        CHECK_NOTHROW(s.config.validate());
        CHECK(s.config.weights.sums_to_one(1e-9));
    }
    CHECK(per_grid["k"] == 4);
    CHECK(per_grid["tau"] == 4);
    CHECK(per_grid["delta"] == 4);
    CHECK(per_grid["weights"] == 13);
    const std::vector<std::string> only_k{"k"};
    CHECK(sensitivity_settings(PipelineConfig{}, only_k).size() == 4);
}
