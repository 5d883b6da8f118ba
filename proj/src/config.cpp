#include "ctxpress/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ctxpress/errors.hpp"

namespace ctxpress {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing "# comment" that is not inside a quoted string.
std::string strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
        if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

struct Value {
    std::string raw;
    std::string where;

    [[noreturn]] void fail(const std::string& expected) const {
        throw ConfigError(where + ": expected " + expected + ", got '" + raw + "'");
    }

    std::string str() const {
        if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
            std::string out;
            for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
                if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
                out.push_back(raw[i]);
            }
            return out;
        }
        fail("a quoted string");
    }

    double number() const {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc{} || p != raw.data() + raw.size()) fail("a number");
        return v;
    }

    std::uint64_t count() const {
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc{} || p != raw.data() + raw.size()) fail("a non-negative integer");
        return v;
    }

    bool boolean() const {
        if (raw == "true") return true;
        if (raw == "false") return false;
        fail("true or false");
    }

    std::vector<std::string> strings() const {
        if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') fail("an array of strings");
        std::vector<std::string> out;
        std::stringstream ss(raw.substr(1, raw.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(Value{item, where}.str());
        }
        return out;
    }
};

void apply(PipelineConfig& c, const std::string& section, const std::string& key, const Value& v) {
    const std::string id = section.empty() ? key : section + "." + key;
    if (id == "seed") c.seed = v.count();
    else if (id == "query") c.query = v.str();
    else if (id == "ablations") {
        c.ablations.clear();
        for (const auto& a : v.strings()) c.ablations.insert(parse_ablation(a));
    }
    else if (id == "tokenizer.kind") {
        const auto kind = v.str();
        if (kind == "whitespace-punct") c.tokenizer.kind = TokenizerKind::WhitespacePunct;
        else if (kind == "vocab-file") c.tokenizer.kind = TokenizerKind::VocabFile;
        else v.fail("whitespace-punct or vocab-file");
    }
    else if (id == "tokenizer.vocab") c.tokenizer.vocab_path = v.str();
    else if (id == "segmenter.min_fragment_tokens") c.segmenter.min_fragment_tokens = v.count();
    else if (id == "provider.kind") {
        const auto kind = v.str();
        if (kind == "local-hash") c.provider.kind = ProviderKind::LocalHash;
        else if (kind == "remote-http") c.provider.kind = ProviderKind::RemoteHttp;
        else v.fail("local-hash or remote-http");
    }
    else if (id == "provider.dimension") c.provider.dimension = v.count();
    else if (id == "provider.batch_size") c.provider.batch_size = v.count();
    else if (id == "provider.parallelism") c.provider.parallelism = v.count();
    else if (id == "provider.endpoint") c.provider.endpoint = v.str();
    else if (id == "provider.api_key_env") c.provider.api_key_env = v.str();
    else if (id == "provider.bigrams") c.provider.bigram_features = v.boolean();
    else if (id == "provider.cache_dir") c.provider.cache_dir = v.str();
    else if (id == "provider.max_retries") c.provider.max_retries = static_cast<int>(v.count());
    else if (id == "graph.k") c.graph.k = v.count();
    else if (id == "graph.delta") c.graph.delta = v.count();
    else if (id == "graph.alpha") c.graph.alpha = v.number();
    else if (id == "graph.beta") c.graph.beta = v.number();
    else if (id == "graph.ann_threshold") c.graph.ann_threshold = v.count();
    else if (id == "clustering.batch_size") c.clustering.batch_size = v.count();
    else if (id == "clustering.max_iters") c.clustering.max_iters = v.count();
    else if (id == "weights.task") c.weights.task = v.number();
    else if (id == "weights.rep") c.weights.rep = v.number();
    else if (id == "weights.bridge") c.weights.bridge = v.number();
    else if (id == "weights.cycle") c.weights.cycle = v.number();
    else if (id == "scoring.max_cycles") c.scoring.max_cycles = v.count();
    else if (id == "scoring.bridge_samples") c.scoring.bridge_samples = v.count();
    else if (id == "budget.ratio") c.budget = BudgetSpec::of_ratio(v.number());
    else if (id == "budget.tokens") c.budget = BudgetSpec::absolute(v.count());
    else if (id == "selection.tau") c.selection.tau = v.number();
    else if (id == "selection.nms") c.selection.nms_enabled = v.boolean();
    else throw ConfigError(v.where + ": unknown key '" + id + "'");
}

}  // namespace

std::string_view to_string(Ablation a) {
    switch (a) {
        case Ablation::NoSeq: return "no_seq";
        case Ablation::NoRep: return "no_rep";
        case Ablation::NoBridge: return "no_bridge";
        case Ablation::NoCycle: return "no_cycle";
        case Ablation::NoNms: return "no_nms";
    }
    return "unknown";
}

Ablation parse_ablation(std::string_view name) {
    for (auto a : {Ablation::NoSeq, Ablation::NoRep, Ablation::NoBridge, Ablation::NoCycle,
                   Ablation::NoNms})
        if (to_string(a) == name) return a;
    throw ConfigError("unknown ablation '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
    graph.validate();
    weights.validate();
    budget.validate();
    selection.validate();
    if (provider.dimension == 0) throw ConfigError("provider dimension must be positive");
    if (provider.kind == ProviderKind::RemoteHttp && provider.endpoint.empty())
        throw ConfigError("remote-http provider needs an endpoint");
    if (tokenizer.kind == TokenizerKind::VocabFile && tokenizer.vocab_path.empty())
        throw ConfigError("vocab-file tokenizer needs a vocabulary path");
}

PipelineConfig effective_config(const PipelineConfig& config) {
    PipelineConfig c = config;
    for (const auto a : config.ablations) {
        switch (a) {
            case Ablation::NoSeq:
                c.graph.alpha = 1.0;
                c.graph.beta = 0.0;
                break;
            case Ablation::NoRep: c.weights.rep = 0.0; break;
            case Ablation::NoBridge: c.weights.bridge = 0.0; break;
            case Ablation::NoCycle: c.weights.cycle = 0.0; break;
            case Ablation::NoNms: c.selection.nms_enabled = false; break;
        }
    }
    c.clustering.seed = c.seed;
    c.graph.ann.seed = c.seed;
    c.scoring.sampling_seed = c.seed;
    return c;
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        const std::string where = "config line " + std::to_string(lineno);
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        apply(base, section, trim(std::string_view(body).substr(0, eq)),
              Value{trim(std::string_view(body).substr(eq + 1)), where});
    }
    return base;
}

PipelineConfig load_config_file(const std::string& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json ablations = nlohmann::json::array();
    for (auto a : c.ablations) ablations.push_back(std::string(to_string(a)));
    nlohmann::json budget = {{"mode", c.budget.mode == BudgetMode::Ratio ? "ratio" : "absolute"}};
    if (c.budget.mode == BudgetMode::Ratio) budget["ratio"] = c.budget.ratio;
    else budget["tokens"] = c.budget.tokens;
    return {
        {"seed", c.seed},
        {"tokenizer",
         {{"kind", c.tokenizer.kind == TokenizerKind::WhitespacePunct ? "whitespace-punct" : "vocab-file"},
          {"vocab", c.tokenizer.vocab_path}}},
        {"segmenter", {{"min_fragment_tokens", c.segmenter.min_fragment_tokens}}},
        {"provider",
         {{"kind", c.provider.kind == ProviderKind::LocalHash ? "local-hash" : "remote-http"},
          {"dimension", c.provider.dimension},
          {"max_input_tokens", c.provider.max_input_tokens},
          {"batch_size", c.provider.batch_size},
          {"bigrams", c.provider.bigram_features}}},
        {"graph",
         {{"k", c.graph.k},
          {"delta", c.graph.delta},
          {"alpha", c.graph.alpha},
          {"beta", c.graph.beta},
          {"ann_threshold", c.graph.ann_threshold}}},
        {"clustering", {{"batch_size", c.clustering.batch_size}, {"max_iters", c.clustering.max_iters}}},
        {"weights",
         {{"task", c.weights.task},
          {"rep", c.weights.rep},
          {"bridge", c.weights.bridge},
          {"cycle", c.weights.cycle}}},
        {"scoring", {{"max_cycles", c.scoring.max_cycles}, {"bridge_samples", c.scoring.bridge_samples}}},
        {"budget", budget},
        {"selection", {{"tau", c.selection.tau}, {"nms", c.selection.nms_enabled}}},
        {"ablations", ablations},
    };
}

}  // namespace ctxpress
