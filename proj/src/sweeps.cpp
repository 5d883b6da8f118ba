#include "ctxpress/sweeps.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "ctxpress/errors.hpp"
#include "ctxpress/evaluation.hpp"
#include "ctxpress/pipeline.hpp"

namespace ctxpress {
namespace {

class Accumulator {
public:
    void add(const EvalReport& r) {
        ++n_;
        cr_ += r.cr;
        topic_ += r.topic_coverage;
        bridge_ += r.bridge_retention;
        cycle_ += r.cycle_retention;
        if (r.rouge1) {
            ++n_ref_;
            r1_ += *r.rouge1;
            r2_ += *r.rouge2;
            rl_ += *r.rougeL;
        }
    }

    void fail() { ++failed_; }

    MetricMeans means() const {
        MetricMeans m;
        m.n_docs = n_;
        m.n_failed = failed_;
        if (n_ > 0) {
            const double n = static_cast<double>(n_);
            m.cr = cr_ / n;
            m.topic_coverage = topic_ / n;
            m.bridge_retention = bridge_ / n;
            m.cycle_retention = cycle_ / n;
        }
        if (n_ref_ > 0) {
            const double n = static_cast<double>(n_ref_);
            m.rouge1 = r1_ / n;
            m.rouge2 = r2_ / n;
            m.rougeL = rl_ / n;
        }
        return m;
    }

private:
    std::size_t n_ = 0, n_ref_ = 0, failed_ = 0;
    double cr_ = 0, topic_ = 0, bridge_ = 0, cycle_ = 0, r1_ = 0, r2_ = 0, rl_ = 0;
};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << std::fixed << v;
    return os.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

void write_metrics(std::ostream& out, const MetricMeans& m) {
    out << fmt(m.cr) << ',' << fmt(m.topic_coverage) << ',' << fmt(m.bridge_retention) << ','
        << fmt(m.cycle_retention) << ',' << fmt(m.rouge1) << ',' << fmt(m.rouge2) << ','
        << fmt(m.rougeL) << ',' << m.n_docs << '\n';
}

constexpr const char* kMetricColumns =
    "cr_mean,topic_coverage_mean,bridge_retention_mean,cycle_retention_mean,rouge1,rouge2,"
    "rougeL,n_docs";

std::optional<std::string_view> reference_of(const RawDocument& doc) {
    if (!doc.reference) return std::nullopt;
    return std::string_view(*doc.reference);
}

void note(std::vector<std::string>* diagnostics, const std::string& msg) {
    if (diagnostics) diagnostics->push_back(msg);
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Ours: return "ours";
        case Method::TextRank: return "textrank";
        case Method::Lead3: return "lead3";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (auto m : {Method::Ours, Method::TextRank, Method::Lead3})
        if (to_string(m) == name) return m;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<SweepRow> budget_sweep(std::span<const RawDocument> corpus,
                                   std::span<const double> ratios, std::span<const Method> methods,
                                   const PipelineConfig& config, const EmbeddingProvider& provider,
                                   std::vector<std::string>* diagnostics) {
    const PipelineConfig eff = effective_config(config);
    eff.validate();
    for (double r : ratios) BudgetSpec::of_ratio(r).validate();

    std::vector<Accumulator> cells(methods.size() * ratios.size());
    for (const auto& doc : corpus) {
        std::optional<DocumentAnalysis> analysis;
        try {
            analysis = analyze(doc, eff, provider);
        } catch (const std::exception& e) {
            note(diagnostics, doc.doc_id + ": " + e.what());
            for (auto& c : cells) c.fail();
            continue;
        }
        for (std::size_t m = 0; m < methods.size(); ++m) {
            for (std::size_t r = 0; r < ratios.size(); ++r) {
                PipelineConfig cell_cfg = eff;
                cell_cfg.budget = BudgetSpec::of_ratio(ratios[r]);
                CompressionResult result;
                switch (methods[m]) {
                    case Method::Ours: result = select(*analysis, cell_cfg); break;
                    case Method::TextRank:
                        result = baseline_textrank(analysis->sentences, analysis->embeddings,
                                                   cell_cfg.budget);
                        break;
                    case Method::Lead3: result = baseline_lead3(analysis->sentences, cell_cfg.budget); break;
                }
                cells[m * ratios.size() + r].add(
                    evaluate(result, analysis->topics, analysis->scores, reference_of(doc)));
            }
        }
    }

    std::vector<SweepRow> rows;
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (std::size_t r = 0; r < ratios.size(); ++r)
            rows.push_back({std::string(to_string(methods[m])), ratios[r],
                            cells[m * ratios.size() + r].means()});
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "method,rho," << kMetricColumns << '\n';
    for (const auto& row : rows) {
        out << row.method << ',' << fmt(row.rho) << ',';
        write_metrics(out, row.metrics);
    }
}

MetricMeans evaluate_corpus(std::span<const RawDocument> corpus, const PipelineConfig& config,
                            const EmbeddingProvider& provider,
                            std::vector<std::string>* diagnostics) {
    Accumulator acc;
    for (const auto& doc : corpus) {
        try {
            acc.add(compress_document(doc, config, provider).report);
        } catch (const std::exception& e) {
            note(diagnostics, doc.doc_id + ": " + e.what());
            acc.fail();
        }
    }
    return acc.means();
}

std::vector<AblationRow> ablation_grid(std::span<const RawDocument> corpus,
                                       const PipelineConfig& base,
                                       const EmbeddingProvider& provider,
                                       std::vector<std::string>* diagnostics) {
    const std::pair<const char*, std::optional<Ablation>> variants[] = {
        {"full", std::nullopt},
        {"w/o Seq", Ablation::NoSeq},
        {"w/o Rep", Ablation::NoRep},
        {"w/o Bridge", Ablation::NoBridge},
        {"w/o Cycle", Ablation::NoCycle},
        {"w/o NMS", Ablation::NoNms},
    };
    std::vector<AblationRow> rows;
    for (const auto& [label, ablation] : variants) {
        PipelineConfig cfg = base;
        cfg.ablations.clear();
        if (ablation) cfg.ablations.insert(*ablation);
        rows.push_back({label, cfg, evaluate_corpus(corpus, cfg, provider, diagnostics)});
    }
    return rows;
}

void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows) {
    out << "variant,rho," << kMetricColumns << '\n';
    for (const auto& row : rows) {
        out << row.variant << ','
            << fmt(row.config.budget.mode == BudgetMode::Ratio ? row.config.budget.ratio : 0.0)
            << ',';
        write_metrics(out, row.metrics);
    }
}

std::vector<SensitivitySetting> sensitivity_settings(const PipelineConfig& base,
                                                     std::span<const std::string> grids) {
    auto wanted = [&](std::string_view g) {
        if (grids.empty()) return true;
        for (const auto& x : grids)
            if (x == g) return true;
        return false;
    };
    for (const auto& g : grids)
        if (g != "k" && g != "tau" && g != "delta" && g != "weights")
            throw ConfigError("unknown sensitivity grid '" + g + "'");

    std::vector<SensitivitySetting> out;
    if (wanted("k"))
        for (std::size_t k : {4, 6, 8, 12}) {
            PipelineConfig c = base;
            c.graph.k = k;
            out.push_back({"k", "k=" + std::to_string(k), c});
        }
    if (wanted("tau"))
        for (const auto& [tau, label] : {std::pair{0.88, "tau=0.88"}, std::pair{0.90, "tau=0.90"},
                                         std::pair{0.92, "tau=0.92"}, std::pair{0.95, "tau=0.95"}}) {
            PipelineConfig c = base;
            c.selection.tau = tau;
            out.push_back({"tau", label, c});
        }
    if (wanted("delta"))
        for (std::size_t d : {0, 1, 2, 3}) {
            PipelineConfig c = base;
            c.graph.delta = d;
            out.push_back({"delta", "delta=" + std::to_string(d), c});
        }
    if (wanted("weights")) {
        // Structural share (1 - task) split as rep/bridge/cycle.
        struct Allocation {
            const char* name;
            double rep, bridge, cycle;
        };
        constexpr Allocation kRepHeavy{"Rep-heavy", 0.60, 0.30, 0.10};
        constexpr Allocation kBalanced{"Balanced", 0.50, 0.40, 0.10};
        constexpr Allocation kBridgeHeavy{"Bridge-heavy", 0.40, 0.50, 0.10};
        constexpr Allocation kFull{"Balanced (Full)", 0.50, 0.40, 0.10};
        constexpr Allocation kNoCycle{"Balanced (w/o Cycle)", 5.0 / 9.0, 4.0 / 9.0, 0.0};
        const std::pair<double, std::vector<Allocation>> scan[] = {
            {0.35, {kRepHeavy, kBalanced, kBridgeHeavy}},
            {0.45, {kFull, kRepHeavy, kBridgeHeavy, kNoCycle}},
            {0.55, {kRepHeavy, kBalanced, kBridgeHeavy}},
            {0.65, {kRepHeavy, kBalanced, kBridgeHeavy}},
        };
        for (const auto& [task, allocations] : scan) {
            for (const auto& a : allocations) {
                PipelineConfig c = base;
                const double rest = 1.0 - task;
                c.weights = {task, a.rep * rest, a.bridge * rest, a.cycle * rest};
                std::ostringstream label;
                label << "task=" << std::setprecision(2) << std::fixed << task << ' ' << a.name;
                out.push_back({"weights", label.str(), c});
            }
        }
    }
    return out;
}

std::vector<SensitivityRow> sensitivity_sweep(std::span<const RawDocument> corpus,
                                              const PipelineConfig& base,
                                              const EmbeddingProvider& provider,
                                              std::span<const std::string> grids,
                                              std::vector<std::string>* diagnostics) {
    std::vector<SensitivityRow> rows;
    for (auto& s : sensitivity_settings(base, grids)) {
        auto metrics = evaluate_corpus(corpus, s.config, provider, diagnostics);
        rows.push_back({std::move(s), metrics});
    }
    return rows;
}

void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityRow> rows) {
    out << "grid,setting,k,tau,delta,lambda_task,lambda_rep,lambda_bridge,lambda_cycle,rho,"
        << kMetricColumns << '\n';
    for (const auto& row : rows) {
        const auto& c = row.setting.config;
        out << row.setting.grid << ',' << row.setting.setting << ',' << c.graph.k << ','
            << fmt(c.selection.tau) << ',' << c.graph.delta << ',' << fmt(c.weights.task) << ','
            << fmt(c.weights.rep) << ',' << fmt(c.weights.bridge) << ',' << fmt(c.weights.cycle)
            << ',' << fmt(c.budget.mode == BudgetMode::Ratio ? c.budget.ratio : 0.0) << ',';
        write_metrics(out, row.metrics);
    }
}

}  // namespace ctxpress
