#include "codeattn/graph_metrics.hpp"

#include <algorithm>
#include <map>

#include "codeattn/csv.hpp"

namespace codeattn {

PRF PRF::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    PRF r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    const double s = r.precision + r.recall;
    r.f_score = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
    return r;
}

namespace {

void check_nodes(const Graph& a, const Graph& b) {
    if (a.n_nodes != b.n_nodes)
        throw Error("node sets differ: " + std::to_string(a.n_nodes) + " vs " + std::to_string(b.n_nodes) + " nodes");
}

// Both graphs in the same orientation as `model`.
Graph aligned_code(const Graph& model, const Graph& code) {
    if (model.directed) return code.as_directed();
    return code.as_undirected();
}

}  // namespace

PRF precision_recall_f(const Graph& model, const Graph& code) {
    check_nodes(model, code);
    const Graph c = aligned_code(model, code);
    const std::size_t tp = intersection_size(model.edges, c.edges);
    return PRF::from_counts(tp, model.edges.size() - tp, c.edges.size() - tp);
}

std::size_t graph_edit_distance(const Graph& a, const Graph& b) {
    check_nodes(a, b);
    const Graph c = aligned_code(a, b);
    const std::size_t common = intersection_size(a.edges, c.edges);
    return a.edges.size() + c.edges.size() - 2 * common;
}

double ged_per_node(const Graph& model, const Graph& code) {
    if (model.n_nodes == 0) throw Error("ged_per_node on an empty graph");
    return static_cast<double>(graph_edit_distance(model, code)) / static_cast<double>(model.n_nodes);
}

Aggregation parse_aggregation(std::string_view s) {
    if (s == "micro") return Aggregation::Micro;
    if (s == "macro") return Aggregation::Macro;
    throw Error("unknown aggregation '" + std::string(s) + "' (expected micro or macro)");
}

HeadSweep sweep_head(std::span<const Eigen::MatrixXf> attention, std::span<const Graph> code,
                     std::span<const double> taus, const SweepOptions& opts, int layer, int head) {
    if (attention.empty()) throw Error("sweep over an empty corpus");
    if (attention.size() != code.size()) throw Error("sweep: attention and code graph counts differ");
    if (taus.empty() || !std::is_sorted(taus.begin(), taus.end())) throw Error("sweep: thresholds must be sorted ascending");
    HeadSweep hs;
    hs.layer = layer;
    hs.head = head;
    for (const double tau : taus) {
        std::size_t tp = 0, fp = 0, fn = 0;
        double sp = 0.0, sr = 0.0, sf = 0.0;
        for (std::size_t s = 0; s < attention.size(); ++s) {
            const PRF r = precision_recall_f(binarize_matrix(attention[s], tau, opts.symmetrize), code[s]);
            tp += r.tp;
            fp += r.fp;
            fn += r.fn;
            sp += r.precision;
            sr += r.recall;
            sf += r.f_score;
        }
        PRF agg = PRF::from_counts(tp, fp, fn);
        if (opts.aggregation == Aggregation::Macro) {
            const auto n = static_cast<double>(attention.size());
            agg.precision = sp / n;
            agg.recall = sr / n;
            agg.f_score = sf / n;
        }
        hs.points.push_back({tau, agg});
    }
    for (std::size_t k = 1; k < hs.points.size(); ++k) {
        if (hs.points[k].prf.f_score > hs.points[hs.argmax].prf.f_score) hs.argmax = k;
    }
    return hs;
}

std::vector<int> best_head_per_layer(std::span<const HeadSweep> sweeps) {
    std::map<int, std::pair<int, double>> best;  // layer -> (head, f)
    for (const auto& s : sweeps) {
        if (s.points.empty()) throw Error("best_head_per_layer: empty sweep");
        const double f = s.best().prf.f_score;
        auto it = best.find(s.layer);
        if (it == best.end() || f > it->second.second || (f == it->second.second && s.head < it->second.first))
            best[s.layer] = {s.head, f};
    }
    std::vector<int> out;
    if (best.empty()) return out;
    out.assign(static_cast<std::size_t>(best.rbegin()->first + 1), -1);
    for (const auto& [layer, hf] : best) out[static_cast<std::size_t>(layer)] = hf.first;
    return out;
}

CodeGraphKind parse_code_graph_kind(std::string_view s) {
    if (s == "syntax") return CodeGraphKind::Syntax;
    if (s == "non-identifier") return CodeGraphKind::NonIdentifier;
    if (s == "dfg") return CodeGraphKind::Dfg;
    throw Error("unknown code graph '" + std::string(s) + "' (expected syntax, non-identifier or dfg)");
}

std::string_view to_string(CodeGraphKind k) {
    switch (k) {
        case CodeGraphKind::Syntax: return "syntax";
        case CodeGraphKind::NonIdentifier: return "non-identifier";
        case CodeGraphKind::Dfg: return "dfg";
    }
    return "syntax";
}

const Graph& CodeGraphSet::get(CodeGraphKind k) const {
    switch (k) {
        case CodeGraphKind::Syntax: return syntax;
        case CodeGraphKind::NonIdentifier: return non_identifier;
        case CodeGraphKind::Dfg: return dfg;
    }
    return syntax;
}

CodeGraphSet build_code_graphs(const Ast& ast) {
    CodeGraphSet g;
    g.syntax = syntax_graph(ast);
    g.non_identifier = non_identifier_graph(g.syntax, ast.tokens);
    g.dfg = data_flow_graph(ast).as_undirected();
    return g;
}

std::vector<CodeGraphSet> code_graphs_for_run(const ExtractionRun& run) {
    std::vector<CodeGraphSet> out;
    out.reserve(run.samples.size());
    for (const auto& s : run.samples) {
        if (!s.code) throw Error("sample '" + s.id + "': manifest carries no source code");
        Ast ast;
        try {
            ast = parse_ast(*s.code);
        } catch (const Error& e) {
            throw Error("sample '" + s.id + "': " + e.what());
        }
        if (ast.tokens.size() != s.code_tokens.size())
            throw Error("sample '" + s.id + "': parser found " + std::to_string(ast.tokens.size()) +
                        " code tokens, manifest lists " + std::to_string(s.code_tokens.size()));
        for (std::size_t k = 0; k < ast.tokens.size(); ++k) {
            if (ast.tokens[k].span != s.code_tokens[k].span)
                throw Error("sample '" + s.id + "': code token " + std::to_string(k) + " span differs from manifest");
        }
        out.push_back(build_code_graphs(ast));
    }
    return out;
}

std::vector<MetricRow> evaluate_run(const ExtractionRun& run, std::span<const CodeGraphSet> code,
                                    std::span<const double> taus, CodeGraphKind kind, const SweepOptions& opts) {
    if (code.size() != run.samples.size()) throw Error("evaluate_run: one code graph set per sample required");
    if (run.samples.empty()) throw Error("evaluate_run: run has no samples");
    std::vector<std::vector<MergedAttention<float>>> merged;
    merged.reserve(run.samples.size());
    for (std::size_t s = 0; s < run.samples.size(); ++s) merged.push_back(merged_heads(run, s));

    std::vector<Graph> target;
    for (const auto& c : code) target.push_back(c.get(kind));

    std::vector<MetricRow> rows;
    const auto n = run.samples.size();
    for (int l = 0; l < run.num_layers; ++l) {
        for (int h = 0; h < run.num_heads; ++h) {
            const std::size_t k = static_cast<std::size_t>(l * run.num_heads + h);
            std::vector<Eigen::MatrixXf> mats;
            mats.reserve(n);
            for (std::size_t s = 0; s < n; ++s) mats.push_back(merged[s][k].matrix);
            const HeadSweep hs = sweep_head(mats, target, taus, opts, l, h);
            for (const auto& pt : hs.points) {
                MetricRow row{run.model_id, l, h, pt.tau, pt.prf, 0.0, 0.0, 0.0};
                std::array<double, 3> sum_per_node{};
                std::array<std::size_t, 3> sum_ged{};
                std::size_t nodes = 0;
                for (std::size_t s = 0; s < n; ++s) {
                    const Graph m = binarize_matrix(mats[s], pt.tau, opts.symmetrize);
                    const std::array<const Graph*, 3> gs = {&code[s].syntax, &code[s].non_identifier, &code[s].dfg};
                    for (std::size_t g = 0; g < 3; ++g) {
                        const std::size_t d = graph_edit_distance(m, *gs[g]);
                        sum_ged[g] += d;
                        sum_per_node[g] += static_cast<double>(d) / static_cast<double>(m.n_nodes);
                    }
                    nodes += m.n_nodes;
                }
                std::array<double, 3> v{};
                for (std::size_t g = 0; g < 3; ++g) {
                    v[g] = opts.aggregation == Aggregation::Macro
                               ? sum_per_node[g] / static_cast<double>(n)
                               : static_cast<double>(sum_ged[g]) / static_cast<double>(nodes);
                }
                row.ged_per_node_syntax = v[0];
                row.ged_per_node_nonid = v[1];
                row.ged_per_node_dfg = v[2];
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::string metrics_csv(std::span<const MetricRow> rows) {
    std::string out =
        "model_id,layer,head,tau,precision,recall,f,ged_per_node_syntax,ged_per_node_nonid,ged_per_node_dfg\n";
    for (const auto& r : rows) {
        out += csv_cell(r.model_id) + ',' + std::to_string(r.layer) + ',' + std::to_string(r.head) + ',' +
               fmt_num(r.tau) + ',' + fmt_num(r.prf.precision) + ',' + fmt_num(r.prf.recall) + ',' +
               fmt_num(r.prf.f_score) + ',' + fmt_num(r.ged_per_node_syntax) + ',' + fmt_num(r.ged_per_node_nonid) +
               ',' + fmt_num(r.ged_per_node_dfg) + '\n';
    }
    return out;
}

std::vector<MetricRow> parse_metrics_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    std::vector<MetricRow> out;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& c = rows[k];
        if (c.size() != 10) throw Error("metrics CSV row " + std::to_string(k) + " has " + std::to_string(c.size()) + " cells");
        MetricRow r;
        r.model_id = c[0];
        r.layer = std::stoi(c[1]);
        r.head = std::stoi(c[2]);
        r.tau = std::stod(c[3]);
        r.prf.precision = std::stod(c[4]);
        r.prf.recall = std::stod(c[5]);
        r.prf.f_score = std::stod(c[6]);
        r.ged_per_node_syntax = std::stod(c[7]);
        r.ged_per_node_nonid = std::stod(c[8]);
        r.ged_per_node_dfg = std::stod(c[9]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace codeattn
