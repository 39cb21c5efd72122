// codeattn: code graphs, attention-graph comparison, probing and report tooling.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "codeattn/code_graphs.hpp"
#include "codeattn/csv.hpp"
#include "codeattn/direct_probe.hpp"
#include "codeattn/extraction_run.hpp"
#include "codeattn/graph_metrics.hpp"
#include "codeattn/model_graphs.hpp"
#include "codeattn/probe_datasets.hpp"
#include "codeattn/report.hpp"
#include "codeattn/tsne.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace codeattn;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + out);
    f << text;
}

std::vector<double> parse_taus(const std::string& s) {
    if (s.empty()) return kDefaultTaus;
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            if (!(v > 0.0 && v <= 1.0)) throw Error("threshold " + item + " outside (0, 1]");
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw Error("bad threshold '" + item + "'");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Programs from a .py file or a JSONL file of {"id", "code"} records.
std::vector<std::pair<std::string, std::string>> read_corpus(const fs::path& p) {
    std::vector<std::pair<std::string, std::string>> out;
    if (p.extension() == ".jsonl") {
        std::ifstream in(p);
        if (!in) throw Error("cannot read " + p.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                const json j = json::parse(line);
                out.emplace_back(j.at("id").get<std::string>(), j.at("code").get<std::string>());
            } catch (const json::exception& e) {
                throw Error(p.string() + " line " + std::to_string(lineno) + ": " + e.what());
            }
        }
        return out;
    }
    out.emplace_back(p.stem().string(), slurp(p));
    return out;
}

std::string graphs_record(const std::string& id, const std::string& code) {
    json j;
    j["id"] = id;
    try {
        const Ast ast = parse_ast(code);
        json toks = json::array();
        for (std::size_t k = 0; k < ast.tokens.size(); ++k) {
            const auto& t = ast.tokens[k];
            toks.push_back({{"text", t.text},
                            {"start_byte", t.span.begin},
                            {"end_byte", t.span.end},
                            {"category", to_string(t.category)}});
        }
        j["tokens"] = toks;
        const auto syn = syntax_graph(ast);
        j["syntax"] = json::parse(graph_to_json(syn));
        j["non_identifier"] = json::parse(graph_to_json(non_identifier_graph(syn, ast.tokens)));
        const auto dfg = data_flow_graph(ast);
        j["dfg"] = json::parse(dfg_to_json(dfg));
        json diags = json::array();
        for (const auto& d : dfg.diagnostics) diags.push_back({{"byte_offset", d.byte_offset}, {"message", d.message}});
        j["diagnostics"] = diags;
    } catch (const Error& e) {
        j["error"] = e.what();
    }
    return j.dump() + '\n';
}

// Prepends the config file's settings so that explicit flags, parsed later, win.
std::vector<std::string> expand_config(int argc, char** argv, const std::set<std::string>& top,
                                       const std::set<std::string>& probe_modes) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) {
            config = args[k + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k) + 2);
            break;
        }
        if (args[k].rfind("--config=", 0) == 0) {
            config = args[k].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
            break;
        }
    }
    if (config.empty()) return args;

    json cfg;
    try {
        cfg = json::parse(slurp(config));
    } catch (const json::exception& e) {
        throw Error("config " + config + ": " + e.what());
    }
    if (!cfg.is_object()) throw Error("config " + config + ": expected a JSON object of flag names to values");
    std::vector<std::string> flags;
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) flags.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
            flags.push_back(flag);
            flags.push_back(joined);
        } else {
            flags.push_back(flag);
            flags.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    std::size_t at = 0;
    if (at < args.size() && top.count(args[at])) {
        ++at;
        if (args[at - 1] == "probe" && at < args.size() && probe_modes.count(args[at])) ++at;
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), flags.begin(), flags.end());
    return args;
}

struct Common {
    std::string run;
    std::string symmetrize = "max";
    std::string aggregation = "micro";
    std::string code_graph = "syntax";
    std::string out;
};

void add_metric_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--run", c.run, "extraction run directory")->required();
    cmd->add_option("--code-graph", c.code_graph, "syntax | non-identifier | dfg");
    cmd->add_option("--symmetrize", c.symmetrize, "max | mean | directed");
    cmd->add_option("--aggregation", c.aggregation, "micro | macro");
    cmd->add_option("--out", c.out, "output file (default stdout)");
}

std::string run_metrics(const Common& c, const std::vector<double>& taus) {
    const ExtractionRun run = load_run(c.run);
    for (const auto& d : run_diagnostics(run)) std::cerr << "warning: " << d << '\n';
    const auto code = code_graphs_for_run(run);
    SweepOptions opts;
    opts.symmetrize = parse_symmetrize(c.symmetrize);
    opts.aggregation = parse_aggregation(c.aggregation);
    const auto rows = evaluate_run(run, code, taus, parse_code_graph_kind(c.code_graph), opts);
    return metrics_csv(rows);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"codeattn: compare attention graphs with code graphs and probe hidden states"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.add_option("--config", "JSON file whose keys mirror the flags; flags win");

    std::string corpus, graphs_out;
    auto* graphs = app.add_subcommand("graphs", "syntax, non-identifier and data-flow graphs of Python programs (JSONL)");
    graphs->add_option("corpus,--corpus", corpus, ".py file or JSONL of {\"id\", \"code\"}")->required();
    graphs->add_option("--out", graphs_out, "output file (default stdout)");

    Common cmp;
    double tau = 0.05;
    auto* compare = app.add_subcommand("compare", "precision, recall, F and GED per head at one threshold");
    add_metric_options(compare, cmp);
    compare->add_option("--tau", tau, "attention threshold in (0, 1]");

    Common swp;
    std::string taus, histogram_out;
    auto* sweep = app.add_subcommand("sweep", "metrics per head over a threshold grid");
    add_metric_options(sweep, swp);
    sweep->add_option("--taus", taus, "comma separated thresholds (default 0.01,0.03,0.05,0.075,0.1,0.15,0.2,0.3)");
    sweep->add_option("--histogram", histogram_out, "also write the attention-value histogram per layer (CSV)");

    std::string p_run, p_task = "distance", p_pairing = "keyword-all", p_out, p_dataset, p_assign = "nearest-member";
    int p_layer = 0;
    std::uint64_t p_seed = 7;
    std::size_t p_per_label = 0, p_codes = 0;
    auto* probe = app.add_subcommand("probe", "probe datasets and DirectProbe-style clustering");
    probe->require_subcommand(1);
    auto* probe_build = probe->add_subcommand("build", "select token pairs and write a dataset directory");
    auto* probe_run = probe->add_subcommand("run", "cluster a dataset and evaluate on its held-out split");
    for (auto* cmd : {probe_build, probe_run}) {
        cmd->add_option("--run", p_run, "extraction run directory");
        cmd->add_option("--task", p_task, "distance | siblings | dfg");
        cmd->add_option("--pairing", p_pairing, "keyword-all | keyword-identifier");
        cmd->add_option("--layer", p_layer, "hidden-state layer (0 = embeddings)");
        cmd->add_option("--seed", p_seed, "selection seed");
        cmd->add_option("--per-label", p_per_label, "override the per-label quota");
        cmd->add_option("--codes", p_codes, "override the number of programs sampled");
        cmd->add_option("--out", p_out, cmd == probe_build ? "dataset directory" : "result file (JSON, default stdout)");
    }
    probe_build->get_option("--out")->required();
    probe_build->get_option("--run")->required();
    probe_run->add_option("--dataset", p_dataset, "dataset directory written by 'probe build' (instead of --run)");
    probe_run->add_option("--assign", p_assign, "nearest-member | centroid");

    std::string e_run, e_out, e_sample;
    int e_layer = 0, e_max_iter = 5000;
    double e_perplexity = 30.0;
    std::uint64_t e_seed = 7;
    std::size_t e_max_points = 5000;
    auto* embed = app.add_subcommand("embed", "2-D t-SNE of code-token hidden states, or of one program's AST distances");
    embed->add_option("--run", e_run, "extraction run directory")->required();
    embed->add_option("--layer", e_layer, "hidden-state layer (0 = embeddings)");
    embed->add_option("--perplexity", e_perplexity, "in [5, 50]");
    embed->add_option("--max-iter", e_max_iter, "at most 50000");
    embed->add_option("--seed", e_seed, "initialisation seed");
    embed->add_option("--max-points", e_max_points, "cap on embedded tokens");
    embed->add_option("--ast-sample", e_sample, "embed this sample's AST distance matrix instead");
    embed->add_option("--out", e_out, "output CSV (default stdout)");

    std::string r_in, r_out;
    auto* report = app.add_subcommand("report", "CSV/JSON/SVG tables from *.metrics.csv and *.probe.json files");
    report->add_option("--in", r_in, "results directory")->required();
    report->add_option("--out", r_out, "output directory")->required();

    try {
        auto args = expand_config(argc, argv, {"graphs", "compare", "sweep", "probe", "embed", "report"}, {"build", "run"});
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*graphs) {
            std::string text;
            for (const auto& [id, code] : read_corpus(corpus)) text += graphs_record(id, code);
            emit(graphs_out, text);
        } else if (*compare) {
            if (!(tau > 0.0 && tau <= 1.0)) throw Error("--tau must lie in (0, 1]");
            emit(cmp.out, run_metrics(cmp, {tau}));
        } else if (*sweep) {
            emit(swp.out, run_metrics(swp, parse_taus(taus)));
            if (!histogram_out.empty()) {
                const auto h = histogram(load_run(swp.run));
                std::string t = "layer,bin,count,percent\n";
                for (std::size_t l = 0; l < h.per_layer.size(); ++l) {
                    const auto pct = h.per_layer[l].percentages();
                    for (std::size_t b = 0; b < 4; ++b)
                        t += std::to_string(l) + ',' + std::string(HistogramBins::kNames[b]) + ',' +
                             std::to_string(h.per_layer[l].counts[b]) + ',' + fmt_num(pct[b]) + '\n';
                }
                emit(histogram_out, t);
            }
        } else if (*probe) {
            ProbeDataset ds;
            if (*probe_run && !p_dataset.empty()) {
                ds = read_dataset(p_dataset);
            } else {
                if (p_run.empty()) throw Error("probe needs --run (or --dataset for 'probe run')");
                const ExtractionRun run = load_run(p_run);
                const ProbeTask task = parse_probe_task(p_task);
                const Pairing pairing = parse_pairing(p_pairing);
                DatasetQuota q = default_quota(task, pairing);
                if (p_per_label) q.per_label = p_per_label;
                if (p_codes) q.codes = p_codes;
                const auto sel = select_pairs(corpus_from_run(run), task, pairing, p_seed, q);
                ds = materialize(sel, run, p_layer);
            }
            if (*probe_build) {
                write_dataset(ds, p_out);
            } else {
                const auto cs = direct_probe(ds.train.cast<double>(), ds.train_labels());
                const auto r = evaluate_probe(cs, ds.test.cast<double>(), ds.test_labels(), parse_assign_rule(p_assign));
                emit(p_out, probe_row_json(make_probe_row(ds, r)));
            }
        } else if (*embed) {
            const ExtractionRun run = load_run(e_run);
            TsneOptions opts;
            opts.perplexity = e_perplexity;
            opts.max_iter = e_max_iter;
            opts.seed = e_seed;
            Embedding2D emb;
            std::vector<std::string> labels;
            if (!e_sample.empty()) {
                const auto it = std::find_if(run.samples.begin(), run.samples.end(),
                                             [&](const RunSample& s) { return s.id == e_sample; });
                if (it == run.samples.end()) throw Error("no sample '" + e_sample + "' in the run");
                if (!it->code) throw Error("sample '" + e_sample + "': manifest carries no source code");
                const Ast ast = parse_ast(*it->code);
                emb = embed_2d_precomputed(ast_distance_matrix(ast).cast<double>(), opts);
                for (const auto& t : ast.tokens) labels.push_back(t.text);
            } else {
                if (e_layer < 0 || e_layer > run.num_layers) throw Error("--layer outside 0.." + std::to_string(run.num_layers));
                std::vector<Eigen::VectorXd> rows;
                for (std::size_t s = 0; s < run.samples.size() && rows.size() < e_max_points; ++s) {
                    const auto h = merge_hidden(run.hidden(s, e_layer), run.samples[s].alignment, e_layer);
                    for (Eigen::Index i = 0; i < h.vectors.rows() && rows.size() < e_max_points; ++i) {
                        rows.push_back(h.vectors.row(i).transpose().cast<double>());
                        labels.push_back(std::string(to_string(run.samples[s].code_tokens[static_cast<std::size_t>(i)].category)));
                    }
                }
                Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), run.hidden_dim);
                for (std::size_t k = 0; k < rows.size(); ++k) X.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
                emb = embed_2d(X, opts);
            }
            std::cerr << "iterations " << emb.iterations << ", KL " << fmt_num(emb.kl_divergence) << '\n';
            emit(e_out, embedding_csv(emb, labels));
        } else if (*report) {
            emit_report(load_results(r_in), r_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
