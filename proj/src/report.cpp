#include "codeattn/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "codeattn/csv.hpp"

namespace codeattn {

namespace fs = std::filesystem;
using json = nlohmann::json;

Eigen::MatrixXi ast_distance_matrix(const Ast& ast) {
    const auto n = static_cast<Eigen::Index>(ast.num_tokens());
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const int d = static_cast<int>(tree_distance(ast, static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
            m(i, j) = d;
            m(j, i) = d;
        }
    }
    return m;
}

ProbeRow make_probe_row(const ProbeDataset& ds, const ProbeResult& r) {
    ProbeRow row;
    row.task = ds.selection.task;
    row.pairing = ds.selection.pairing;
    row.model_id = ds.model_id;
    row.layer = ds.layer;
    row.num_clusters = r.num_clusters;
    const auto names = task_labels(ds.selection.task);
    for (std::size_t l = 0; l < names.size(); ++l) {
        double acc = 0.0;
        for (const auto& a : r.per_label) {
            if (a.label == static_cast<int>(l)) acc = a.accuracy();
        }
        row.label_accuracy.emplace_back(names[l], acc);
    }
    row.overall_accuracy = r.overall_accuracy;
    row.min_distance = r.min_distance;
    row.avg_distance = r.avg_distance;
    return row;
}

std::string probe_row_json(const ProbeRow& row) {
    json j;
    j["task"] = to_string(row.task);
    j["pairing"] = to_string(row.pairing);
    j["model_id"] = row.model_id;
    j["layer"] = row.layer;
    j["num_clusters"] = row.num_clusters;
    json acc = json::array();
    for (const auto& [label, a] : row.label_accuracy) acc.push_back({{"label", label}, {"accuracy", a}});
    j["label_accuracy"] = acc;
    j["overall_accuracy"] = row.overall_accuracy;
    j["min_distance"] = row.min_distance;
    j["avg_distance"] = row.avg_distance;
    return j.dump(2) + '\n';
}

ProbeRow parse_probe_row_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        ProbeRow row;
        row.task = parse_probe_task(j.at("task").get<std::string>());
        row.pairing = parse_pairing(j.at("pairing").get<std::string>());
        row.model_id = j.at("model_id").get<std::string>();
        row.layer = j.at("layer").get<int>();
        row.num_clusters = j.at("num_clusters").get<std::size_t>();
        for (const auto& a : j.at("label_accuracy"))
            row.label_accuracy.emplace_back(a.at("label").get<std::string>(), a.at("accuracy").get<double>());
        row.overall_accuracy = j.at("overall_accuracy").get<double>();
        row.min_distance = j.at("min_distance").get<double>();
        row.avg_distance = j.at("avg_distance").get<double>();
        return row;
    } catch (const json::exception& e) {
        throw Error("probe result: " + std::string(e.what()));
    }
}

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
    out.flush();
    if (!out) throw Error("failed writing " + p.string());
}

using HeadKey = std::tuple<std::string, int, int>;

struct LayerBest {
    std::string model_id;
    int layer;
    const MetricRow* row;
};

// Best tau per head (first maximum of F over ascending tau), then best head
// per layer (highest F, lowest head index on ties).
std::vector<LayerBest> best_per_layer(const std::vector<MetricRow>& rows) {
    std::map<HeadKey, std::vector<const MetricRow*>> heads;
    for (const auto& r : rows) heads[{r.model_id, r.layer, r.head}].push_back(&r);
    std::map<std::pair<std::string, int>, const MetricRow*> best;
    for (auto& [key, pts] : heads) {
        std::stable_sort(pts.begin(), pts.end(), [](const MetricRow* a, const MetricRow* b) { return a->tau < b->tau; });
        const MetricRow* top = pts.front();
        for (const auto* p : pts) {
            if (p->prf.f_score > top->prf.f_score) top = p;
        }
        const auto lk = std::make_pair(std::get<0>(key), std::get<1>(key));
        auto it = best.find(lk);
        if (it == best.end() || top->prf.f_score > it->second->prf.f_score) best[lk] = top;
    }
    std::vector<LayerBest> out;
    for (const auto& [k, r] : best) out.push_back({k.first, k.second, r});
    return out;
}

std::string svg_layers(const std::vector<LayerBest>& best) {
    constexpr double W = 640, H = 400, M = 50;
    std::map<std::string, std::vector<std::pair<int, double>>> series;
    int max_layer = 1;
    for (const auto& b : best) {
        series[b.model_id].emplace_back(b.layer, b.row->prf.recall);
        max_layer = std::max(max_layer, b.layer);
    }
    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    const auto px = [&](int layer) { return M + (W - 2 * M) * layer / max_layer; };
    const auto py = [&](double v) { return H - M - (H - 2 * M) * v; };
    char buf[160];
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", M, H - M, W - M, H - M);
    s += buf;
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", M, M, M, H - M);
    s += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\">layer</text>\n", W / 2, H - 10);
    s += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"5\" y=\"%.1f\">recall</text>\n", M - 10);
    s += buf;
    std::size_t c = 0;
    for (const auto& [model, pts] : series) {
        const char* color = kColors[c % std::size(kColors)];
        s += std::string("<polyline fill=\"none\" stroke=\"") + color + "\" points=\"";
        for (std::size_t k = 0; k < pts.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", k ? " " : "", px(pts[k].first), py(pts[k].second));
            s += buf;
        }
        s += "\"/>\n";
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">", W - M - 120, M + 15.0 * static_cast<double>(c), color);
        s += buf;
        for (const char ch : model) {
            if (ch == '<') s += "&lt;";
            else if (ch == '&') s += "&amp;";
            else s += ch;
        }
        s += "</text>\n";
        ++c;
    }
    return s + "</svg>\n";
}

}  // namespace

ResultsBundle load_results(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error("results directory " + dir.string() + " does not exist");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    ResultsBundle b;
    for (const auto& f : files) {
        const auto name = f.filename().string();
        if (ends_with(name, ".metrics.csv")) {
            auto rows = parse_metrics_csv(slurp(f));
            b.sweep.insert(b.sweep.end(), rows.begin(), rows.end());
        } else if (ends_with(name, ".probe.json")) {
            b.probes.push_back(parse_probe_row_json(slurp(f)));
        }
    }
    return b;
}

void emit_report(const ResultsBundle& bundle, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw Error("cannot create output directory " + out_dir.string());

    std::vector<MetricRow> sweep = bundle.sweep;
    std::stable_sort(sweep.begin(), sweep.end(), [](const MetricRow& a, const MetricRow& b) {
        return std::tie(a.model_id, a.layer, a.head, a.tau) < std::tie(b.model_id, b.layer, b.head, b.tau);
    });
    write_text(out_dir / "sweep.csv", metrics_csv(sweep));

    const auto best = best_per_layer(sweep);
    std::string layers = "model_id,layer,best_head,tau,precision,recall,f\n";
    std::string ged = "model_id,layer,head,tau,ged_per_node_syntax,ged_per_node_nonid,ged_per_node_dfg\n";
    for (const auto& b : best) {
        const MetricRow& r = *b.row;
        layers += csv_cell(r.model_id) + ',' + std::to_string(r.layer) + ',' + std::to_string(r.head) + ',' +
                  fmt_num(r.tau) + ',' + fmt_num(r.prf.precision) + ',' + fmt_num(r.prf.recall) + ',' +
                  fmt_num(r.prf.f_score) + '\n';
        ged += csv_cell(r.model_id) + ',' + std::to_string(r.layer) + ',' + std::to_string(r.head) + ',' +
               fmt_num(r.tau) + ',' + fmt_num(r.ged_per_node_syntax) + ',' + fmt_num(r.ged_per_node_nonid) + ',' +
               fmt_num(r.ged_per_node_dfg) + '\n';
    }
    write_text(out_dir / "layers.csv", layers);
    write_text(out_dir / "ged.csv", ged);
    if (!best.empty()) write_text(out_dir / "layers.svg", svg_layers(best));

    std::vector<ProbeRow> probes = bundle.probes;
    std::stable_sort(probes.begin(), probes.end(), [](const ProbeRow& a, const ProbeRow& b) {
        return std::tie(a.task, a.pairing, a.model_id, a.layer) < std::tie(b.task, b.pairing, b.model_id, b.layer);
    });
    for (const ProbeTask task : {ProbeTask::Distance, ProbeTask::Siblings, ProbeTask::DataFlow}) {
        const auto names = task_labels(task);
        std::string t = "tokens,model,layer,clusters";
        for (const auto& n : names) t += ',' + csv_cell(n);
        t += ",min_distance,avg_distance\n";
        for (const auto& p : probes) {
            if (p.task != task) continue;
            t += std::string(to_string(p.pairing)) + ',' + csv_cell(p.model_id) + ',' + std::to_string(p.layer) + ',' +
                 std::to_string(p.num_clusters);
            for (const auto& n : names) {
                double acc = 0.0;
                for (const auto& [label, a] : p.label_accuracy) {
                    if (label == n) acc = a;
                }
                t += ',' + fmt_num(acc);
            }
            t += ',' + fmt_num(p.min_distance) + ',' + fmt_num(p.avg_distance) + '\n';
        }
        write_text(out_dir / ("probe_" + std::string(to_string(task)) + ".csv"), t);
    }

    json summary;
    summary["sweep_rows"] = sweep.size();
    summary["probe_rows"] = probes.size();
    json heads = json::object();
    for (const auto& b : best) {
        heads[b.model_id].push_back({{"layer", b.layer},
                                     {"head", b.row->head},
                                     {"tau", b.row->tau},
                                     {"precision", b.row->prf.precision},
                                     {"recall", b.row->prf.recall},
                                     {"f", b.row->prf.f_score}});
    }
    summary["best_heads"] = heads;
    write_text(out_dir / "summary.json", summary.dump(2) + '\n');
}

std::string embedding_csv(const Embedding2D& e, const std::vector<std::string>& labels) {
    if (labels.size() != static_cast<std::size_t>(e.points.rows())) throw Error("embedding_csv: one label per point required");
    std::string out = "x,y,label\n";
    for (Eigen::Index i = 0; i < e.points.rows(); ++i)
        out += fmt_num(e.points(i, 0)) + ',' + fmt_num(e.points(i, 1)) + ',' + csv_cell(labels[static_cast<std::size_t>(i)]) + '\n';
    return out;
}

}  // namespace codeattn
