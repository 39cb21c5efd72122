#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "codeattn/ast.hpp"
#include "codeattn/direct_probe.hpp"
#include "codeattn/graph_metrics.hpp"
#include "codeattn/probe_datasets.hpp"
#include "codeattn/tsne.hpp"

namespace codeattn {

/// Entry (i, j) is tree_distance(i, j); zero diagonal.
Eigen::MatrixXi ast_distance_matrix(const Ast& ast);

/// One row of a probe table: a (task, pairing, model, layer) probe outcome.
struct ProbeRow {
    ProbeTask task = ProbeTask::Distance;
    Pairing pairing = Pairing::KeywordAll;
    std::string model_id;
    int layer = 0;
    std::size_t num_clusters = 0;
    std::vector<std::pair<std::string, double>> label_accuracy;  // task label order
    double overall_accuracy = 0.0;
    double min_distance = 0.0;
    double avg_distance = 0.0;
};

ProbeRow make_probe_row(const ProbeDataset& ds, const ProbeResult& r);
std::string probe_row_json(const ProbeRow& row);
ProbeRow parse_probe_row_json(std::string_view text);

struct ResultsBundle {
    std::vector<MetricRow> sweep;
    std::vector<ProbeRow> probes;
};

/// Reads every `*.metrics.csv` and `*.probe.json` in `dir`, in file name order.
ResultsBundle load_results(const std::filesystem::path& dir);

/// Writes sweep.csv, layers.csv (best head per layer), ged.csv,
/// probe_{distance,siblings,dfg}.csv, summary.json and, when there are sweep
/// rows, layers.svg. Output bytes depend only on the bundle contents.
void emit_report(const ResultsBundle& bundle, const std::filesystem::path& out_dir);

/// x,y plus one label column per point.
std::string embedding_csv(const Embedding2D& e, const std::vector<std::string>& labels);

}  // namespace codeattn
