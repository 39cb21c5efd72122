#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "codeattn/code_graphs.hpp"
#include "codeattn/extraction_run.hpp"
#include "codeattn/graph.hpp"
#include "codeattn/model_graphs.hpp"

namespace codeattn {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    /// Rates from counts; precision is 0 when the model graph has no edges.
    static PRF from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

/// Code-graph edges are the ground truth, model-graph edges the predictions.
/// A directed model graph is scored against both orientations of each code edge.
PRF precision_recall_f(const Graph& model, const Graph& code);

/// Graph edit distance under unit edge insertion/deletion costs on a shared
/// node set: the size of the edge symmetric difference.
std::size_t graph_edit_distance(const Graph& a, const Graph& b);
double ged_per_node(const Graph& model, const Graph& code);

/// Corpus aggregation: Micro pools tp/fp/fn over samples, Macro averages
/// per-sample rates.
enum class Aggregation { Micro, Macro };

Aggregation parse_aggregation(std::string_view s);

inline const std::vector<double> kDefaultTaus = {0.01, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2, 0.3};

struct TauPoint {
    double tau = 0.0;
    PRF prf;
};

struct HeadSweep {
    int layer = 0;
    int head = 0;
    std::vector<TauPoint> points;
    std::size_t argmax = 0;  // index into points of the highest F (first on ties)

    const TauPoint& best() const { return points.at(argmax); }
};

struct SweepOptions {
    Symmetrize symmetrize = Symmetrize::Max;
    Aggregation aggregation = Aggregation::Micro;
};

/// Scores one head over a corpus at each threshold. `attention[s]` is the merged
/// matrix for sample s, `code[s]` its ground-truth graph. Throws on an empty
/// corpus or unsorted thresholds.
HeadSweep sweep_head(std::span<const Eigen::MatrixXf> attention, std::span<const Graph> code,
                     std::span<const double> taus, const SweepOptions& opts = {}, int layer = 0, int head = 0);

/// Head with the highest F at its best threshold, per layer; ties go to the
/// lowest head index. `sweeps` may be in any order.
std::vector<int> best_head_per_layer(std::span<const HeadSweep> sweeps);

// --- whole-run evaluation ----------------------------------------------------

enum class CodeGraphKind { Syntax, NonIdentifier, Dfg };

CodeGraphKind parse_code_graph_kind(std::string_view s);
std::string_view to_string(CodeGraphKind k);

struct CodeGraphSet {
    SyntaxGraph syntax;
    SyntaxGraph non_identifier;
    Graph dfg;  // undirected, unlabeled

    const Graph& get(CodeGraphKind k) const;
};

CodeGraphSet build_code_graphs(const Ast& ast);

/// Parses each sample's code and checks its tokens against the manifest.
std::vector<CodeGraphSet> code_graphs_for_run(const ExtractionRun& run);

/// One CSV row of the metrics table.
struct MetricRow {
    std::string model_id;
    int layer = 0;
    int head = 0;
    double tau = 0.0;
    PRF prf;
    double ged_per_node_syntax = 0.0;
    double ged_per_node_nonid = 0.0;
    double ged_per_node_dfg = 0.0;
};

/// Rows for every (layer, head, tau): PRF against `kind`, GED per node against
/// all three code graphs (averaged over samples for Macro, pooled for Micro).
std::vector<MetricRow> evaluate_run(const ExtractionRun& run, std::span<const CodeGraphSet> code,
                                    std::span<const double> taus, CodeGraphKind kind, const SweepOptions& opts = {});

/// Header: model_id,layer,head,tau,precision,recall,f,ged_per_node_syntax,ged_per_node_nonid,ged_per_node_dfg
std::string metrics_csv(std::span<const MetricRow> rows);
std::vector<MetricRow> parse_metrics_csv(std::string_view text);

}  // namespace codeattn
