#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "codeattn/extraction_run.hpp"
#include "codeattn/graph.hpp"
#include "codeattn/token_align.hpp"

namespace codeattn {

/// How the two attention directions between a token pair become edges.
///   Max:      {i,j} iff max(a_ij, a_ji) >= tau
///   Mean:     {i,j} iff (a_ij + a_ji) / 2 >= tau
///   Directed: (i,j) iff a_ij >= tau, compared against both orientations of code edges
enum class Symmetrize { Max, Mean, Directed };

Symmetrize parse_symmetrize(std::string_view s);

struct ModelGraph {
    Graph graph;
    double threshold = 0.0;
    int layer = 0;
    int head = 0;
};

/// Thresholds a merged attention matrix; the diagonal is ignored and a value
/// equal to tau counts as an edge. Throws if tau is outside (0, 1].
template <typename Derived>
Graph binarize_matrix(const Eigen::MatrixBase<Derived>& m, double tau, Symmetrize mode = Symmetrize::Max) {
    if (!(tau > 0.0 && tau <= 1.0)) throw Error("threshold must lie in (0, 1]");
    if (m.rows() != m.cols()) throw Error("attention matrix is not square");
    using S = typename Derived::Scalar;
    const auto t = static_cast<S>(tau);  // compared in the precision the values are stored in
    const auto n = static_cast<std::uint32_t>(m.rows());
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const S a = m(i, j);
            if (mode == Symmetrize::Directed) {
                if (a >= t) edges.emplace_back(i, j);
                continue;
            }
            if (j < i) continue;
            const S b = m(j, i);
            const S v = mode == Symmetrize::Max ? std::max(a, b) : S(0.5) * (a + b);
            if (v >= t) edges.emplace_back(i, j);
        }
    }
    return mode == Symmetrize::Directed ? Graph::directed_graph(n, std::move(edges))
                                        : Graph::undirected(n, std::move(edges));
}

template <typename Scalar>
ModelGraph binarize(const MergedAttention<Scalar>& m, double tau, Symmetrize mode = Symmetrize::Max) {
    return ModelGraph{binarize_matrix(m.matrix, tau, mode), tau, m.layer, m.head};
}

/// Attention-value distribution over four ranges; values below 0.001 count as zero.
struct HistogramBins {
    static constexpr double kZero = 0.001;
    static constexpr double kLow = 0.05;
    static constexpr double kMid = 0.3;
    static constexpr std::array<std::string_view, 4> kNames = {"0", "0.001-0.05", "0.05-0.3", "0.3-1"};

    std::array<std::uint64_t, 4> counts{};

    std::uint64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
    std::array<double, 4> percentages() const;
    void add(double v);
    HistogramBins& operator+=(const HistogramBins& o);
};

struct RunHistogram {
    std::vector<HistogramBins> per_layer;
    HistogramBins model;
};

/// Counts raw (pre-merge) attention values of every head and sample.
RunHistogram histogram(const ExtractionRun& run);

template <typename Derived>
HistogramBins histogram_of(const Eigen::MatrixBase<Derived>& values) {
    HistogramBins h;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) h.add(static_cast<double>(values(r, c)));
    }
    return h;
}

/// Merged attention of every head of every layer for one sample.
std::vector<MergedAttention<float>> merged_heads(const ExtractionRun& run, std::size_t sample);

}  // namespace codeattn
