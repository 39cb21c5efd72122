#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "codeattn/separability.hpp"

namespace codeattn {

struct ProbeCluster {
    int label = 0;
    std::vector<std::size_t> members;  // rows of the training matrix
    Eigen::VectorXd centroid;
};

/// Hyperplane separating clusters `a` (positive side) and `b`.
struct Certificate {
    std::size_t a = 0;
    std::size_t b = 0;
    Separator separator;
};

struct ClusterSet {
    Eigen::MatrixXd points;  // training vectors, one per row
    std::vector<int> labels;
    std::vector<ProbeCluster> clusters;
    std::vector<Certificate> certificates;  // one per pair of clusters with different labels

    std::size_t num_labels() const;
};

struct DirectProbeOptions {
    SeparabilityOptions separability;
};

/// Bottom-up label-pure clustering: starting from singletons, repeatedly merge
/// the two same-label clusters with the closest centroids whose union stays
/// linearly separable from every cluster of another label. Throws when two
/// identical vectors carry different labels or fewer than two labels occur.
ClusterSet direct_probe(const Eigen::MatrixXd& points, std::span<const int> labels, const DirectProbeOptions& opts = {});

enum class AssignRule { NearestMember, Centroid };

AssignRule parse_assign_rule(std::string_view s);

struct LabelAccuracy {
    int label = 0;
    std::size_t total = 0;
    std::size_t correct = 0;

    /// Recall: share of this label's test points predicted correctly.
    double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct ProbeResult {
    std::size_t num_clusters = 0;
    std::vector<LabelAccuracy> per_label;  // ascending label
    double overall_accuracy = 0.0;
    double min_distance = 0.0;  // smallest certificate margin
    double avg_distance = 0.0;  // mean certificate margin
};

ProbeResult evaluate_probe(const ClusterSet& clusters, const Eigen::MatrixXd& test, std::span<const int> labels,
                           AssignRule rule = AssignRule::NearestMember);

/// Cluster index predicted for each test row.
std::vector<std::size_t> assign_clusters(const ClusterSet& clusters, const Eigen::MatrixXd& test,
                                         AssignRule rule = AssignRule::NearestMember);

}  // namespace codeattn
