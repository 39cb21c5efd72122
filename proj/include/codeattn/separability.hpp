#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Dense>

namespace codeattn {

/// Unit-normal hyperplane with w·a + bias >= margin/2 on one side and
/// w·b + bias <= -margin/2 on the other.
struct Separator {
    Eigen::VectorXd w;
    double bias = 0.0;
    double margin = 0.0;
};

struct SeparabilityOptions {
    double tolerance = 1e-6;   // relative duality gap at which the margin is accepted
    double min_margin = 1e-9;  // hulls closer than this count as overlapping
    int max_iterations = 200000;
};

/// Maximum-margin separator between the convex hulls of rows `a` and rows `b`
/// of `points`, or nullopt when the hulls touch or overlap. Solved as the
/// nearest-point problem between the hulls (the dual of the hard-margin SVM)
/// with pairwise Frank-Wolfe steps.
std::optional<Separator> max_margin_separator(const Eigen::MatrixXd& points, std::span<const std::size_t> a,
                                              std::span<const std::size_t> b, const SeparabilityOptions& opts = {});

/// Same question, but stops at the first hyperplane that separates.
bool linearly_separable(const Eigen::MatrixXd& points, std::span<const std::size_t> a, std::span<const std::size_t> b,
                        const SeparabilityOptions& opts = {});

/// Overloads on two explicit point sets (one point per row).
std::optional<Separator> max_margin_separator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                              const SeparabilityOptions& opts = {});
bool linearly_separable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SeparabilityOptions& opts = {});

}  // namespace codeattn
