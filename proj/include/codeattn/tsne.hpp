#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace codeattn {

struct TsneOptions {
    double perplexity = 30.0;  // in [5, 50]
    int max_iter = 5000;       // at most 50000
    int patience = 300;        // stop after this many iterations without a lower KL
    std::uint64_t seed = 7;
    double learning_rate = 200.0;
    double exaggeration = 12.0;
    int exaggeration_iters = 250;
};

struct Embedding2D {
    Eigen::MatrixX2d points;
    double perplexity = 0.0;
    int iterations = 0;
    double kl_divergence = 0.0;  // the reported error
};

/// Symmetric input affinities from squared distances; each row's Gaussian is
/// calibrated by bisection to `perplexity`. Entries sum to one.
Eigen::MatrixXd joint_probabilities(const Eigen::MatrixXd& squared_distances, double perplexity);

/// Exact-gradient t-SNE of the rows of `vectors`. Throws when
/// n < 3 * perplexity, the perplexity is outside [5, 50] or a value is not finite.
Embedding2D embed_2d(const Eigen::MatrixXd& vectors, const TsneOptions& opts = {});

/// Same, from a symmetric matrix of pairwise distances (e.g. AST distances).
Embedding2D embed_2d_precomputed(const Eigen::MatrixXd& distances, const TsneOptions& opts = {});

}  // namespace codeattn
