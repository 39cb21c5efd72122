#include "codeattn/tsne.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "codeattn/rng.hpp"
#include "codeattn/types.hpp"

namespace codeattn {
namespace {

void check(Eigen::Index n, const TsneOptions& opts) {
    if (!(opts.perplexity >= 5.0 && opts.perplexity <= 50.0))
        throw Error("perplexity " + std::to_string(opts.perplexity) + " outside [5, 50]");
    if (static_cast<double>(n) < 3.0 * opts.perplexity)
        throw Error("perplexity " + std::to_string(opts.perplexity) + " infeasible for " + std::to_string(n) +
                    " points (needs n >= 3 * perplexity)");
    if (opts.max_iter < 1 || opts.max_iter > 50000) throw Error("max_iter must lie in [1, 50000]");
}

Embedding2D optimize(const Eigen::MatrixXd& p, const TsneOptions& opts) {
    const Eigen::Index n = p.rows();
    Rng rng(opts.seed);
    Eigen::MatrixX2d y(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i, 0) = 1e-4 * rng.normal();
        y(i, 1) = 1e-4 * rng.normal();
    }
    Eigen::MatrixX2d update = Eigen::MatrixX2d::Zero(n, 2);
    Eigen::MatrixX2d gains = Eigen::MatrixX2d::Ones(n, 2);
    Eigen::MatrixXd num(n, n);
    Eigen::MatrixX2d grad(n, 2);

    double best = std::numeric_limits<double>::infinity();
    int best_iter = 0;
    double kl = 0.0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        const bool early = it < opts.exaggeration_iters;
        const double ex = early ? opts.exaggeration : 1.0;
        if (it == opts.exaggeration_iters) {
            update.setZero();
            gains.setOnes();
        }
        double qsum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            num(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double v = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
                num(i, j) = v;
                num(j, i) = v;
                qsum += 2.0 * v;
            }
        }
        grad.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = std::max(num(i, j) / qsum, 1e-12);
                grad.row(i) += 4.0 * (ex * p(i, j) - q) * num(i, j) * (y.row(i) - y.row(j));
            }
        }
        const double momentum = early ? 0.5 : 0.8;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (int c = 0; c < 2; ++c) {
                const bool same = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
                gains(i, c) = std::max(same ? gains(i, c) * 0.8 : gains(i, c) + 0.2, 0.01);
                update(i, c) = momentum * update(i, c) - opts.learning_rate * gains(i, c) * grad(i, c);
            }
        }
        y += update;
        const Eigen::RowVector2d centre = y.colwise().mean();
        y.rowwise() -= centre;

        if (early) continue;
        if ((it + 1) % 50 == 0 || it + 1 == opts.max_iter) {
            kl = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const double q = std::max(num(i, j) / qsum, 1e-12);
                    kl += p(i, j) * std::log(p(i, j) / q);
                }
            }
            if (kl < best - 1e-6) {
                best = kl;
                best_iter = it;
            } else if (it - best_iter >= opts.patience) {
                ++it;
                break;
            }
        }
        if (grad.norm() < 1e-7) {
            ++it;
            break;
        }
    }
    if (!y.allFinite()) throw Error("t-SNE diverged");
    Embedding2D out;
    out.points = y;
    out.perplexity = opts.perplexity;
    out.iterations = it;
    out.kl_divergence = kl;
    return out;
}

}  // namespace

Eigen::MatrixXd joint_probabilities(const Eigen::MatrixXd& d2, double perplexity) {
    const Eigen::Index n = d2.rows();
    const double target = std::log(perplexity);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd row(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double beta = 1.0;
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 200; ++it) {
            double sum = 0.0;
            double wsum = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                row(j) = j == i ? 0.0 : std::exp(-d2(i, j) * beta);
                sum += row(j);
                wsum += row(j) * d2(i, j);
            }
            if (sum <= 0.0) {
                hi = beta;
                beta = (lo + hi) / 2.0;
                continue;
            }
            const double entropy = std::log(sum) + beta * wsum / sum;
            const double diff = entropy - target;
            row /= sum;
            if (std::abs(diff) < 1e-5) break;
            if (diff > 0.0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : (lo + hi) / 2.0;
            } else {
                hi = beta;
                beta = (lo + hi) / 2.0;
            }
        }
        p.row(i) = row.transpose();
    }
    p = (p + p.transpose()).eval() / (2.0 * static_cast<double>(n));
    return p.cwiseMax(1e-12);
}

Embedding2D embed_2d(const Eigen::MatrixXd& vectors, const TsneOptions& opts) {
    check(vectors.rows(), opts);
    if (!vectors.allFinite()) throw Error("embed_2d: non-finite input vector");
    const Eigen::VectorXd sq = vectors.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = (-2.0 * vectors * vectors.transpose()).colwise() + sq;
    d2.rowwise() += sq.transpose();
    d2 = d2.cwiseMax(0.0);
    return optimize(joint_probabilities(d2, opts.perplexity), opts);
}

Embedding2D embed_2d_precomputed(const Eigen::MatrixXd& distances, const TsneOptions& opts) {
    if (distances.rows() != distances.cols()) throw Error("distance matrix must be square");
    check(distances.rows(), opts);
    if (!distances.allFinite() || (distances.array() < 0.0).any()) throw Error("distances must be finite and non-negative");
    if (!distances.isApprox(distances.transpose())) throw Error("distance matrix must be symmetric");
    return optimize(joint_probabilities(distances.cwiseAbs2(), opts.perplexity), opts);
}

}  // namespace codeattn
