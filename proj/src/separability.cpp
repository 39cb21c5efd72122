#include "codeattn/separability.hpp"

#include <cmath>
#include <vector>

#include "codeattn/types.hpp"

namespace codeattn {
namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& points, std::span<const std::size_t> idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), points.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = points.row(static_cast<Eigen::Index>(idx[k]));
    return out;
}

Separator from_direction(const Eigen::VectorXd& z, const Eigen::MatrixXd& pa, const Eigen::MatrixXd& pb) {
    Separator s;
    s.w = z.normalized();
    const double lo_a = (pa * s.w).minCoeff();
    const double hi_b = (pb * s.w).maxCoeff();
    s.margin = lo_a - hi_b;
    s.bias = -0.5 * (lo_a + hi_b);
    return s;
}

// Nearest points of conv(pa) and conv(pb). Returns the separator for the
// final direction, or nullopt when the hulls are within min_margin.
std::optional<Separator> solve(const Eigen::MatrixXd& pa, const Eigen::MatrixXd& pb, const SeparabilityOptions& opts,
                               bool stop_at_first) {
    const Eigen::Index na = pa.rows();
    const Eigen::Index nb = pb.rows();

    // Quick accept: the centroid direction often separates already.
    const Eigen::VectorXd ca = pa.colwise().mean();
    const Eigen::VectorXd cb = pb.colwise().mean();
    if (stop_at_first && (ca - cb).norm() > 0.0) {
        const Separator s = from_direction(ca - cb, pa, pb);
        if (s.margin > opts.min_margin) return s;
    }

    // Start from the pair of points nearest the other side's centroid.
    Eigen::Index a0 = 0;
    Eigen::Index b0 = 0;
    (pa.rowwise() - cb.transpose()).rowwise().squaredNorm().minCoeff(&a0);
    (pb.rowwise() - pa.row(a0)).rowwise().squaredNorm().minCoeff(&b0);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(na);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(nb);
    alpha(a0) = 1.0;
    beta(b0) = 1.0;
    Eigen::VectorXd xa = pa.row(a0).transpose();
    Eigen::VectorXd xb = pb.row(b0).transpose();

    const double min_sq = opts.min_margin * opts.min_margin;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const Eigen::VectorXd z = xa - xb;
        const double zz = z.squaredNorm();
        if (zz <= min_sq) return std::nullopt;
        const Eigen::VectorXd ga = pa * z;
        const Eigen::VectorXd gb = pb * z;
        Eigen::Index sa = 0;
        Eigen::Index sb = 0;
        const double lo_a = ga.minCoeff(&sa);
        const double hi_b = gb.maxCoeff(&sb);
        const double lower = lo_a - hi_b;  // = <z, s>; a separating certificate when positive
        if (stop_at_first && lower / std::sqrt(zz) > opts.min_margin) return from_direction(z, pa, pb);
        if (zz - lower <= opts.tolerance * zz) break;

        // Away vertices among the active weights.
        Eigen::Index wa = -1;
        Eigen::Index wb = -1;
        for (Eigen::Index k = 0; k < na; ++k) {
            if (alpha(k) > 0.0 && (wa < 0 || ga(k) > ga(wa))) wa = k;
        }
        for (Eigen::Index k = 0; k < nb; ++k) {
            if (beta(k) > 0.0 && (wb < 0 || gb(k) < gb(wb))) wb = k;
        }
        const double gain_a = ga(wa) - lo_a;
        const double gain_b = hi_b - gb(wb);
        if (gain_a <= 0.0 && gain_b <= 0.0) break;
        if (gain_a >= gain_b) {
            const Eigen::VectorXd d = pa.row(sa).transpose() - pa.row(wa).transpose();
            const double dd = d.squaredNorm();
            if (dd <= 0.0) break;
            const double t = std::min(gain_a / dd, alpha(wa));
            alpha(sa) += t;
            alpha(wa) -= t;
            if (alpha(wa) < 1e-15) alpha(wa) = 0.0;
            xa += t * d;
        } else {
            const Eigen::VectorXd d = pb.row(sb).transpose() - pb.row(wb).transpose();
            const double dd = d.squaredNorm();
            if (dd <= 0.0) break;
            const double t = std::min(gain_b / dd, beta(wb));
            beta(sb) += t;
            beta(wb) -= t;
            if (beta(wb) < 1e-15) beta(wb) = 0.0;
            xb += t * d;
        }
    }
    const Eigen::VectorXd z = xa - xb;
    if (z.squaredNorm() <= min_sq) return std::nullopt;
    const Separator s = from_direction(z, pa, pb);
    if (s.margin <= opts.min_margin) return std::nullopt;
    return s;
}

void check_inputs(const Eigen::MatrixXd& points, std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.empty() || b.empty()) throw Error("separability check needs two non-empty point sets");
    for (const auto k : a) {
        if (k >= static_cast<std::size_t>(points.rows())) throw Error("point index out of range");
    }
    for (const auto k : b) {
        if (k >= static_cast<std::size_t>(points.rows())) throw Error("point index out of range");
    }
}

}  // namespace

std::optional<Separator> max_margin_separator(const Eigen::MatrixXd& points, std::span<const std::size_t> a,
                                              std::span<const std::size_t> b, const SeparabilityOptions& opts) {
    check_inputs(points, a, b);
    return solve(gather(points, a), gather(points, b), opts, false);
}

bool linearly_separable(const Eigen::MatrixXd& points, std::span<const std::size_t> a, std::span<const std::size_t> b,
                        const SeparabilityOptions& opts) {
    check_inputs(points, a, b);
    return solve(gather(points, a), gather(points, b), opts, true).has_value();
}

std::optional<Separator> max_margin_separator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                              const SeparabilityOptions& opts) {
    if (a.rows() == 0 || b.rows() == 0) throw Error("separability check needs two non-empty point sets");
    if (a.cols() != b.cols()) throw Error("separability check: point dimensions differ");
    return solve(a, b, opts, false);
}

bool linearly_separable(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SeparabilityOptions& opts) {
    if (a.rows() == 0 || b.rows() == 0) throw Error("separability check needs two non-empty point sets");
    if (a.cols() != b.cols()) throw Error("separability check: point dimensions differ");
    return solve(a, b, opts, true).has_value();
}

}  // namespace codeattn
