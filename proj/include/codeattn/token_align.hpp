#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "codeattn/types.hpp"

namespace codeattn {

/// Sub-token position -> code-token index, or kSentinel for special positions
/// (sequence start/end, padding, mode tokens).
struct Alignment {
    static constexpr int kSentinel = -1;

    std::vector<int> entries;

    std::size_t num_sub() const { return entries.size(); }
    /// Number of code tokens (max entry + 1).
    std::size_t num_code() const;
    /// Throws unless entries cover [0, num_code()) and, when requested, are
    /// non-decreasing. Merging only needs coverage.
    void validate(bool require_monotone = true) const;
};

struct AlignmentResult {
    Alignment alignment;
    std::vector<std::string> diagnostics;  // ambiguous overlaps, resolved to the earlier token
};

/// Maps every sub-token to the code token it overlaps most. Empty spans are
/// treated as special positions. Throws on empty input or uncovered code tokens.
AlignmentResult build_alignment(std::span<const ByteSpan> sub_token_spans, std::span<const CodeToken> code_tokens);

template <typename Scalar>
struct MergedAttention {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix;
    int layer = 0;
    int head = 0;
};

template <typename Scalar>
struct MergedHidden {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // n_code x d
    int layer = 0;
};

namespace detail {

struct Groups {
    std::vector<std::vector<Eigen::Index>> members;  // code token -> sub-token rows
};

Groups group_positions(const Alignment& a);

}  // namespace detail

/// Block mean of the sub-token attention matrix over each pair of code tokens;
/// sentinel rows and columns are dropped without renormalisation.
template <typename Derived>
MergedAttention<typename Derived::Scalar> merge_attention(const Eigen::MatrixBase<Derived>& raw, const Alignment& a,
                                                          int layer = 0, int head = 0) {
    using Scalar = typename Derived::Scalar;
    if (raw.rows() != raw.cols()) throw Error("attention matrix is not square");
    if (static_cast<std::size_t>(raw.rows()) != a.num_sub())
        throw Error("attention side " + std::to_string(raw.rows()) + " does not match alignment length " +
                    std::to_string(a.num_sub()));
    const auto groups = detail::group_positions(a);
    const auto n = static_cast<Eigen::Index>(groups.members.size());
    MergedAttention<Scalar> out;
    out.layer = layer;
    out.head = head;
    out.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& rows = groups.members[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& cols = groups.members[static_cast<std::size_t>(j)];
            double sum = 0.0;
            for (const auto r : rows) {
                for (const auto c : cols) sum += static_cast<double>(raw(r, c));
            }
            out.matrix(i, j) = static_cast<Scalar>(sum / static_cast<double>(rows.size() * cols.size()));
        }
    }
    return out;
}

/// Row i is the mean of the sub-token rows aligned to code token i.
template <typename Derived>
MergedHidden<typename Derived::Scalar> merge_hidden(const Eigen::MatrixBase<Derived>& raw, const Alignment& a,
                                                    int layer = 0) {
    using Scalar = typename Derived::Scalar;
    if (static_cast<std::size_t>(raw.rows()) != a.num_sub())
        throw Error("hidden rows " + std::to_string(raw.rows()) + " do not match alignment length " +
                    std::to_string(a.num_sub()));
    const auto groups = detail::group_positions(a);
    MergedHidden<Scalar> out;
    out.layer = layer;
    out.vectors.resize(static_cast<Eigen::Index>(groups.members.size()), raw.cols());
    for (std::size_t i = 0; i < groups.members.size(); ++i) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(raw.cols());
        for (const auto r : groups.members[i]) acc += raw.row(r).template cast<double>();
        acc /= static_cast<double>(groups.members[i].size());
        out.vectors.row(static_cast<Eigen::Index>(i)) = acc.cast<Scalar>();
    }
    return out;
}

/// Rows whose sum deviates from 1 by more than `tol`.
template <typename Derived>
std::vector<Eigen::Index> non_stochastic_rows(const Eigen::MatrixBase<Derived>& raw, double tol = 1e-3) {
    std::vector<Eigen::Index> bad;
    for (Eigen::Index r = 0; r < raw.rows(); ++r) {
        if (std::abs(raw.row(r).template cast<double>().sum() - 1.0) > tol) bad.push_back(r);
    }
    return bad;
}

}  // namespace codeattn
