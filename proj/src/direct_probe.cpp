#include "codeattn/direct_probe.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include "codeattn/types.hpp"

namespace codeattn {

std::size_t ClusterSet::num_labels() const {
    return std::set<int>(labels.begin(), labels.end()).size();
}

namespace {

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& points, const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), points.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = points.row(static_cast<Eigen::Index>(idx[k]));
    return out;
}

void check_conflicts(const Eigen::MatrixXd& points, std::span<const int> labels) {
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto row_less = [&](std::size_t x, std::size_t y) {
        for (Eigen::Index c = 0; c < points.cols(); ++c) {
            const double a = points(static_cast<Eigen::Index>(x), c);
            const double b = points(static_cast<Eigen::Index>(y), c);
            if (a != b) return a < b;
        }
        return false;
    };
    std::sort(order.begin(), order.end(), row_less);
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto x = order[k - 1];
        const auto y = order[k];
        if (!row_less(x, y) && labels[x] != labels[y])
            throw Error("training points " + std::to_string(std::min(x, y)) + " and " + std::to_string(std::max(x, y)) +
                        " are identical but labelled " + std::to_string(labels[x]) + " and " + std::to_string(labels[y]));
    }
}

struct Work {
    int label;
    std::vector<std::size_t> members;
    Eigen::VectorXd centroid;
    Eigen::MatrixXd rows;
    bool alive = true;
};

using PairKey = std::tuple<double, std::size_t, std::size_t>;

}  // namespace

ClusterSet direct_probe(const Eigen::MatrixXd& points, std::span<const int> labels, const DirectProbeOptions& opts) {
    if (static_cast<std::size_t>(points.rows()) != labels.size()) throw Error("direct_probe: one label per point required");
    if (!points.allFinite()) throw Error("direct_probe: non-finite training vector");
    if (std::set<int>(labels.begin(), labels.end()).size() < 2) throw Error("direct_probe: needs at least two labels");
    check_conflicts(points, labels);

    std::vector<Work> work;
    work.reserve(2 * labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        work.push_back({labels[i], {i}, points.row(r).transpose(), points.row(r), true});
    }

    std::priority_queue<PairKey, std::vector<PairKey>, std::greater<>> heap;
    const auto push_pair = [&](std::size_t a, std::size_t b) {
        heap.emplace((work[a].centroid - work[b].centroid).norm(), std::min(a, b), std::max(a, b));
    };
    for (std::size_t a = 0; a < work.size(); ++a) {
        for (std::size_t b = a + 1; b < work.size(); ++b) {
            if (work[a].label == work[b].label) push_pair(a, b);
        }
    }

    std::vector<std::pair<double, std::size_t>> others;
    while (!heap.empty()) {
        const auto [dist, a, b] = heap.top();
        heap.pop();
        if (!work[a].alive || !work[b].alive) continue;

        std::vector<std::size_t> members = work[a].members;
        members.insert(members.end(), work[b].members.begin(), work[b].members.end());
        std::sort(members.begin(), members.end());
        const Eigen::MatrixXd rows = rows_of(points, members);
        const Eigen::VectorXd centroid = rows.colwise().mean();

        // Nearest clusters first: they are the likeliest to block the merge.
        others.clear();
        for (std::size_t c = 0; c < work.size(); ++c) {
            if (work[c].alive && work[c].label != work[a].label)
                others.emplace_back((work[c].centroid - centroid).squaredNorm(), c);
        }
        std::sort(others.begin(), others.end());
        bool ok = true;
        for (const auto& [d2, c] : others) {
            if (!linearly_separable(rows, work[c].rows, opts.separability)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        work[a].alive = false;
        work[b].alive = false;
        const std::size_t id = work.size();
        work.push_back({work[a].label, std::move(members), centroid, rows, true});
        for (std::size_t c = 0; c < id; ++c) {
            if (work[c].alive && work[c].label == work[id].label) push_pair(c, id);
        }
    }

    ClusterSet out;
    out.points = points;
    out.labels.assign(labels.begin(), labels.end());
    std::vector<const Work*> alive;
    for (const auto& w : work) {
        if (w.alive) alive.push_back(&w);
    }
    // Stable output order: by label, then by smallest member.
    std::sort(alive.begin(), alive.end(), [](const Work* x, const Work* y) {
        return std::tie(x->label, x->members.front()) < std::tie(y->label, y->members.front());
    });
    for (const Work* w : alive) out.clusters.push_back({w->label, w->members, w->centroid});
    for (std::size_t i = 0; i < alive.size(); ++i) {
        for (std::size_t j = i + 1; j < alive.size(); ++j) {
            if (alive[i]->label == alive[j]->label) continue;
            auto sep = max_margin_separator(alive[i]->rows, alive[j]->rows, opts.separability);
            if (!sep) throw Error("direct_probe: final clusters " + std::to_string(i) + " and " + std::to_string(j) +
                                  " could not be certified as separable");
            out.certificates.push_back({i, j, std::move(*sep)});
        }
    }
    return out;
}

AssignRule parse_assign_rule(std::string_view s) {
    if (s == "nearest-member") return AssignRule::NearestMember;
    if (s == "centroid") return AssignRule::Centroid;
    throw Error("unknown assignment rule '" + std::string(s) + "' (expected nearest-member or centroid)");
}

std::vector<std::size_t> assign_clusters(const ClusterSet& cs, const Eigen::MatrixXd& test, AssignRule rule) {
    if (cs.clusters.empty()) throw Error("evaluate_probe: cluster set is empty");
    for (const auto& c : cs.clusters) {
        if (c.members.empty()) throw Error("evaluate_probe: empty cluster");
    }
    if (test.cols() != cs.points.cols()) throw Error("evaluate_probe: test dimension differs from training dimension");

    std::vector<std::size_t> out(static_cast<std::size_t>(test.rows()));
    if (rule == AssignRule::Centroid) {
        for (Eigen::Index t = 0; t < test.rows(); ++t) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < cs.clusters.size(); ++c) {
                const double d = (test.row(t).transpose() - cs.clusters[c].centroid).squaredNorm();
                if (d < best) {
                    best = d;
                    out[static_cast<std::size_t>(t)] = c;
                }
            }
        }
        return out;
    }
    std::vector<std::size_t> owner(static_cast<std::size_t>(cs.points.rows()), 0);
    for (std::size_t c = 0; c < cs.clusters.size(); ++c) {
        for (const auto m : cs.clusters[c].members) owner[m] = c;
    }
    for (Eigen::Index t = 0; t < test.rows(); ++t) {
        Eigen::Index nearest = 0;
        (cs.points.rowwise() - test.row(t)).rowwise().squaredNorm().minCoeff(&nearest);
        out[static_cast<std::size_t>(t)] = owner[static_cast<std::size_t>(nearest)];
    }
    return out;
}

ProbeResult evaluate_probe(const ClusterSet& cs, const Eigen::MatrixXd& test, std::span<const int> labels,
                           AssignRule rule) {
    if (test.rows() == 0) throw Error("evaluate_probe: empty test set");
    if (static_cast<std::size_t>(test.rows()) != labels.size()) throw Error("evaluate_probe: one label per test point required");
    const auto assigned = assign_clusters(cs, test, rule);

    ProbeResult r;
    r.num_clusters = cs.clusters.size();
    std::map<int, LabelAccuracy> acc;
    for (const int l : cs.labels) acc[l].label = l;
    std::size_t correct = 0;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        auto& a = acc[labels[t]];
        a.label = labels[t];
        ++a.total;
        if (cs.clusters[assigned[t]].label == labels[t]) {
            ++a.correct;
            ++correct;
        }
    }
    for (const auto& [l, a] : acc) r.per_label.push_back(a);
    r.overall_accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    if (!cs.certificates.empty()) {
        r.min_distance = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const auto& c : cs.certificates) {
            r.min_distance = std::min(r.min_distance, c.separator.margin);
            sum += c.separator.margin;
        }
        r.avg_distance = sum / static_cast<double>(cs.certificates.size());
    }
    return r;
}

}  // namespace codeattn
