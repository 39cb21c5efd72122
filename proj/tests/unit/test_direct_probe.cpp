#include <doctest.h>

#include <set>

#include "codeattn/direct_probe.hpp"
#include "codeattn/rng.hpp"
#include "codeattn/separability.hpp"
#include "codeattn/types.hpp"

using namespace codeattn;

namespace {

struct Blobs {
    Eigen::MatrixXd x;
    std::vector<int> y;
};

Blobs blobs(const std::vector<Eigen::VectorXd>& centers, const std::vector<int>& labels, int per, double sd, Rng& rng) {
    Blobs b;
    const auto d = centers[0].size();
    b.x.resize(static_cast<Eigen::Index>(centers.size()) * per, d);
    Eigen::Index r = 0;
    for (int i = 0; i < per; ++i) {
        for (std::size_t c = 0; c < centers.size(); ++c) {
            for (Eigen::Index k = 0; k < d; ++k) b.x(r, k) = centers[c](k) + sd * rng.normal();
            b.y.push_back(labels[c]);
            ++r;
        }
    }
    return b;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (const double x : v) out(k++) = x;
    return out;
}

void check_invariants(const ClusterSet& cs) {
    std::set<std::size_t> seen;
    for (const auto& c : cs.clusters) {
        for (const auto m : c.members) {
            CHECK(cs.labels[m] == c.label);
            CHECK(seen.insert(m).second);
        }
    }
    CHECK(seen.size() == cs.labels.size());
    CHECK(cs.clusters.size() >= cs.num_labels());
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < cs.clusters.size(); ++i) {
        for (std::size_t j = i + 1; j < cs.clusters.size(); ++j) pairs += cs.clusters[i].label != cs.clusters[j].label;
    }
    CHECK(cs.certificates.size() == pairs);
    for (const auto& cert : cs.certificates) {
        const auto& s = cert.separator;
        CHECK(s.margin > 0.0);
        for (const auto m : cs.clusters[cert.a].members)
            CHECK(s.w.dot(cs.points.row(static_cast<Eigen::Index>(m)).transpose()) + s.bias >= s.margin / 2 - 1e-9);
        for (const auto m : cs.clusters[cert.b].members)
            CHECK(s.w.dot(cs.points.row(static_cast<Eigen::Index>(m)).transpose()) + s.bias <= -s.margin / 2 + 1e-9);
    }
}

}  // namespace

TEST_CASE("two separated clouds give one cluster per label") {
    Rng rng(1);
    const auto train = blobs({vec({0, 0, 0}), vec({6, 0, 0})}, {0, 1}, 40, 1.0, rng);
    const auto cs = direct_probe(train.x, train.y);
    CHECK(cs.clusters.size() == 2);
    check_invariants(cs);
    const auto test = blobs({vec({0, 0, 0}), vec({6, 0, 0})}, {0, 1}, 20, 1.0, rng);
    const auto r = evaluate_probe(cs, test.x, test.y);
    CHECK(r.num_clusters == 2);
    REQUIRE(r.per_label.size() == 2);
    CHECK(r.per_label[0].accuracy() == 1.0);
    CHECK(r.per_label[1].accuracy() == 1.0);
    CHECK(r.min_distance <= r.avg_distance);
    CHECK(r.min_distance > 0.0);
}

TEST_CASE("XOR layout: the first diagonal to merge blocks the other") {
    Rng rng(2);
    const auto train = blobs({vec({0, 0}), vec({5, 5}), vec({0, 5}), vec({5, 0})}, {0, 0, 1, 1}, 15, 0.5, rng);
    const auto cs = direct_probe(train.x, train.y);
    CHECK(cs.clusters.size() == 3);
    std::size_t label0 = 0;
    for (const auto& c : cs.clusters) label0 += c.label == 0;
    CHECK((label0 == 1 || label0 == 2));
    check_invariants(cs);
    // either diagonal, once merged, is still separable from each opposite blob on its own
    auto rows = [&](int blob) {
        Eigen::MatrixXd m(15, 2);
        for (int k = 0; k < 15; ++k) m.row(k) = train.x.row(k * 4 + blob);
        return m;
    };
    Eigen::MatrixXd diag(30, 2);
    diag << rows(0), rows(1);
    CHECK(linearly_separable(diag, rows(2)));
    CHECK(linearly_separable(diag, rows(3)));
}

TEST_CASE("interleaved labels on a line") {
    // 0 0 1 1 0 0 on the x axis: the outer label splits in two
    Eigen::MatrixXd x(6, 1);
    x << 0, 1, 2, 3, 4, 5;
    const std::vector<int> y = {0, 0, 1, 1, 0, 0};
    const auto cs = direct_probe(x, y);
    CHECK(cs.clusters.size() == 3);
    check_invariants(cs);
}

TEST_CASE("identical vectors with different labels are an error") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 2, 3, 4, 1, 2;
    CHECK_THROWS_AS((void)direct_probe(x, std::vector<int>{0, 1, 1}), Error);
    CHECK_NOTHROW((void)direct_probe(x, std::vector<int>{0, 1, 0}));
}

TEST_CASE("preconditions") {
    Eigen::MatrixXd x(2, 1);
    x << 0, 1;
    CHECK_THROWS_AS((void)direct_probe(x, std::vector<int>{0, 0}), Error);
    CHECK_THROWS_AS((void)direct_probe(x, std::vector<int>{0}), Error);
    x(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)direct_probe(x, std::vector<int>{0, 1}), Error);
}

TEST_CASE("evaluation rules") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 10, 11;
    const auto cs = direct_probe(x, std::vector<int>{0, 0, 1, 1});
    Eigen::MatrixXd t(3, 1);
    t << -5, 5.4, 20;
    CHECK(evaluate_probe(cs, t, std::vector<int>{0, 0, 1}).overall_accuracy == 1.0);
    Eigen::MatrixXd u(1, 1);
    u << 5.6;
    CHECK(cs.clusters[assign_clusters(cs, u)[0]].label == 1);
    CHECK(cs.clusters[assign_clusters(cs, u, AssignRule::Centroid)[0]].label == 1);
    CHECK_THROWS_AS((void)evaluate_probe(cs, Eigen::MatrixXd(0, 1), std::vector<int>{}), Error);
    CHECK(parse_assign_rule("centroid") == AssignRule::Centroid);
    CHECK_THROWS_AS((void)parse_assign_rule("knn"), Error);
}

TEST_CASE("nearest-member and centroid rules can differ") {
    // label 0: a long thin cluster from 0 to 10; label 1: a point cloud at 13
    Eigen::MatrixXd x(6, 2);
    x << 0, 0, 5, 0, 10, 0, 13, 3, 13, -3, 16, 0;
    const auto cs = direct_probe(x, std::vector<int>{0, 0, 0, 1, 1, 1});
    REQUIRE(cs.clusters.size() == 2);
    Eigen::MatrixXd t(1, 2);
    t << 10.5, 0;  // next to member 10, but closer to centroid (14, 0) than (5, 0)
    CHECK(cs.clusters[assign_clusters(cs, t)[0]].label == 0);
    CHECK(cs.clusters[assign_clusters(cs, t, AssignRule::Centroid)[0]].label == 1);
}

TEST_CASE("empty clusters are rejected at evaluation") {
    Eigen::MatrixXd x(2, 1);
    x << 0, 1;
    auto cs = direct_probe(x, std::vector<int>{0, 1});
    cs.clusters[0].members.clear();
    CHECK_THROWS_AS((void)evaluate_probe(cs, x, std::vector<int>{0, 1}), Error);
}

TEST_CASE("deterministic") {
    Rng rng(4);
    auto train = blobs({vec({0, 0}), vec({1, 1})}, {0, 1}, 30, 1.0, rng);
    const auto a = direct_probe(train.x, train.y);
    const auto b = direct_probe(train.x, train.y);
    REQUIRE(a.clusters.size() == b.clusters.size());
    for (std::size_t k = 0; k < a.clusters.size(); ++k) CHECK(a.clusters[k].members == b.clusters[k].members);
}
