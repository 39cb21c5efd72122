#include <doctest.h>

#include <numeric>

#include "codeattn/rng.hpp"
#include "codeattn/separability.hpp"
#include "codeattn/types.hpp"

using namespace codeattn;

namespace {

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> v) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : v) {
        Eigen::Index c = 0;
        for (const double x : row) m(r, c++) = x;
        ++r;
    }
    return m;
}

}  // namespace

TEST_CASE("two points: margin is their distance") {
    const auto a = rows({{0, 0}});
    const auto b = rows({{3, 4}});
    const auto s = max_margin_separator(a, b);
    REQUIRE(s);
    CHECK(s->margin == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(s->w.norm() == doctest::Approx(1.0));
    CHECK(s->w.dot(a.row(0).transpose()) + s->bias == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("segments: margin is the gap between them") {
    const auto a = rows({{0, 0}, {0, 2}});
    const auto b = rows({{1, 0}, {3, 5}, {1, 2}});
    const auto s = max_margin_separator(a, b);
    REQUIRE(s);
    CHECK(s->margin == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(linearly_separable(a, b));
}

TEST_CASE("a point inside the other hull is not separable") {
    const auto a = rows({{0, 0}, {2, 0}, {0, 2}});
    const auto b = rows({{0.5, 0.5}});
    CHECK_FALSE(max_margin_separator(a, b));
    CHECK_FALSE(linearly_separable(a, b));
}

TEST_CASE("XOR corners are not separable; each corner pair is") {
    const auto a = rows({{0, 0}, {1, 1}});
    const auto b = rows({{0, 1}, {1, 0}});
    CHECK_FALSE(linearly_separable(a, b));
    CHECK(linearly_separable(rows({{0, 0}}), b));
}

TEST_CASE("touching hulls count as overlapping") {
    CHECK_FALSE(linearly_separable(rows({{0, 0}, {1, 0}}), rows({{1, 0}, {2, 0}})));
}

TEST_CASE("certificates hold on every point") {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = 20;
        Eigen::MatrixXd pts(2 * n, 5);
        for (Eigen::Index i = 0; i < 2 * n; ++i) {
            for (Eigen::Index c = 0; c < 5; ++c) pts(i, c) = rng.normal() + (i < n ? 3.0 : -3.0) * (c == 0);
        }
        std::vector<std::size_t> ia(static_cast<std::size_t>(n)), ib(static_cast<std::size_t>(n));
        std::iota(ia.begin(), ia.end(), std::size_t{0});
        std::iota(ib.begin(), ib.end(), static_cast<std::size_t>(n));
        const auto s = max_margin_separator(pts, ia, ib);
        if (!s) {
            CHECK_FALSE(linearly_separable(pts, ia, ib));
            continue;
        }
        for (const auto i : ia) CHECK(s->w.dot(pts.row(static_cast<Eigen::Index>(i)).transpose()) + s->bias >= s->margin / 2 - 1e-9);
        for (const auto i : ib) CHECK(s->w.dot(pts.row(static_cast<Eigen::Index>(i)).transpose()) + s->bias <= -s->margin / 2 + 1e-9);
        CHECK(linearly_separable(pts, ia, ib));
    }
}

TEST_CASE("max margin matches the closed form for symmetric clouds") {
    // a = {(1, y)}, b = {(-1, y)}: best separator is x = 0 with margin 2
    const auto a = rows({{1, 0}, {1, 5}, {1, -3}, {4, 1}});
    const auto b = rows({{-1, 2}, {-1, -7}, {-6, 0}});
    const auto s = max_margin_separator(a, b);
    REQUIRE(s);
    CHECK(s->margin == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(std::abs(s->w(0)) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("input validation") {
    const Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(3, 2);
    const std::vector<std::size_t> a = {0}, none = {}, bad = {7};
    CHECK_THROWS_AS((void)linearly_separable(pts, a, none), Error);
    CHECK_THROWS_AS((void)linearly_separable(pts, a, bad), Error);
    CHECK_THROWS_AS((void)linearly_separable(Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 3)), Error);
}
