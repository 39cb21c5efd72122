#include <doctest.h>

#include "codeattn/ast.hpp"
#include "codeattn/token_align.hpp"

using namespace codeattn;

namespace {

std::vector<ByteSpan> spans_of(const Ast& ast) {
    std::vector<ByteSpan> out;
    for (const auto& t : ast.tokens) out.push_back(t.span);
    return out;
}

}  // namespace

TEST_CASE("identical tokenization aligns to the identity") {
    const Ast ast = parse_ast("x = f(y)\n");
    const auto r = build_alignment(spans_of(ast), ast.tokens);
    CHECK(r.alignment.entries == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(r.diagnostics.empty());
}

TEST_CASE("split **kwargs maps every piece to the one code token") {
    const std::string src = "f(**kwargs)";
    const Ast ast = parse_ast(src);
    REQUIRE(ast.tokens[2].text == "**kwargs");
    const std::vector<ByteSpan> subs = {{0, 0}, {0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 10}, {10, 11}, {11, 11}};
    const auto r = build_alignment(subs, ast.tokens);
    CHECK(r.alignment.entries == std::vector<int>{-1, 0, 1, 2, 2, 2, 3, -1});
    r.alignment.validate();
}

TEST_CASE("start-of-sequence position maps to the sentinel") {
    const Ast ast = parse_ast("x\n");
    const auto r = build_alignment(std::vector<ByteSpan>{{0, 0}, {0, 1}}, ast.tokens);
    CHECK(r.alignment.entries.front() == Alignment::kSentinel);
}

TEST_CASE("a sub-token straddling two code tokens goes to the larger overlap") {
    const Ast ast = parse_ast("abc=d\n");  // abc [0,3) = [3,4) d [4,5)
    const auto r = build_alignment(std::vector<ByteSpan>{{0, 1}, {1, 4}, {3, 4}, {4, 5}}, ast.tokens);
    CHECK(r.alignment.entries == std::vector<int>{0, 0, 1, 2});
    CHECK(r.diagnostics.empty());
}

TEST_CASE("an overlap tie goes to the earlier code token with a diagnostic") {
    const Ast ast = parse_ast("ab=c\n");  // ab [0,2) = [2,3) c [3,4)
    const auto r = build_alignment(std::vector<ByteSpan>{{0, 1}, {1, 3}, {2, 3}, {3, 4}}, ast.tokens);
    CHECK(r.alignment.entries == std::vector<int>{0, 0, 1, 2});
    CHECK(r.diagnostics.size() == 1);
}

TEST_CASE("uncovered code tokens and empty input are rejected") {
    const Ast ast = parse_ast("x = 1\n");
    CHECK_THROWS_AS((void)build_alignment(std::vector<ByteSpan>{{0, 1}, {4, 5}}, ast.tokens), Error);
    CHECK_THROWS_AS((void)build_alignment(std::vector<ByteSpan>{}, ast.tokens), Error);
}

TEST_CASE("alignment validation") {
    Alignment a{{-1, 0, 0, 1, -1}};
    CHECK(a.num_code() == 2);
    CHECK_NOTHROW(a.validate());
    CHECK_THROWS_AS((Alignment{{0, 2}}.validate()), Error);
    CHECK_THROWS_AS((Alignment{{1, 0}}.validate()), Error);
    CHECK_NOTHROW(Alignment{{1, 0}}.validate(false));
}

TEST_CASE("attention merge: block mean of the aligned sub-tokens") {
    Eigen::Matrix3d raw;
    raw << .2, .2, .6, .4, .0, .6, .5, .3, .2;
    const auto m = merge_attention(raw, Alignment{{0, 0, 1}}, 1, 2);
    Eigen::Matrix2d want;
    want << .2, .6, .4, .2;
    CHECK((m.matrix - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.layer == 1);
    CHECK(m.head == 2);
}

TEST_CASE("identity alignment removes sentinel rows and columns only") {
    Eigen::Matrix4f raw;
    raw << .1f, .2f, .3f, .4f, .5f, .1f, .2f, .2f, .3f, .3f, .3f, .1f, .25f, .25f, .25f, .25f;
    const auto m = merge_attention(raw, Alignment{{-1, 0, 1, -1}});
    CHECK(m.matrix.rows() == 2);
    CHECK(m.matrix(0, 0) == doctest::Approx(0.1));
    CHECK(m.matrix(0, 1) == doctest::Approx(0.2));
    CHECK(m.matrix(1, 0) == doctest::Approx(0.3));
    CHECK(m.matrix(1, 1) == doctest::Approx(0.3));
}

TEST_CASE("hidden merge: arithmetic mean") {
    Eigen::MatrixXd raw(3, 2);
    raw << 1, 3, 3, 5, 7, 7;
    const auto h = merge_hidden(raw, Alignment{{0, 0, 1}});
    CHECK(h.vectors(0, 0) == 2.0);
    CHECK(h.vectors(0, 1) == 4.0);
    CHECK(h.vectors(1, 0) == 7.0);
    Eigen::MatrixXd same(2, 2);
    same << 1.5, -2, 1.5, -2;
    CHECK(merge_hidden(same, Alignment{{0, 0}}).vectors.row(0) == same.row(0));
}

TEST_CASE("merging commutes with a consistent permutation of sub-tokens") {
    Eigen::MatrixXd raw(4, 4);
    raw << .1, .2, .3, .4, .4, .3, .2, .1, .25, .25, .25, .25, .7, .1, .1, .1;
    const std::vector<int> align = {0, 1, 1, 2};
    const std::vector<int> perm = {2, 0, 3, 1};
    Eigen::MatrixXd permuted(4, 4);
    std::vector<int> palign(4);
    for (int i = 0; i < 4; ++i) {
        palign[static_cast<std::size_t>(i)] = align[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        for (int j = 0; j < 4; ++j) permuted(i, j) = raw(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    const auto a = merge_attention(raw, Alignment{align});
    const auto b = merge_attention(permuted, Alignment{palign});
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("raw rows that are not stochastic are reported") {
    Eigen::Matrix2d raw;
    raw << .5, .5, .5, .6;
    CHECK(non_stochastic_rows(raw) == std::vector<Eigen::Index>{1});
}

TEST_CASE("shape mismatch between matrix and alignment") {
    CHECK_THROWS_AS((void)merge_attention(Eigen::Matrix2d::Identity(), Alignment{{0, 0, 1}}), Error);
    CHECK_THROWS_AS((void)merge_hidden(Eigen::Matrix2d::Identity(), Alignment{{0, 0, 1}}), Error);
}
