#include <doctest.h>

#include "codeattn/graph_metrics.hpp"
#include "synthetic.hpp"

using namespace codeattn;

TEST_CASE("precision, recall and F from set arithmetic") {
    // A=0 B=1 C=2 D=3
    const Graph m = Graph::undirected(4, {{0, 1}, {1, 2}, {2, 3}});
    const Graph c = Graph::undirected(4, {{0, 1}, {1, 3}});
    const PRF r = precision_recall_f(m, c);
    CHECK(r.precision == doctest::Approx(1.0 / 3.0));
    CHECK(r.recall == doctest::Approx(0.5));
    CHECK(r.f_score == doctest::Approx(0.4));
    CHECK(r.tp == 1);
    CHECK(r.fp == 2);
    CHECK(r.fn == 1);
}

TEST_CASE("identical graphs score one; an empty model graph scores zero") {
    const Graph g = Graph::undirected(3, {{0, 1}, {1, 2}});
    const PRF same = precision_recall_f(g, g);
    CHECK(same.precision == 1.0);
    CHECK(same.recall == 1.0);
    CHECK(same.f_score == 1.0);
    const PRF none = precision_recall_f(Graph::undirected(3, {}), g);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f_score == 0.0);
}

TEST_CASE("node sets must agree") {
    CHECK_THROWS_AS((void)precision_recall_f(Graph::undirected(3, {}), Graph::undirected(4, {})), Error);
    CHECK_THROWS_AS((void)graph_edit_distance(Graph::undirected(3, {}), Graph::undirected(4, {})), Error);
}

TEST_CASE("directed model graphs are scored against both orientations") {
    const Graph m = Graph::directed_graph(3, {{1, 0}, {0, 1}, {2, 1}});
    const Graph c = Graph::undirected(3, {{0, 1}});
    const PRF r = precision_recall_f(m, c);
    CHECK(r.tp == 2);
    CHECK(r.fp == 1);
    CHECK(r.fn == 0);
}

TEST_CASE("graph edit distance") {
    const Graph m = Graph::undirected(4, {{0, 1}, {1, 2}});
    const Graph c = Graph::undirected(4, {{0, 1}, {2, 3}});
    CHECK(graph_edit_distance(m, c) == 2);
    CHECK(ged_per_node(m, c) == 0.5);
    CHECK(graph_edit_distance(m, m) == 0);
    // k extra code edges disjoint from the model graph add exactly k
    const Graph c2 = Graph::undirected(4, {{0, 1}, {2, 3}, {0, 3}, {0, 2}});
    CHECK(graph_edit_distance(m, c2) == 4);
}

TEST_CASE("sweep argmax takes the first maximum") {
    // a pair of heads on one 3-token sample, code graph = {0-1}
    Eigen::MatrixXf a(3, 3);
    a << 0, 0.2f, 0.02f, 0.2f, 0, 0.02f, 0.02f, 0.02f, 0;
    const std::vector<Eigen::MatrixXf> mats = {a};
    const std::vector<Graph> code = {Graph::undirected(3, {{0, 1}})};
    const std::vector<double> taus = {0.01, 0.05, 0.1, 0.3};
    const HeadSweep hs = sweep_head(mats, code, taus, {}, 0, 0);
    REQUIRE(hs.points.size() == 4);
    CHECK(hs.points[0].prf.precision == doctest::Approx(1.0 / 3.0));
    CHECK(hs.points[1].prf.f_score == 1.0);
    CHECK(hs.points[2].prf.f_score == 1.0);
    CHECK(hs.points[3].prf.f_score == 0.0);
    CHECK(hs.argmax == 1);
    CHECK(hs.best().tau == 0.05);
    CHECK_THROWS_AS((void)sweep_head(mats, code, std::vector<double>{0.3, 0.1}, {}, 0, 0), Error);
}

TEST_CASE("micro pools counts, macro averages rates") {
    Eigen::MatrixXf a(3, 3), b(3, 3);
    a << 0, 1, 1, 1, 0, 1, 1, 1, 0;  // all three edges
    b << 0, 1, 0, 1, 0, 0, 0, 0, 0;  // only 0-1
    const std::vector<Eigen::MatrixXf> mats = {a, b};
    const std::vector<Graph> code = {Graph::undirected(3, {{0, 1}}), Graph::undirected(3, {{0, 1}})};
    const std::vector<double> taus = {0.5};
    const auto micro = sweep_head(mats, code, taus, {Symmetrize::Max, Aggregation::Micro}, 0, 0);
    const auto macro = sweep_head(mats, code, taus, {Symmetrize::Max, Aggregation::Macro}, 0, 0);
    CHECK(micro.points[0].prf.precision == doctest::Approx(2.0 / 4.0));
    CHECK(macro.points[0].prf.precision == doctest::Approx((1.0 / 3.0 + 1.0) / 2.0));
}

TEST_CASE("best head per layer breaks ties toward the lower index") {
    std::vector<HeadSweep> sweeps;
    const double f[] = {0.2, 0.5, 0.5};
    for (int h = 0; h < 3; ++h) {
        HeadSweep s;
        s.layer = 0;
        s.head = h;
        PRF p;
        p.f_score = f[h];
        s.points.push_back({0.05, p});
        sweeps.push_back(s);
    }
    CHECK(best_head_per_layer(sweeps) == std::vector<int>{1});
    CHECK(best_head_per_layer(std::span(sweeps).first(1)) == std::vector<int>{0});
}

TEST_CASE("next-token head scores F = 1 across the grid") {
    const std::size_t n = 12;
    Eigen::MatrixXf a = Eigen::MatrixXf::Constant(n, n, 0.001f);
    std::vector<Edge> chain;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = 0.9f;
        chain.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1));
    }
    const std::vector<Eigen::MatrixXf> mats = {a};
    const std::vector<Graph> code = {Graph::undirected(n, chain)};
    const HeadSweep hs = sweep_head(mats, code, kDefaultTaus, {}, 0, 0);
    for (const auto& p : hs.points) CHECK(p.prf.f_score == 1.0);
    CHECK(hs.argmax == 0);
}

TEST_CASE("code graph kinds parse") {
    CHECK(parse_code_graph_kind("non-identifier") == CodeGraphKind::NonIdentifier);
    CHECK(to_string(CodeGraphKind::Dfg) == "dfg");
    CHECK_THROWS_AS((void)parse_code_graph_kind("ast"), Error);
    CHECK(parse_aggregation("macro") == Aggregation::Macro);
    CHECK_THROWS_AS((void)parse_aggregation("mean"), Error);
}

TEST_CASE("evaluate_run emits one row per layer, head and tau") {
    const auto programs = synth::random_corpus(21, 3, 6);
    const auto run = synth::synthetic_run(programs, {2, 2, 4, 3});
    const auto code = code_graphs_for_run(run);
    const std::vector<double> taus = {0.05, 0.1, 0.3};
    const auto rows = evaluate_run(run, code, taus, CodeGraphKind::Syntax, {});
    CHECK(rows.size() == 2 * 2 * 3);
    for (const auto& r : rows) {
        CHECK(r.prf.precision >= 0.0);
        CHECK(r.prf.recall <= 1.0);
        CHECK(r.ged_per_node_syntax >= 0.0);
    }
    const auto csv = metrics_csv(rows);
    const auto back = parse_metrics_csv(csv);
    REQUIRE(back.size() == rows.size());
    CHECK(metrics_csv(back) == csv);
    CHECK(back[5].tau == doctest::Approx(rows[5].tau));
}

TEST_CASE("code graphs for a run check the manifest tokens") {
    const auto programs = synth::random_corpus(21, 1, 4);
    auto run = synth::synthetic_run(programs, {1, 1, 2, 3});
    run.samples[0].code_tokens[0].span.end += 1;
    CHECK_THROWS_WITH_AS((void)code_graphs_for_run(run), doctest::Contains("p000"), Error);
    run.samples[0].code.reset();
    CHECK_THROWS_AS((void)code_graphs_for_run(run), Error);
}
