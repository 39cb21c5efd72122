#include <doctest.h>

#include "codeattn/code_graphs.hpp"
#include "dfg_notation.hpp"

using namespace codeattn;
using Edges = std::set<std::string>;

namespace {

Edges dfg(const std::string& src) {
    const Ast ast = parse_ast(src);
    return synth::dfg_notation(ast, data_flow_graph(ast));
}

}  // namespace

TEST_CASE("use of a previous definition") {
    CHECK(dfg("a = 1\nb = a\n") == Edges{"a#2 <- a#1 ComesFrom", "b#1 <- a#2 ComputedFrom"});
}

TEST_CASE("assignment target computed from every variable of the value") {
    CHECK(dfg("x = a + b\n") == Edges{"x#1 <- a#1 ComputedFrom", "x#1 <- b#1 ComputedFrom"});
}

TEST_CASE("programs without identifiers have no data flow") {
    const Ast ast = parse_ast("print(1 + 2)\n");
    const auto g = data_flow_graph(ast);
    CHECK(g.edges.empty());
    CHECK(g.n_nodes == ast.num_tokens());
}

TEST_CASE("augmented assignment") {
    CHECK(dfg("x = 1\nx += y\nprint(x)\n") == Edges{"x#2 <- y#1 ComputedFrom", "x#3 <- x#2 ComesFrom"});
}

TEST_CASE("tuple swap pairs elements") {
    CHECK(dfg("a, b = b, a\n") == Edges{"a#1 <- b#2 ComputedFrom", "b#1 <- a#2 ComputedFrom"});
}

TEST_CASE("tuple target from a call takes every right-hand variable") {
    CHECK(dfg("a, b = f(c)\n") == Edges{"a#1 <- f#1 ComputedFrom", "a#1 <- c#1 ComputedFrom", "b#1 <- f#1 ComputedFrom",
                                        "b#1 <- c#1 ComputedFrom"});
}

TEST_CASE("branches join at the use") {
    CHECK(dfg("if c:\n    v = 1\nelse:\n    v = 2\nprint(v)\n") ==
          Edges{"v#3 <- v#1 ComesFrom", "v#3 <- v#2 ComesFrom"});
    CHECK(dfg("x = 1\nif c:\n    x = 2\nprint(x)\n") == Edges{"x#3 <- x#1 ComesFrom", "x#3 <- x#2 ComesFrom"});
}

TEST_CASE("loop bodies see their own definitions on the second pass") {
    CHECK(dfg("x = 0\nwhile x < n:\n    x = x + 1\n") ==
          Edges{"x#2 <- x#1 ComesFrom", "x#4 <- x#1 ComesFrom", "x#2 <- x#3 ComesFrom", "x#4 <- x#3 ComesFrom",
                "x#3 <- x#4 ComputedFrom"});
}

TEST_CASE("edges are sorted, unique and free of self loops") {
    const Ast ast = parse_ast("for i in range(n):\n    s = s + i\n    s += i\nprint(s)\n");
    const auto g = data_flow_graph(ast);
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        CHECK(g.edges[k].src != g.edges[k].dst);
        if (k) CHECK(g.edges[k - 1] < g.edges[k]);
        CHECK(ast.tokens[g.edges[k].src].category == TokenCategory::Identifier);
        CHECK(ast.tokens[g.edges[k].dst].category == TokenCategory::Identifier);
    }
}

TEST_CASE("unsupported statements are skipped with a diagnostic") {
    const Ast ast = parse_ast("global g\ng = 1\nh = g\n");
    const auto g = data_flow_graph(ast);
    REQUIRE_FALSE(g.diagnostics.empty());
    CHECK(g.diagnostics[0].byte_offset == 0);
    CHECK(synth::dfg_notation(ast, g) == Edges{"g#3 <- g#2 ComesFrom", "h#1 <- g#3 ComputedFrom"});
}

TEST_CASE("json form") {
    const Ast ast = parse_ast("x = a\n");
    CHECK(dfg_to_json(data_flow_graph(ast)) == R"({"edges":[[2,0,"ComputedFrom"]]})");
}

TEST_CASE("undirected view drops labels and direction") {
    const Ast ast = parse_ast("a = 1\nb = a\n");
    const Graph g = data_flow_graph(ast).as_undirected();
    CHECK_FALSE(g.directed);
    CHECK(g.edges == std::vector<Edge>{{0, 5}, {3, 5}});
}
