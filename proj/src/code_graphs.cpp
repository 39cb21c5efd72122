#include "codeattn/code_graphs.hpp"

namespace codeattn {

SyntaxGraph syntax_graph(const Ast& ast) {
    std::vector<Edge> edges;
    for (const auto& n : ast.nodes) {
        if (n.is_leaf()) continue;
        std::vector<std::uint32_t> leaves;
        for (const int c : n.children) {
            const auto& child = ast.node(c);
            if (child.is_leaf()) leaves.push_back(static_cast<std::uint32_t>(child.token));
        }
        for (std::size_t a = 0; a < leaves.size(); ++a) {
            for (std::size_t b = a + 1; b < leaves.size(); ++b) edges.emplace_back(leaves[a], leaves[b]);
        }
    }
    return Graph::undirected(ast.num_tokens(), std::move(edges));
}

SyntaxGraph non_identifier_graph(const SyntaxGraph& g, std::span<const CodeToken> tokens) {
    if (tokens.size() != g.n_nodes) throw Error("token list does not match graph node count");
    std::vector<Edge> kept;
    for (const auto& e : g.edges) {
        if (tokens[e.first].category != TokenCategory::Identifier &&
            tokens[e.second].category != TokenCategory::Identifier)
            kept.push_back(e);
    }
    return Graph{g.n_nodes, std::move(kept), g.directed};
}

std::size_t tree_distance(const Ast& ast, std::size_t i, std::size_t j) {
    if (i >= ast.num_tokens() || j >= ast.num_tokens()) throw Error("token index out of range");
    if (i == j) throw Error("tree_distance requires two distinct tokens");
    int a = ast.leaf_of_token[i];
    int b = ast.leaf_of_token[j];
    std::size_t dist = 0;
    while (ast.node(a).depth > ast.node(b).depth) {
        a = ast.node(a).parent;
        ++dist;
    }
    while (ast.node(b).depth > ast.node(a).depth) {
        b = ast.node(b).parent;
        ++dist;
    }
    while (a != b) {
        a = ast.node(a).parent;
        b = ast.node(b).parent;
        dist += 2;
    }
    return dist;
}

bool are_siblings(const Ast& ast, std::size_t i, std::size_t j) {
    if (i >= ast.num_tokens() || j >= ast.num_tokens()) throw Error("token index out of range");
    if (i == j) return false;
    return ast.leaf(i).parent == ast.leaf(j).parent;
}

}  // namespace codeattn
