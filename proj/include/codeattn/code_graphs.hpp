#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "codeattn/ast.hpp"
#include "codeattn/graph.hpp"

namespace codeattn {

using SyntaxGraph = Graph;

/// Edges between every pair of leaf children of each interior node
/// (the leaf tokens of one motif structure).
SyntaxGraph syntax_graph(const Ast& ast);

/// Keeps the edges whose endpoints are both non-identifier tokens.
SyntaxGraph non_identifier_graph(const SyntaxGraph& g, std::span<const CodeToken> tokens);

/// Number of edges on the leaf-to-leaf path. Throws when i == j.
std::size_t tree_distance(const Ast& ast, std::size_t i, std::size_t j);

/// True iff both leaves hang directly off the same interior node.
bool are_siblings(const Ast& ast, std::size_t i, std::size_t j);

enum class DfgLabel { ComesFrom, ComputedFrom };

std::string_view to_string(DfgLabel l);

/// Value flows from `src` into `dst`: for `x = a + b` the edges are
/// (a -> x, ComputedFrom) and (b -> x, ComputedFrom); a use of `v` gets
/// (previous definition of v -> use, ComesFrom).
struct DfgEdge {
    std::size_t src;
    std::size_t dst;
    DfgLabel label;

    friend auto operator<=>(const DfgEdge&, const DfgEdge&) = default;
};

struct DfgDiagnostic {
    std::size_t byte_offset;
    std::string message;
};

struct DfgGraph {
    std::size_t n_nodes = 0;  // token count of the program
    std::vector<DfgEdge> edges;  // sorted, unique
    std::vector<DfgDiagnostic> diagnostics;

    /// Label and direction dropped; used for comparison against attention graphs.
    Graph as_undirected() const;
};

DfgGraph data_flow_graph(const Ast& ast);

std::string dfg_to_json(const DfgGraph& g);

}  // namespace codeattn
