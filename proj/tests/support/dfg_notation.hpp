#pragma once

#include <set>
#include <string>

#include "codeattn/code_graphs.hpp"

namespace synth {

/// "text#k": the k-th (1-based) occurrence of the token's text.
inline std::string occurrence(const codeattn::Ast& ast, std::size_t token) {
    int k = 0;
    for (std::size_t i = 0; i <= token; ++i) k += ast.tokens[i].text == ast.tokens[token].text;
    return ast.tokens[token].text + "#" + std::to_string(k);
}

/// Edges as "dst <- src Label" strings, for comparison with hand annotations.
inline std::set<std::string> dfg_notation(const codeattn::Ast& ast, const codeattn::DfgGraph& g) {
    std::set<std::string> out;
    for (const auto& e : g.edges)
        out.insert(occurrence(ast, e.dst) + " <- " + occurrence(ast, e.src) + " " + std::string(to_string(e.label)));
    return out;
}

}  // namespace synth
