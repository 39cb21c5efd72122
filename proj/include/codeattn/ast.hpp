#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "codeattn/types.hpp"

namespace codeattn {

/// Role of a child inside its parent, for the handful of constructs that
/// data-flow extraction needs to tell apart (assignment sides, loop target...).
enum class AstField : std::uint8_t { None, Left, Right, Name, Value, Body };

struct AstNode {
    std::string kind;  // grammar non-terminal, or leaf label ("identifier", "def", "(", ...)
    int parent = -1;
    std::vector<int> children;
    int token = -1;  // code-token index; set on leaves only
    AstField field = AstField::None;
    int depth = 0;

    bool is_leaf() const { return token >= 0; }
};

/// Concrete syntax tree whose leaves are exactly the code tokens, in order.
/// Interior node kinds follow the public tree-sitter Python grammar.
struct Ast {
    std::string source;
    std::vector<CodeToken> tokens;
    std::vector<AstNode> nodes;
    std::vector<int> leaf_of_token;  // token index -> node id
    int root = -1;

    const AstNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
    const AstNode& leaf(std::size_t token) const { return node(leaf_of_token[token]); }
    std::size_t num_tokens() const { return tokens.size(); }

    /// Leaf (token) descendants of `id` in source order.
    std::vector<int> leaf_tokens_under(int id) const;
};

/// Parses UTF-8 Python 3 source. Throws SyntaxError (with byte offset) on
/// invalid input and Error on empty input.
Ast parse_ast(std::string_view source);

/// Deterministic category for a parsed leaf.
TokenCategory categorize_token(const Ast& ast, std::size_t token);

/// Python reserved words plus the probing keyword list (which adds `print`).
bool is_keyword_text(std::string_view text);

}  // namespace codeattn
