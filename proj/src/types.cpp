#include "codeattn/types.hpp"

namespace codeattn {

std::string_view to_string(TokenCategory c) {
    switch (c) {
        case TokenCategory::Identifier: return "identifier";
        case TokenCategory::Keyword: return "keyword";
        case TokenCategory::Operator: return "operator";
        case TokenCategory::Punctuation: return "punctuation";
        case TokenCategory::Literal: return "literal";
    }
    return "identifier";
}

TokenCategory parse_category(std::string_view s) {
    if (s == "identifier") return TokenCategory::Identifier;
    if (s == "keyword") return TokenCategory::Keyword;
    if (s == "operator") return TokenCategory::Operator;
    if (s == "punctuation") return TokenCategory::Punctuation;
    if (s == "literal") return TokenCategory::Literal;
    throw Error("unknown token category '" + std::string(s) + "'");
}

}  // namespace codeattn
