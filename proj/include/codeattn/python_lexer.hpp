#pragma once

#include <string_view>
#include <vector>

#include "codeattn/types.hpp"

namespace codeattn {

enum class LexKind { Name, Number, String, Op, Newline, Indent, Dedent, End };

struct LexToken {
    LexKind kind;
    ByteSpan span;
    std::string_view text;  // view into the source; empty for layout tokens
};

/// Tokenizes Python 3 source. Comments and blank lines produce no tokens;
/// indentation is reported as Indent/Dedent and logical line ends as Newline.
/// Throws SyntaxError on unterminated strings, bad dedents and stray bytes.
std::vector<LexToken> lex_python(std::string_view source);

bool is_python_keyword(std::string_view word);

}  // namespace codeattn
