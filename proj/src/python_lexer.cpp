#include "codeattn/python_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace codeattn {
namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",   "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",     "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",    "while",  "with",  "yield"};

// Longest match first.
constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", "+=",
    "-=",  "*=",  "/=",  "%=",  "&=",  "|=", "^=", "@=", ":=", "+",  "-",  "*",  "/",  "%",  "@",
    "&",   "|",   "^",   "~",   "<",   ">",  "(",  ")",  "[",  "]",  "{",  "}",  ",",  ":",  ";",
    ".",   "="};

bool is_ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}
bool is_ident_char(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<LexToken> run() {
        while (pos_ < src_.size()) {
            if (at_line_start_ && paren_depth_ == 0) {
                if (!handle_indentation()) continue;
            }
            const unsigned char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\f') {
                ++pos_;
            } else if (c == '#') {
                skip_comment();
            } else if (c == '\\') {
                line_continuation();
            } else if (c == '\n' || c == '\r') {
                const std::size_t start = pos_;
                consume_newline();
                if (paren_depth_ == 0) {
                    emit(LexKind::Newline, start, start);
                    at_line_start_ = true;
                }
            } else if (string_start()) {
                lex_string();
            } else if (is_ident_start(c)) {
                lex_name();
            } else if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
                lex_number();
            } else {
                lex_operator();
            }
        }
        // Unclosed brackets are left to the parser, which reports the first
        // token that cannot continue the construct.
        if (!out_.empty() && out_.back().kind != LexKind::Newline) emit(LexKind::Newline, pos_, pos_);
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(LexKind::Dedent, pos_, pos_);
        }
        emit(LexKind::End, pos_, pos_);
        return std::move(out_);
    }

private:
    void emit(LexKind kind, std::size_t b, std::size_t e) {
        out_.push_back({kind, {b, e}, src_.substr(b, e - b)});
    }

    // Returns false when the line was blank or comment-only and has been consumed.
    bool handle_indentation() {
        std::size_t col = 0;
        std::size_t p = pos_;
        while (p < src_.size()) {
            const char c = src_[p];
            if (c == ' ') {
                ++col;
            } else if (c == '\t') {
                col = (col / 8 + 1) * 8;
            } else if (c == '\f') {
                col = 0;
            } else {
                break;
            }
            ++p;
        }
        pos_ = p;
        if (p >= src_.size()) return false;
        if (src_[p] == '#') {
            skip_comment();
            if (pos_ < src_.size()) consume_newline();
            return false;
        }
        if (src_[p] == '\n' || src_[p] == '\r') {
            consume_newline();
            return false;
        }
        if (src_[p] == '\\') {
            // A continuation at the start of a logical line joins it with the next.
            line_continuation();
            return false;
        }
        at_line_start_ = false;
        if (col > indents_.back()) {
            indents_.push_back(col);
            emit(LexKind::Indent, p, p);
        } else if (col < indents_.back()) {
            while (col < indents_.back()) {
                indents_.pop_back();
                emit(LexKind::Dedent, p, p);
            }
            if (col != indents_.back()) throw SyntaxError("unindent does not match any outer indentation level", p);
        }
        return true;
    }

    void skip_comment() {
        while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
    }

    void consume_newline() {
        if (src_[pos_] == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') ++pos_;
        ++pos_;
    }

    void line_continuation() {
        const std::size_t at = pos_;
        ++pos_;
        if (pos_ >= src_.size() || (src_[pos_] != '\n' && src_[pos_] != '\r'))
            throw SyntaxError("unexpected character after line continuation", at);
        consume_newline();
    }

    bool string_start() const {
        std::size_t p = pos_;
        std::size_t n = 0;
        while (p < src_.size() && n < 3) {
            const char c = src_[p];
            if (c == '\'' || c == '"') return true;
            if (std::string_view("rRbBuUfF").find(c) == std::string_view::npos) return false;
            ++p;
            ++n;
        }
        return p < src_.size() && (src_[p] == '\'' || src_[p] == '"');
    }

    void lex_string() {
        const std::size_t start = pos_;
        while (src_[pos_] != '\'' && src_[pos_] != '"') ++pos_;
        const char q = src_[pos_];
        const bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q;
        pos_ += triple ? 3 : 1;
        for (;;) {
            if (pos_ >= src_.size()) throw SyntaxError("unterminated string literal", start);
            const char c = src_[pos_];
            if (c == '\\') {
                pos_ += 2;
                continue;
            }
            if (!triple && (c == '\n' || c == '\r')) throw SyntaxError("unterminated string literal", start);
            if (c == q) {
                if (!triple) {
                    ++pos_;
                    break;
                }
                if (pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q) {
                    pos_ += 3;
                    break;
                }
            }
            ++pos_;
        }
        pos_ = std::min(pos_, src_.size());
        emit(LexKind::String, start, pos_);
    }

    void lex_name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        emit(LexKind::Name, start, pos_);
    }

    void lex_number() {
        const std::size_t start = pos_;
        auto digits = [&](auto pred) {
            while (pos_ < src_.size() && (pred(src_[pos_]) || src_[pos_] == '_')) ++pos_;
        };
        if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
            std::string_view("xXoObB").find(src_[pos_ + 1]) != std::string_view::npos) {
            pos_ += 2;
            digits([](unsigned char c) { return std::isxdigit(c) != 0; });
        } else {
            digits(is_digit);
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                digits(is_digit);
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t p = pos_ + 1;
                if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
                if (p < src_.size() && is_digit(src_[p])) {
                    pos_ = p;
                    digits(is_digit);
                }
            }
        }
        if (pos_ < src_.size() && std::string_view("jJlL").find(src_[pos_]) != std::string_view::npos) ++pos_;
        if (pos_ < src_.size() && is_ident_start(src_[pos_])) throw SyntaxError("invalid number literal", start);
        emit(LexKind::Number, start, pos_);
    }

    void lex_operator() {
        const std::string_view rest = src_.substr(pos_);
        for (const auto op : kOperators) {
            if (rest.starts_with(op)) {
                const char c = op[0];
                if (op.size() == 1 && (c == '(' || c == '[' || c == '{')) ++paren_depth_;
                if (op.size() == 1 && (c == ')' || c == ']' || c == '}')) {
                    if (paren_depth_ == 0) throw SyntaxError("unmatched '" + std::string(op) + "'", pos_);
                    --paren_depth_;
                }
                emit(LexKind::Op, pos_, pos_ + op.size());
                pos_ += op.size();
                return;
            }
        }
        throw SyntaxError("invalid character", pos_);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int paren_depth_ = 0;
    bool at_line_start_ = true;
    std::vector<std::size_t> indents_{0};
    std::vector<LexToken> out_;
};

}  // namespace

bool is_python_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<LexToken> lex_python(std::string_view source) { return Lexer(source).run(); }

}  // namespace codeattn
