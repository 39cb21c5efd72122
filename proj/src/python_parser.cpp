// Recursive-descent parser for Python 3 producing a concrete syntax tree in the
// shape of the tree-sitter Python grammar: single-child chains are collapsed,
// every lexical token except layout becomes a leaf, and the leaf sequence is
// the code-token sequence.

#include <algorithm>
#include <array>
#include <initializer_list>

#include "codeattn/ast.hpp"
#include "codeattn/python_lexer.hpp"

namespace codeattn {

std::vector<int> Ast::leaf_tokens_under(int id) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const AstNode& n = node(cur);
        if (n.is_leaf()) {
            out.push_back(n.token);
            continue;
        }
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

bool is_keyword_text(std::string_view text) {
    return text == "print" || is_python_keyword(text);
}

namespace {

constexpr std::array<std::string_view, 13> kAugmentedOps = {"+=", "-=",  "*=",  "/=",  "//=", "%=", "**=",
                                                          ">>=", "<<=", "&=",  "|=",  "^=",  "@="};

constexpr std::array<std::string_view, 11> kPunctuation = {"(", ")", "[", "]", "{", "}", ",", ":", ";", ".", "->"};

class Parser {
public:
    explicit Parser(std::string_view source) : lex_(lex_python(source)) { ast_.source = std::string(source); }

    Ast run() {
        std::vector<int> body;
        while (!at(LexKind::End)) statement_into(body);
        if (ast_.tokens.empty()) throw Error("empty source: no code tokens");
        ast_.root = make("module", std::move(body));
        finalize();
        return std::move(ast_);
    }

private:
    // --- token access --------------------------------------------------------

    const LexToken& cur() const { return lex_[pos_]; }
    const LexToken& peek(std::size_t k = 1) const { return lex_[std::min(pos_ + k, lex_.size() - 1)]; }
    bool at(LexKind k) const { return cur().kind == k; }
    bool at_op(std::string_view op) const { return cur().kind == LexKind::Op && cur().text == op; }
    bool at_kw(std::string_view kw) const { return cur().kind == LexKind::Name && cur().text == kw; }
    static bool is_op(const LexToken& t, std::string_view op) { return t.kind == LexKind::Op && t.text == op; }

    bool at_plain_name() const { return at(LexKind::Name) && !is_python_keyword(cur().text); }

    [[noreturn]] void fail(const std::string& what) const {
        std::string msg = what;
        if (cur().kind == LexKind::End) {
            msg += " (unexpected end of input)";
        } else if (cur().kind == LexKind::Newline) {
            msg += " (unexpected end of line)";
        } else if (!cur().text.empty()) {
            msg += " near '" + std::string(cur().text) + "'";
        }
        throw SyntaxError(msg, cur().span.begin);
    }

    void skip_layout(LexKind k) {
        if (!at(k)) fail(k == LexKind::Newline ? "expected end of statement" : "expected an indented block");
        ++pos_;
    }

    // --- tree construction ---------------------------------------------------

    // Consumes the current token as a leaf.
    int leaf() {
        const LexToken& t = cur();
        if (t.kind == LexKind::Newline || t.kind == LexKind::Indent || t.kind == LexKind::Dedent ||
            t.kind == LexKind::End)
            fail("unexpected token");
        std::string kind;
        TokenCategory cat = TokenCategory::Operator;
        const std::string text(t.text);
        switch (t.kind) {
            case LexKind::Name:
                if (text == "True" || text == "False" || text == "None") {
                    kind = text == "True" ? "true" : text == "False" ? "false" : "none";
                    cat = TokenCategory::Keyword;
                } else if (is_python_keyword(text)) {
                    kind = text;
                    cat = TokenCategory::Keyword;
                } else {
                    kind = "identifier";
                    cat = text == "print" ? TokenCategory::Keyword : TokenCategory::Identifier;
                }
                break;
            case LexKind::Number:
                kind = (text.find_first_of(".eEjJ") != std::string::npos && !text.starts_with("0x") &&
                        !text.starts_with("0X"))
                           ? "float"
                           : "integer";
                cat = TokenCategory::Literal;
                break;
            case LexKind::String:
                kind = "string";
                cat = TokenCategory::Literal;
                break;
            default:
                kind = text;
                if (text == "...") {
                    kind = "ellipsis";
                    cat = TokenCategory::Literal;
                } else if (std::find(kPunctuation.begin(), kPunctuation.end(), text) != kPunctuation.end()) {
                    cat = TokenCategory::Punctuation;
                }
                break;
        }
        ++pos_;
        return push_leaf(std::move(kind), text, t.span, cat);
    }

    int push_leaf(std::string kind, std::string text, ByteSpan span, TokenCategory cat) {
        const std::size_t index = ast_.tokens.size();
        ast_.tokens.push_back({std::move(text), span, index, cat});
        AstNode n;
        n.kind = std::move(kind);
        n.token = static_cast<int>(index);
        ast_.nodes.push_back(std::move(n));
        const int id = static_cast<int>(ast_.nodes.size() - 1);
        ast_.leaf_of_token.push_back(id);
        return id;
    }

    int expect_op(std::string_view op) {
        if (!at_op(op)) fail("expected '" + std::string(op) + "'");
        return leaf();
    }
    int expect_kw(std::string_view kw) {
        if (!at_kw(kw)) fail("expected '" + std::string(kw) + "'");
        return leaf();
    }
    int expect_name() {
        if (!at_plain_name()) fail("expected identifier");
        return leaf();
    }

    int make(std::string kind, std::vector<int> children) {
        AstNode n;
        n.kind = std::move(kind);
        n.children = std::move(children);
        ast_.nodes.push_back(std::move(n));
        const int id = static_cast<int>(ast_.nodes.size() - 1);
        for (const int c : ast_.nodes.back().children) ast_.nodes[static_cast<std::size_t>(c)].parent = id;
        return id;
    }

    int tag(int id, AstField f) {
        ast_.nodes[static_cast<std::size_t>(id)].field = f;
        return id;
    }

    const std::string& kind_of(int id) const { return ast_.nodes[static_cast<std::size_t>(id)].kind; }

    // `**name` immediately followed by a separator collapses into one code
    // token, keeping dictionary unpacking distinct from iterator unpacking.
    bool at_mergeable_double_star(std::initializer_list<std::string_view> followers) const {
        if (!at_op("**")) return false;
        const LexToken& name = peek(1);
        if (name.kind != LexKind::Name || is_python_keyword(name.text)) return false;
        const LexToken& after = peek(2);
        if (after.kind != LexKind::Op) return false;
        return std::any_of(followers.begin(), followers.end(), [&](std::string_view f) { return after.text == f; });
    }

    int merged_double_star() {
        const ByteSpan span{cur().span.begin, peek(1).span.end};
        pos_ += 2;
        return push_leaf("identifier", ast_.source.substr(span.begin, span.length()), span,
                         TokenCategory::Identifier);
    }

    void finalize() {
        // Children are created before parents, so a reverse sweep from the
        // root fixes depths top-down.
        std::vector<int> stack{ast_.root};
        ast_.nodes[static_cast<std::size_t>(ast_.root)].depth = 0;
        while (!stack.empty()) {
            const int id = stack.back();
            stack.pop_back();
            const auto& n = ast_.nodes[static_cast<std::size_t>(id)];
            for (const int c : n.children) {
                ast_.nodes[static_cast<std::size_t>(c)].depth = n.depth + 1;
                stack.push_back(c);
            }
        }
    }

    // --- statements ----------------------------------------------------------

    void statement_into(std::vector<int>& out) {
        if (at(LexKind::Indent)) fail("unexpected indent");
        if (at(LexKind::Newline)) {
            ++pos_;
            return;
        }
        if (at_op("@")) {
            out.push_back(decorated());
            return;
        }
        if (at(LexKind::Name)) {
            const std::string_view w = cur().text;
            const bool async_prefix = w == "async" && peek().kind == LexKind::Name &&
                                      (peek().text == "def" || peek().text == "for" || peek().text == "with");
            const std::string_view kw = async_prefix ? peek().text : w;
            if (kw == "if") return out.push_back(if_statement());
            if (kw == "while") return out.push_back(while_statement());
            if (kw == "for") return out.push_back(for_statement());
            if (kw == "try") return out.push_back(try_statement());
            if (kw == "with") return out.push_back(with_statement());
            if (kw == "def") return out.push_back(function_definition());
            if (kw == "class") return out.push_back(class_definition());
        }
        simple_statements_into(out);
    }

    void simple_statements_into(std::vector<int>& out) {
        for (;;) {
            out.push_back(small_statement());
            if (!at_op(";")) break;
            out.push_back(leaf());
            if (at(LexKind::Newline)) break;
        }
        skip_layout(LexKind::Newline);
    }

    int block() {
        std::vector<int> body;
        if (at(LexKind::Newline)) {
            ++pos_;
            skip_layout(LexKind::Indent);
            while (!at(LexKind::Dedent)) {
                if (at(LexKind::End)) fail("expected dedent");
                statement_into(body);
            }
            ++pos_;
        } else {
            simple_statements_into(body);
        }
        if (body.empty()) fail("expected statement");
        return tag(make("block", std::move(body)), AstField::Body);
    }

    int small_statement() {
        if (at(LexKind::Name)) {
            const std::string_view w = cur().text;
            if (w == "pass") return make("pass_statement", {leaf()});
            if (w == "break") return make("break_statement", {leaf()});
            if (w == "continue") return make("continue_statement", {leaf()});
            if (w == "return") {
                std::vector<int> ch{leaf()};
                if (!at_statement_end()) ch.push_back(expression_list_or_single(false));
                return make("return_statement", std::move(ch));
            }
            if (w == "del") {
                std::vector<int> ch{leaf()};
                ch.push_back(expression_list_or_single(false));
                return make("delete_statement", std::move(ch));
            }
            if (w == "raise") {
                std::vector<int> ch{leaf()};
                if (!at_statement_end()) {
                    ch.push_back(expression());
                    if (at_kw("from")) {
                        ch.push_back(leaf());
                        ch.push_back(expression());
                    }
                }
                return make("raise_statement", std::move(ch));
            }
            if (w == "global" || w == "nonlocal") {
                std::string kind = std::string(w) + "_statement";
                std::vector<int> ch{leaf(), expect_name()};
                while (at_op(",")) {
                    ch.push_back(leaf());
                    ch.push_back(expect_name());
                }
                return make(std::move(kind), std::move(ch));
            }
            if (w == "assert") {
                std::vector<int> ch{leaf(), expression()};
                if (at_op(",")) {
                    ch.push_back(leaf());
                    ch.push_back(expression());
                }
                return make("assert_statement", std::move(ch));
            }
            if (w == "import") return import_statement();
            if (w == "from") return import_from_statement();
        }
        return expression_statement();
    }

    bool at_statement_end() const { return at(LexKind::Newline) || at_op(";") || at(LexKind::End); }

    int dotted_name() {
        std::vector<int> ch{expect_name()};
        while (at_op(".")) {
            ch.push_back(leaf());
            ch.push_back(expect_name());
        }
        return make("dotted_name", std::move(ch));
    }

    int maybe_aliased(int name) {
        if (!at_kw("as")) return name;
        const int as = leaf();
        return make("aliased_import", {name, as, expect_name()});
    }

    int import_statement() {
        std::vector<int> ch{leaf()};
        ch.push_back(maybe_aliased(dotted_name()));
        while (at_op(",")) {
            ch.push_back(leaf());
            ch.push_back(maybe_aliased(dotted_name()));
        }
        return make("import_statement", std::move(ch));
    }

    int import_from_statement() {
        std::vector<int> ch{leaf()};
        if (at_op(".") || at_op("...")) {
            std::vector<int> prefix;
            while (at_op(".") || at_op("...")) prefix.push_back(leaf());
            std::vector<int> rel{make("import_prefix", std::move(prefix))};
            if (!at_kw("import")) rel.push_back(dotted_name());
            ch.push_back(make("relative_import", std::move(rel)));
        } else {
            ch.push_back(dotted_name());
        }
        ch.push_back(expect_kw("import"));
        if (at_op("*")) {
            ch.push_back(make("wildcard_import", {leaf()}));
        } else {
            const bool paren = at_op("(");
            if (paren) ch.push_back(leaf());
            ch.push_back(maybe_aliased(dotted_name()));
            while (at_op(",")) {
                ch.push_back(leaf());
                if (paren && at_op(")")) break;
                ch.push_back(maybe_aliased(dotted_name()));
            }
            if (paren) ch.push_back(expect_op(")"));
        }
        return make("import_from_statement", std::move(ch));
    }

    // Comma-separated star expressions; `pattern` selects target flavour.
    std::vector<int> star_expression_items(bool& had_comma) {
        std::vector<int> items{star_expression()};
        had_comma = false;
        while (at_op(",")) {
            had_comma = true;
            items.push_back(leaf());
            if (at_statement_end() || at_op("=") || at_op(":") || at_op(")") || is_augmented()) break;
            items.push_back(star_expression());
        }
        return items;
    }

    int star_expression() {
        if (at_op("*")) {
            const int star = leaf();
            return make("list_splat", {star, bitwise_or()});
        }
        return expression();
    }

    int wrap_items(std::vector<int> items, bool had_comma, bool pattern) {
        if (!had_comma) return items.front();
        if (pattern) {
            for (int& it : items) {
                if (kind_of(it) == "list_splat") ast_.nodes[static_cast<std::size_t>(it)].kind = "list_splat_pattern";
            }
        }
        return make(pattern ? "pattern_list" : "expression_list", std::move(items));
    }

    int expression_list_or_single(bool pattern) {
        bool had_comma = false;
        auto items = star_expression_items(had_comma);
        return wrap_items(std::move(items), had_comma, pattern);
    }

    bool is_augmented() const {
        return cur().kind == LexKind::Op &&
               std::find(kAugmentedOps.begin(), kAugmentedOps.end(), cur().text) != kAugmentedOps.end();
    }

    void retag_pattern(int id) {
        auto& n = ast_.nodes[static_cast<std::size_t>(id)];
        if (n.kind == "list_splat") n.kind = "list_splat_pattern";
        if (n.kind == "expression_list") n.kind = "pattern_list";
    }

    // Right-hand side of `=`; handles chained assignment.
    int assignment_rhs() {
        if (at_kw("yield")) return yield_expression();
        bool had_comma = false;
        auto items = star_expression_items(had_comma);
        if (at_op("=")) {
            const int left = tag(wrap_items(std::move(items), had_comma, true), AstField::Left);
            const int eq = leaf();
            const int right = tag(assignment_rhs(), AstField::Right);
            return make("assignment", {left, eq, right});
        }
        return wrap_items(std::move(items), had_comma, false);
    }

    int expression_statement() {
        if (at_kw("yield")) return make("expression_statement", {yield_expression()});
        bool had_comma = false;
        auto items = star_expression_items(had_comma);
        if (at_op("=")) {
            const int left = tag(wrap_items(std::move(items), had_comma, true), AstField::Left);
            const int eq = leaf();
            const int right = tag(assignment_rhs(), AstField::Right);
            return make("expression_statement", {make("assignment", {left, eq, right})});
        }
        if (at_op(":") && !had_comma) {
            const int left = tag(items.front(), AstField::Left);
            std::vector<int> ch{left, leaf(), make("type", {expression()})};
            if (at_op("=")) {
                ch.push_back(leaf());
                ch.push_back(tag(assignment_rhs(), AstField::Right));
            }
            return make("expression_statement", {make("assignment", std::move(ch))});
        }
        if (is_augmented()) {
            const int left = tag(wrap_items(std::move(items), had_comma, true), AstField::Left);
            const int op = leaf();
            const int right =
                tag(at_kw("yield") ? yield_expression() : expression_list_or_single(false), AstField::Right);
            return make("expression_statement", {make("augmented_assignment", {left, op, right})});
        }
        return make("expression_statement", std::move(items));
    }

    int yield_expression() {
        std::vector<int> ch{leaf()};
        if (at_kw("from")) {
            ch.push_back(leaf());
            ch.push_back(expression());
        } else if (!at_statement_end() && !at_op(")") && !at_op("=")) {
            ch.push_back(expression_list_or_single(false));
        }
        return make("yield", std::move(ch));
    }

    int if_statement() {
        std::vector<int> ch{leaf(), named_expression(), expect_op(":"), block()};
        while (at_kw("elif")) {
            std::vector<int> e{leaf(), named_expression(), expect_op(":"), block()};
            ch.push_back(make("elif_clause", std::move(e)));
        }
        if (at_kw("else")) ch.push_back(else_clause());
        return make("if_statement", std::move(ch));
    }

    int else_clause() {
        std::vector<int> e{leaf(), expect_op(":"), block()};
        return make("else_clause", std::move(e));
    }

    int while_statement() {
        std::vector<int> ch{leaf(), named_expression(), expect_op(":"), block()};
        if (at_kw("else")) ch.push_back(else_clause());
        return make("while_statement", std::move(ch));
    }

    int for_statement() {
        std::vector<int> ch;
        if (at_kw("async")) ch.push_back(leaf());
        ch.push_back(expect_kw("for"));
        ch.push_back(tag(target_list(), AstField::Left));
        ch.push_back(expect_kw("in"));
        ch.push_back(tag(expression_list_or_single(false), AstField::Right));
        ch.push_back(expect_op(":"));
        ch.push_back(block());
        if (at_kw("else")) ch.push_back(else_clause());
        return make("for_statement", std::move(ch));
    }

    // Loop / comprehension targets: parsed below comparison level so that the
    // following `in` is not swallowed.
    int target_list() {
        std::vector<int> items{target_item()};
        bool had_comma = false;
        while (at_op(",")) {
            had_comma = true;
            items.push_back(leaf());
            if (at_kw("in") || at_op("=")) break;
            items.push_back(target_item());
        }
        return wrap_items(std::move(items), had_comma, true);
    }

    int target_item() {
        if (at_op("*")) {
            const int star = leaf();
            return make("list_splat_pattern", {star, bitwise_or()});
        }
        return bitwise_or();
    }

    int try_statement() {
        std::vector<int> ch{leaf(), expect_op(":"), block()};
        bool any = false;
        while (at_kw("except")) {
            any = true;
            std::vector<int> e{leaf()};
            if (!at_op(":")) {
                e.push_back(expression());
                if (at_kw("as") || at_op(",")) {
                    e.push_back(leaf());
                    e.push_back(expression());
                }
            }
            e.push_back(expect_op(":"));
            e.push_back(block());
            ch.push_back(make("except_clause", std::move(e)));
        }
        if (at_kw("else")) ch.push_back(else_clause());
        if (at_kw("finally")) {
            any = true;
            std::vector<int> f{leaf(), expect_op(":"), block()};
            ch.push_back(make("finally_clause", std::move(f)));
        }
        if (!any) fail("expected 'except' or 'finally'");
        return make("try_statement", std::move(ch));
    }

    int with_item() {
        const int value = expression();
        if (!at_kw("as")) return make("with_item", {value});
        const int as = leaf();
        const int target = make("as_pattern_target", {target_item()});
        return make("with_item", {make("as_pattern", {value, as, target})});
    }

    int with_statement() {
        std::vector<int> ch;
        if (at_kw("async")) ch.push_back(leaf());
        ch.push_back(expect_kw("with"));
        std::vector<int> clause{with_item()};
        while (at_op(",")) {
            clause.push_back(leaf());
            clause.push_back(with_item());
        }
        ch.push_back(make("with_clause", std::move(clause)));
        ch.push_back(expect_op(":"));
        ch.push_back(block());
        return make("with_statement", std::move(ch));
    }

    int function_definition() {
        std::vector<int> ch;
        if (at_kw("async")) ch.push_back(leaf());
        ch.push_back(expect_kw("def"));
        ch.push_back(tag(expect_name(), AstField::Name));
        ch.push_back(parameters());
        if (at_op("->")) {
            ch.push_back(leaf());
            ch.push_back(make("type", {expression()}));
        }
        ch.push_back(expect_op(":"));
        ch.push_back(block());
        return make("function_definition", std::move(ch));
    }

    int parameters() {
        std::vector<int> ch{expect_op("(")};
        while (!at_op(")")) {
            ch.push_back(parameter(true));
            if (!at_op(",")) break;
            ch.push_back(leaf());
        }
        ch.push_back(expect_op(")"));
        return make("parameters", std::move(ch));
    }

    int parameter(bool annotations) {
        if (at_op("/")) return make("positional_separator", {leaf()});
        if (at_op("*") && (is_op(peek(), ",") || is_op(peek(), ")") || is_op(peek(), ":")))
            return make("keyword_separator", {leaf()});
        int name;
        if (at_op("*")) {
            const int star = leaf();
            name = make("list_splat_pattern", {star, expect_name()});
        } else if (at_mergeable_double_star({",", ")", ":", "="})) {
            name = merged_double_star();
        } else if (at_op("**")) {
            const int stars = leaf();
            name = make("dictionary_splat_pattern", {stars, expect_name()});
        } else {
            name = expect_name();
        }
        if (annotations && at_op(":")) {
            const int colon = leaf();
            const int type = make("type", {expression()});
            if (at_op("=")) {
                const int eq = leaf();
                const int value = tag(expression(), AstField::Value);
                return make("typed_default_parameter", {tag(name, AstField::Name), colon, type, eq, value});
            }
            return make("typed_parameter", {name, colon, type});
        }
        if (at_op("=")) {
            const int eq = leaf();
            const int value = tag(expression(), AstField::Value);
            return make("default_parameter", {tag(name, AstField::Name), eq, value});
        }
        return name;
    }

    int class_definition() {
        std::vector<int> ch{leaf(), tag(expect_name(), AstField::Name)};
        if (at_op("(")) ch.push_back(argument_list());
        ch.push_back(expect_op(":"));
        ch.push_back(block());
        return make("class_definition", std::move(ch));
    }

    int decorated() {
        std::vector<int> ch;
        while (at_op("@")) {
            const int at = leaf();
            ch.push_back(make("decorator", {at, named_expression()}));
            skip_layout(LexKind::Newline);
        }
        if (at_kw("def") || (at_kw("async") && peek().text == "def")) {
            ch.push_back(function_definition());
        } else if (at_kw("class")) {
            ch.push_back(class_definition());
        } else {
            fail("expected function or class after decorator");
        }
        return make("decorated_definition", std::move(ch));
    }

    // --- expressions ---------------------------------------------------------

    int named_expression() {
        if (at_plain_name() && is_op(peek(), ":=")) {
            const int name = leaf();
            const int op = leaf();
            return make("named_expression", {name, op, expression()});
        }
        return expression();
    }

    int expression() {
        if (at_kw("lambda")) return lambda(true);
        const int body = disjunction();
        if (!at_kw("if")) return body;
        const int kw_if = leaf();
        const int cond = disjunction();
        const int kw_else = expect_kw("else");
        return make("conditional_expression", {body, kw_if, cond, kw_else, expression()});
    }

    int lambda(bool allow_conditional) {
        std::vector<int> ch{leaf()};
        if (!at_op(":")) {
            std::vector<int> params;
            while (!at_op(":")) {
                params.push_back(parameter(false));
                if (!at_op(",")) break;
                params.push_back(leaf());
            }
            ch.push_back(make("lambda_parameters", std::move(params)));
        }
        ch.push_back(expect_op(":"));
        ch.push_back(allow_conditional ? expression() : disjunction());
        return make("lambda", std::move(ch));
    }

    int disjunction() {
        int left = conjunction();
        while (at_kw("or")) {
            const int op = leaf();
            left = make("boolean_operator", {left, op, conjunction()});
        }
        return left;
    }

    int conjunction() {
        int left = inversion();
        while (at_kw("and")) {
            const int op = leaf();
            left = make("boolean_operator", {left, op, inversion()});
        }
        return left;
    }

    int inversion() {
        if (at_kw("not")) {
            const int op = leaf();
            return make("not_operator", {op, inversion()});
        }
        return comparison();
    }

    bool at_comparison_op() const {
        if (cur().kind == LexKind::Op) {
            const auto t = cur().text;
            return t == "<" || t == ">" || t == "==" || t == ">=" || t == "<=" || t == "!=";
        }
        if (at_kw("in") || at_kw("is")) return true;
        return at_kw("not") && peek().kind == LexKind::Name && peek().text == "in";
    }

    int comparison() {
        const int first = bitwise_or();
        if (!at_comparison_op()) return first;
        std::vector<int> ch{first};
        while (at_comparison_op()) {
            if (at_kw("not")) {
                ch.push_back(leaf());
                ch.push_back(leaf());  // in
            } else if (at_kw("is")) {
                ch.push_back(leaf());
                if (at_kw("not")) ch.push_back(leaf());
            } else {
                ch.push_back(leaf());
            }
            ch.push_back(bitwise_or());
        }
        return make("comparison_operator", std::move(ch));
    }

    template <typename Next>
    int binary_level(std::initializer_list<std::string_view> ops, Next next) {
        int left = (this->*next)();
        for (;;) {
            const bool match = cur().kind == LexKind::Op &&
                               std::any_of(ops.begin(), ops.end(), [&](std::string_view o) { return cur().text == o; });
            if (!match) return left;
            const int op = leaf();
            left = make("binary_operator", {left, op, (this->*next)()});
        }
    }

    int bitwise_or() { return binary_level({"|"}, &Parser::bitwise_xor); }
    int bitwise_xor() { return binary_level({"^"}, &Parser::bitwise_and); }
    int bitwise_and() { return binary_level({"&"}, &Parser::shift_expr); }
    int shift_expr() { return binary_level({"<<", ">>"}, &Parser::arith_expr); }
    int arith_expr() { return binary_level({"+", "-"}, &Parser::term); }
    int term() { return binary_level({"*", "/", "//", "%", "@"}, &Parser::factor); }

    int factor() {
        if (at_op("+") || at_op("-") || at_op("~")) {
            const int op = leaf();
            return make("unary_operator", {op, factor()});
        }
        return power();
    }

    int power() {
        const int base = await_primary();
        if (!at_op("**")) return base;
        const int op = leaf();
        return make("binary_operator", {base, op, factor()});
    }

    int await_primary() {
        if (at_kw("await")) {
            const int kw = leaf();
            return make("await", {kw, primary()});
        }
        return primary();
    }

    int primary() {
        int node = atom();
        for (;;) {
            if (at_op(".")) {
                const int dot = leaf();
                if (!at(LexKind::Name)) fail("expected attribute name");
                node = make("attribute", {node, dot, leaf()});
            } else if (at_op("(")) {
                node = make("call", {node, argument_list()});
            } else if (at_op("[")) {
                std::vector<int> ch{node, leaf()};
                ch.push_back(subscript_item());
                while (at_op(",")) {
                    ch.push_back(leaf());
                    if (at_op("]")) break;
                    ch.push_back(subscript_item());
                }
                ch.push_back(expect_op("]"));
                node = make("subscript", std::move(ch));
            } else {
                return node;
            }
        }
    }

    int subscript_item() {
        std::vector<int> parts;
        if (!at_op(":")) {
            const int e = star_expression();
            if (!at_op(":")) return e;
            parts.push_back(e);
        }
        parts.push_back(leaf());  // ':'
        if (!at_op(":") && !at_op(",") && !at_op("]")) parts.push_back(expression());
        if (at_op(":")) {
            parts.push_back(leaf());
            if (!at_op(",") && !at_op("]")) parts.push_back(expression());
        }
        return make("slice", std::move(parts));
    }

    int argument_list() {
        std::vector<int> ch{leaf()};  // '('
        bool first = true;
        while (!at_op(")")) {
            int arg;
            if (at_op("*")) {
                const int star = leaf();
                arg = make("list_splat", {star, expression()});
            } else if (at_mergeable_double_star({",", ")"})) {
                arg = merged_double_star();
            } else if (at_op("**")) {
                const int stars = leaf();
                arg = make("dictionary_splat", {stars, expression()});
            } else if (at_plain_name() && is_op(peek(), "=")) {
                const int name = leaf();
                const int eq = leaf();
                arg = make("keyword_argument", {name, eq, expression()});
            } else {
                arg = named_expression();
                if (first && (at_kw("for") || (at_kw("async") && peek().text == "for"))) {
                    std::vector<int> gen{ch.front(), arg};
                    comprehension_clauses(gen);
                    gen.push_back(expect_op(")"));
                    return make("generator_expression", std::move(gen));
                }
            }
            ch.push_back(arg);
            first = false;
            if (!at_op(",")) break;
            ch.push_back(leaf());
        }
        ch.push_back(expect_op(")"));
        return make("argument_list", std::move(ch));
    }

    void comprehension_clauses(std::vector<int>& out) {
        for (;;) {
            if (at_kw("for") || (at_kw("async") && peek().text == "for")) {
                std::vector<int> ch;
                if (at_kw("async")) ch.push_back(leaf());
                ch.push_back(leaf());
                ch.push_back(tag(target_list(), AstField::Left));
                ch.push_back(expect_kw("in"));
                ch.push_back(tag(disjunction(), AstField::Right));
                out.push_back(make("for_in_clause", std::move(ch)));
            } else if (at_kw("if")) {
                const int kw = leaf();
                out.push_back(make("if_clause", {kw, disjunction()}));
            } else {
                return;
            }
        }
    }

    bool at_comprehension() const { return at_kw("for") || (at_kw("async") && peek().text == "for"); }

    int atom() {
        const LexToken& t = cur();
        switch (t.kind) {
            case LexKind::Name:
                if (t.text == "True" || t.text == "False" || t.text == "None") return leaf();
                if (t.text == "lambda") return lambda(true);
                if (t.text == "yield") return yield_expression();
                if (is_python_keyword(t.text)) fail("unexpected keyword");
                return leaf();
            case LexKind::Number:
                return leaf();
            case LexKind::String: {
                std::vector<int> parts{leaf()};
                while (at(LexKind::String)) parts.push_back(leaf());
                if (parts.size() == 1) return parts.front();
                return make("concatenated_string", std::move(parts));
            }
            case LexKind::Op:
                if (t.text == "...") return leaf();
                if (t.text == "(") return paren_atom();
                if (t.text == "[") return list_atom();
                if (t.text == "{") return brace_atom();
                break;
            default:
                break;
        }
        fail("invalid syntax");
    }

    int paren_atom() {
        const int open = leaf();
        if (at_op(")")) return make("tuple", {open, leaf()});
        if (at_kw("yield")) {
            const int y = yield_expression();
            return make("parenthesized_expression", {open, y, expect_op(")")});
        }
        const int first = at_op("*") ? star_expression() : named_expression();
        if (at_comprehension()) {
            std::vector<int> ch{open, first};
            comprehension_clauses(ch);
            ch.push_back(expect_op(")"));
            return make("generator_expression", std::move(ch));
        }
        if (at_op(")")) return make("parenthesized_expression", {open, first, leaf()});
        std::vector<int> ch{open, first};
        while (at_op(",")) {
            ch.push_back(leaf());
            if (at_op(")")) break;
            ch.push_back(at_op("*") ? star_expression() : named_expression());
        }
        ch.push_back(expect_op(")"));
        return make("tuple", std::move(ch));
    }

    int list_atom() {
        const int open = leaf();
        if (at_op("]")) return make("list", {open, leaf()});
        const int first = at_op("*") ? star_expression() : named_expression();
        if (at_comprehension()) {
            std::vector<int> ch{open, first};
            comprehension_clauses(ch);
            ch.push_back(expect_op("]"));
            return make("list_comprehension", std::move(ch));
        }
        std::vector<int> ch{open, first};
        while (at_op(",")) {
            ch.push_back(leaf());
            if (at_op("]")) break;
            ch.push_back(at_op("*") ? star_expression() : named_expression());
        }
        ch.push_back(expect_op("]"));
        return make("list", std::move(ch));
    }

    int dict_element() {
        if (at_mergeable_double_star({",", "}"})) return merged_double_star();
        if (at_op("**")) {
            const int stars = leaf();
            return make("dictionary_splat", {stars, bitwise_or()});
        }
        const int key = expression();
        const int colon = expect_op(":");
        return make("pair", {key, colon, expression()});
    }

    int brace_atom() {
        const int open = leaf();
        if (at_op("}")) return make("dictionary", {open, leaf()});
        bool is_dict = at_op("**");
        int first;
        if (is_dict) {
            first = dict_element();
        } else {
            first = at_op("*") ? star_expression() : named_expression();
            if (at_op(":")) {
                is_dict = true;
                const int colon = leaf();
                first = make("pair", {first, colon, expression()});
            }
        }
        if (at_comprehension()) {
            std::vector<int> ch{open, first};
            comprehension_clauses(ch);
            ch.push_back(expect_op("}"));
            return make(is_dict ? "dictionary_comprehension" : "set_comprehension", std::move(ch));
        }
        std::vector<int> ch{open, first};
        while (at_op(",")) {
            ch.push_back(leaf());
            if (at_op("}")) break;
            ch.push_back(is_dict ? dict_element() : (at_op("*") ? star_expression() : named_expression()));
        }
        ch.push_back(expect_op("}"));
        return make(is_dict ? "dictionary" : "set", std::move(ch));
    }

    std::vector<LexToken> lex_;
    std::size_t pos_ = 0;
    Ast ast_;
};

}  // namespace

Ast parse_ast(std::string_view source) {
    if (source.find_first_not_of(" \t\r\n\f") == std::string_view::npos) throw Error("empty source");
    return Parser(source).run();
}

TokenCategory categorize_token(const Ast& ast, std::size_t token) { return ast.tokens.at(token).category; }

}  // namespace codeattn
