// Data-flow extraction following the GraphCodeBERT rules for Python: a use of
// a name ComesFrom its reaching definitions, an assignment target is
// ComputedFrom every variable of its value, branches merge reaching
// definitions, and loop bodies are walked twice so back edges appear.
// Only identifier-category tokens take part.

#include <algorithm>
#include <map>
#include <set>

#include "codeattn/code_graphs.hpp"

namespace codeattn {

std::string_view to_string(DfgLabel l) { return l == DfgLabel::ComesFrom ? "ComesFrom" : "ComputedFrom"; }

Graph DfgGraph::as_undirected() const {
    std::vector<Edge> pairs;
    pairs.reserve(edges.size());
    for (const auto& e : edges) pairs.emplace_back(static_cast<std::uint32_t>(e.src), static_cast<std::uint32_t>(e.dst));
    return Graph::undirected(n_nodes, std::move(pairs));
}

std::string dfg_to_json(const DfgGraph& g) {
    std::string out = "{\"edges\":[";
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        if (k) out += ',';
        out += '[' + std::to_string(g.edges[k].src) + ',' + std::to_string(g.edges[k].dst) + ",\"" +
               std::string(to_string(g.edges[k].label)) + "\"]";
    }
    out += "]}";
    return out;
}

namespace {

using States = std::map<std::string, std::vector<std::size_t>>;

bool is_comprehension(std::string_view k) {
    return k == "list_comprehension" || k == "set_comprehension" || k == "dictionary_comprehension" ||
           k == "generator_expression";
}

bool is_sequence(std::string_view k) {
    return k == "pattern_list" || k == "expression_list" || k == "tuple" || k == "list" || k == "tuple_pattern" ||
           k == "list_pattern";
}

class DfgBuilder {
public:
    explicit DfgBuilder(const Ast& ast) : ast_(ast) {}

    DfgGraph run() {
        visit(ast_.root, {});
        DfgGraph g;
        g.n_nodes = ast_.num_tokens();
        g.edges.assign(edges_.begin(), edges_.end());
        g.diagnostics = std::move(diagnostics_);
        return g;
    }

private:
    const AstNode& node(int id) const { return ast_.node(id); }

    std::string var_name(std::size_t token) const {
        const std::string& t = ast_.tokens[token].text;
        const auto first = t.find_first_not_of("* \t");
        return first == std::string::npos ? t : t.substr(first);
    }

    std::vector<std::size_t> variables_under(int id) const {
        std::vector<std::size_t> out;
        for (const int t : ast_.leaf_tokens_under(id)) {
            if (ast_.tokens[static_cast<std::size_t>(t)].category == TokenCategory::Identifier)
                out.push_back(static_cast<std::size_t>(t));
        }
        return out;
    }

    void add(std::size_t src, std::size_t dst, DfgLabel label) {
        if (src != dst) edges_.insert({src, dst, label});
    }

    int child_with_field(int id, AstField f) const {
        for (const int c : node(id).children) {
            if (node(c).field == f) return c;
        }
        return -1;
    }

    // Elements of a sequence target/value, or the node itself.
    std::vector<int> elements(int id) const {
        if (!is_sequence(node(id).kind)) return {id};
        std::vector<int> out;
        for (const int c : node(id).children) {
            const auto& n = node(c);
            if (n.is_leaf() && ast_.tokens[static_cast<std::size_t>(n.token)].category == TokenCategory::Punctuation)
                continue;
            out.push_back(c);
        }
        return out;
    }

    void pair_sides(int left, int right, std::vector<int>& lefts, std::vector<int>& rights) const {
        lefts = elements(left);
        rights = elements(right);
        if (lefts.size() != rights.size() || lefts.empty()) {
            lefts = {left};
            rights = {right};
        }
    }

    void define_from(const std::vector<int>& lefts, const std::vector<int>& rights, States& st) {
        for (std::size_t k = 0; k < lefts.size(); ++k) {
            const auto sources = variables_under(rights[k]);
            for (const std::size_t target : variables_under(lefts[k])) {
                for (const std::size_t s : sources) add(s, target, DfgLabel::ComputedFrom);
                st[var_name(target)] = {target};
            }
        }
    }

    // Finds the first construct outside the supported subset, not looking
    // into nested blocks (those are checked statement by statement).
    int unsupported(int id, int comprehension_depth) const {
        const auto& n = node(id);
        if (n.kind == "global_statement" || n.kind == "nonlocal_statement" || n.kind == "named_expression") return id;
        if (is_comprehension(n.kind)) {
            if (comprehension_depth >= 1) return id;
            ++comprehension_depth;
        }
        for (const int c : n.children) {
            if (node(c).kind == "block") continue;
            const int u = unsupported(c, comprehension_depth);
            if (u >= 0) return u;
        }
        return -1;
    }

    std::size_t offset_of(int id) const {
        const auto toks = ast_.leaf_tokens_under(id);
        return toks.empty() ? 0 : ast_.tokens[static_cast<std::size_t>(toks.front())].span.begin;
    }

    States visit_statements(int id, States st) {
        for (const int c : node(id).children) {
            const int u = unsupported(c, 0);
            if (u >= 0) {
                diagnostics_.push_back({offset_of(c), "unsupported construct '" + node(u).kind + "'; statement skipped"});
                continue;
            }
            st = visit(c, std::move(st));
        }
        return st;
    }

    States visit(int id, States st) {
        const AstNode& n = node(id);
        if (n.is_leaf()) return visit_leaf(static_cast<std::size_t>(n.token), std::move(st));
        const std::string& k = n.kind;
        if (k == "module" || k == "block") return visit_statements(id, std::move(st));
        if (k == "default_parameter" || k == "typed_default_parameter") return visit_default_parameter(id, std::move(st));
        if (k == "assignment" || k == "augmented_assignment" || k == "for_in_clause")
            return visit_assignment(id, std::move(st));
        if (k == "if_statement") return visit_if(id, std::move(st));
        if (k == "for_statement") return visit_for(id, std::move(st));
        if (k == "while_statement") return visit_while(id, std::move(st));

        // Comprehension clauses bind their targets before the element expression.
        for (const int c : n.children) {
            if (node(c).kind == "for_in_clause") st = visit(c, std::move(st));
        }
        for (const int c : n.children) {
            if (node(c).kind != "for_in_clause") st = visit(c, std::move(st));
        }
        return st;
    }

    States visit_leaf(std::size_t token, States st) {
        if (ast_.tokens[token].category != TokenCategory::Identifier) return st;
        const std::string name = var_name(token);
        auto it = st.find(name);
        if (it != st.end()) {
            for (const std::size_t d : it->second) add(d, token, DfgLabel::ComesFrom);
        } else {
            st[name] = {token};
        }
        return st;
    }

    States visit_default_parameter(int id, States st) {
        const int name = child_with_field(id, AstField::Name);
        const int value = child_with_field(id, AstField::Value);
        st = visit(value, std::move(st));
        const auto sources = variables_under(value);
        for (const std::size_t target : variables_under(name)) {
            for (const std::size_t s : sources) add(s, target, DfgLabel::ComesFrom);
            st[var_name(target)] = {target};
        }
        return st;
    }

    States visit_assignment(int id, States st) {
        const AstNode& n = node(id);
        const int left = child_with_field(id, AstField::Left);
        std::vector<int> lefts;
        std::vector<int> rights;
        if (n.kind == "for_in_clause") {
            lefts = {left};
            rights = {n.children.back()};
        } else {
            const int right = child_with_field(id, AstField::Right);
            if (right < 0) return st;  // bare annotation
            pair_sides(left, right, lefts, rights);
        }
        for (const int r : rights) st = visit(r, std::move(st));
        define_from(lefts, rights, st);
        return st;
    }

    static States merge(const std::vector<States>& branches) {
        States out;
        for (const auto& b : branches) {
            for (const auto& [name, defs] : b) {
                auto& dst = out[name];
                dst.insert(dst.end(), defs.begin(), defs.end());
            }
        }
        for (auto& [name, defs] : out) {
            std::sort(defs.begin(), defs.end());
            defs.erase(std::unique(defs.begin(), defs.end()), defs.end());
        }
        return out;
    }

    States visit_if(int id, States st) {
        States current = st;
        std::vector<States> branches;
        bool has_else = false;
        for (const int c : node(id).children) {
            const std::string& k = node(c).kind;
            if (k == "elif_clause" || k == "else_clause") {
                if (k == "else_clause") has_else = true;
                branches.push_back(visit(c, st));
            } else {
                current = visit(c, std::move(current));
            }
        }
        branches.push_back(std::move(current));
        if (!has_else) branches.push_back(std::move(st));
        return merge(branches);
    }

    States visit_for(int id, States st) {
        const int left = child_with_field(id, AstField::Left);
        const int right = child_with_field(id, AstField::Right);
        int body = -1;
        int orelse = -1;
        for (const int c : node(id).children) {
            if (node(c).kind == "block") body = c;
            if (node(c).kind == "else_clause") orelse = c;
        }
        std::vector<int> lefts;
        std::vector<int> rights;
        pair_sides(left, right, lefts, rights);
        for (int pass = 0; pass < 2; ++pass) {
            for (const int r : rights) st = visit(r, std::move(st));
            define_from(lefts, rights, st);
            if (body >= 0) st = visit(body, std::move(st));
        }
        if (orelse >= 0) st = visit(orelse, std::move(st));
        return st;
    }

    States visit_while(int id, States st) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const int c : node(id).children) st = visit(c, std::move(st));
        }
        return st;
    }

    const Ast& ast_;
    std::set<DfgEdge> edges_;
    std::vector<DfgDiagnostic> diagnostics_;
};

}  // namespace

DfgGraph data_flow_graph(const Ast& ast) { return DfgBuilder(ast).run(); }

}  // namespace codeattn
