#include "codeattn/graph.hpp"

#include <algorithm>

#include "codeattn/types.hpp"

namespace codeattn {
namespace {

void sort_unique(std::vector<Edge>& e) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
}

void check_bounds(std::size_t n, const std::vector<Edge>& edges) {
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) throw Error("edge endpoint out of range");
        if (a == b) throw Error("self-loop in graph");
    }
}

}  // namespace

Graph Graph::undirected(std::size_t n, std::vector<Edge> edges) {
    check_bounds(n, edges);
    for (auto& e : edges) {
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    sort_unique(edges);
    return Graph{n, std::move(edges), false};
}

Graph Graph::directed_graph(std::size_t n, std::vector<Edge> edges) {
    check_bounds(n, edges);
    sort_unique(edges);
    return Graph{n, std::move(edges), true};
}

bool Graph::contains(std::uint32_t a, std::uint32_t b) const {
    if (!directed && a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), Edge{a, b});
}

Graph Graph::as_undirected() const {
    if (!directed) return *this;
    return undirected(n_nodes, edges);
}

Graph Graph::as_directed() const {
    if (directed) return *this;
    std::vector<Edge> both;
    both.reserve(edges.size() * 2);
    for (const auto& [a, b] : edges) {
        both.emplace_back(a, b);
        both.emplace_back(b, a);
    }
    return directed_graph(n_nodes, std::move(both));
}

std::size_t intersection_size(const std::vector<Edge>& a, const std::vector<Edge>& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

std::string graph_to_json(const Graph& g) {
    std::string out = "{\"n_nodes\":" + std::to_string(g.n_nodes) + ",\"edges\":[";
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        if (k) out += ',';
        out += '[' + std::to_string(g.edges[k].first) + ',' + std::to_string(g.edges[k].second) + ']';
    }
    out += "]}";
    return out;
}

}  // namespace codeattn
