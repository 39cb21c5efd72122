#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace codeattn {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Simple graph over token indices [0, n_nodes). Edges are kept sorted and
/// unique; for undirected graphs each edge is stored once with first < second.
struct Graph {
    std::size_t n_nodes = 0;
    std::vector<Edge> edges;
    bool directed = false;

    static Graph undirected(std::size_t n, std::vector<Edge> edges);
    static Graph directed_graph(std::size_t n, std::vector<Edge> edges);

    bool contains(std::uint32_t a, std::uint32_t b) const;
    std::size_t num_edges() const { return edges.size(); }

    /// Undirected view: each directed edge becomes its unordered pair.
    Graph as_undirected() const;
    /// Directed view: each undirected edge becomes both orientations.
    Graph as_directed() const;
};

/// |A ∩ B| for sorted unique edge lists.
std::size_t intersection_size(const std::vector<Edge>& a, const std::vector<Edge>& b);

/// {"n_nodes": n, "edges": [[i,j],...]}
std::string graph_to_json(const Graph& g);

}  // namespace codeattn
