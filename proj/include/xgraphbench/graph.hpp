#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "xgraphbench/matrix.hpp"

namespace xgb {

using Edge = std::pair<int, int>;  // canonical: first < second

// Undirected graph with dense 0-based node ids and an optional per-node
// feature matrix. Immutable after construction; build via GraphBuilder.
class Graph {
public:
    Graph() = default;
    Graph(int num_nodes, std::vector<Edge> edges, Matrix features);

    int num_nodes() const { return num_nodes_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_[check_node(v)]; }
    int degree(int v) const { return static_cast<int>(adj_[check_node(v)].size()); }
    bool has_edge(int u, int v) const;

    const Matrix& features() const { return features_; }

private:
    int check_node(int v) const {
        if (v < 0 || v >= num_nodes_) throw std::out_of_range("Graph: node index out of range");
        return v;
    }

    int num_nodes_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;  // sorted ascending
    Matrix features_;                    // zero-column matrix when absent
};

// Incremental construction helper used by the generators. Rejects self-loops
// and duplicate edges; edges are stored canonically as (min,max).
class GraphBuilder {
public:
    explicit GraphBuilder(int num_nodes = 0) : adj_(num_nodes) {}

    int num_nodes() const { return static_cast<int>(adj_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    int add_node() {
        adj_.emplace_back();
        return static_cast<int>(adj_.size()) - 1;
    }

    // Returns false (and leaves the graph unchanged) for duplicates.
    bool add_edge(int u, int v);
    void remove_edge(int u, int v);

    bool has_edge(int u, int v) const;
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    const std::vector<Edge>& edges() const { return edges_; }

    Graph build(Matrix features) const;
    Graph build() const { return build(Matrix(num_nodes(), 0)); }

private:
    std::vector<std::vector<int>> adj_;  // kept sorted
    std::vector<Edge> edges_;
};

// L-hop enclosing subgraph around a center node. Node ordering is ascending
// global id so masks over it are reproducible; edges are local-index pairs
// sorted lexicographically.
struct Subgraph {
    std::vector<int> nodes;   // global ids, ascending
    std::vector<Edge> edges;  // local indices, (min,max), sorted
    int center = -1;          // local index of the query node

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int global_of(int local) const { return nodes[local]; }

    // Local index of a global id, -1 if absent.
    int local_of(int global) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), global);
        if (it == nodes.end() || *it != global) return -1;
        return static_cast<int>(it - nodes.begin());
    }
};

Subgraph l_hop_subgraph(const Graph& g, int v, int hops);

// Builds a standalone Graph from a subgraph, gathering feature rows from the
// full feature matrix.
Graph induced_graph(const Subgraph& sub, const Matrix& full_features);

struct ComponentResult {
    Graph graph;
    std::vector<int> old_to_new;  // -1 for dropped nodes
    std::vector<int> new_to_old;
};

// Largest connected component, ties broken by smallest minimum original node
// id. Features are re-indexed; node order preserves ascending original ids.
ComponentResult largest_connected_component(const Graph& g);

}  // namespace xgb
