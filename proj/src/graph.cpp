#include "xgraphbench/graph.hpp"

#include <queue>

namespace xgb {

Graph::Graph(int num_nodes, std::vector<Edge> edges, Matrix features)
    : num_nodes_(num_nodes), edges_(std::move(edges)), adj_(num_nodes), features_(std::move(features)) {
    for (auto& [u, v] : edges_) {
        if (u > v) std::swap(u, v);
        if (u == v) throw std::invalid_argument("Graph: self-loop");
        if (u < 0 || v >= num_nodes_) throw std::invalid_argument("Graph: edge endpoint out of range");
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& nbrs : adj_) {
        std::sort(nbrs.begin(), nbrs.end());
        if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end())
            throw std::invalid_argument("Graph: duplicate edge");
    }
    if (features_.rows() != num_nodes_ && !(features_.rows() == 0 && features_.cols() == 0))
        throw std::invalid_argument("Graph: feature row count does not match node count");
    if (features_.rows() == 0 && num_nodes_ > 0) features_ = Matrix(num_nodes_, 0);
}

bool Graph::has_edge(int u, int v) const {
    check_node(u);
    check_node(v);
    const auto& nbrs = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    int other = adj_[u].size() <= adj_[v].size() ? v : u;
    return std::binary_search(nbrs.begin(), nbrs.end(), other);
}

bool GraphBuilder::add_edge(int u, int v) {
    if (u == v) throw std::invalid_argument("GraphBuilder: self-loop");
    if (u < 0 || v < 0 || u >= num_nodes() || v >= num_nodes())
        throw std::invalid_argument("GraphBuilder: edge endpoint out of range");
    if (has_edge(u, v)) return false;
    if (u > v) std::swap(u, v);
    edges_.emplace_back(u, v);
    adj_[u].insert(std::upper_bound(adj_[u].begin(), adj_[u].end(), v), v);
    adj_[v].insert(std::upper_bound(adj_[v].begin(), adj_[v].end(), u), u);
    return true;
}

void GraphBuilder::remove_edge(int u, int v) {
    if (u > v) std::swap(u, v);
    auto it = std::find(edges_.begin(), edges_.end(), Edge{u, v});
    if (it == edges_.end()) throw std::invalid_argument("GraphBuilder: edge not present");
    edges_.erase(it);
    auto& au = adj_[u];
    au.erase(std::lower_bound(au.begin(), au.end(), v));
    auto& av = adj_[v];
    av.erase(std::lower_bound(av.begin(), av.end(), u));
}

bool GraphBuilder::has_edge(int u, int v) const {
    const auto& nbrs = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    int other = adj_[u].size() <= adj_[v].size() ? v : u;
    return std::binary_search(nbrs.begin(), nbrs.end(), other);
}

Graph GraphBuilder::build(Matrix features) const { return Graph(num_nodes(), edges_, std::move(features)); }

Subgraph l_hop_subgraph(const Graph& g, int v, int hops) {
    if (v < 0 || v >= g.num_nodes()) throw std::out_of_range("l_hop_subgraph: center out of range");
    if (hops < 0) throw std::invalid_argument("l_hop_subgraph: negative hop count");

    std::vector<int> dist(g.num_nodes(), -1);
    std::queue<int> frontier;
    dist[v] = 0;
    frontier.push(v);
    std::vector<int> ball{v};
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop();
        if (dist[u] == hops) continue;
        for (int w : g.neighbors(u)) {
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                ball.push_back(w);
                frontier.push(w);
            }
        }
    }
    std::sort(ball.begin(), ball.end());

    Subgraph sub;
    sub.nodes = std::move(ball);
    sub.center = sub.local_of(v);
    for (int lu = 0; lu < sub.num_nodes(); ++lu) {
        int gu = sub.nodes[lu];
        for (int gw : g.neighbors(gu)) {
            if (gw <= gu) continue;
            int lw = sub.local_of(gw);
            if (lw >= 0) sub.edges.emplace_back(lu, lw);
        }
    }
    return sub;
}

Graph induced_graph(const Subgraph& sub, const Matrix& full_features) {
    Matrix f(sub.num_nodes(), full_features.cols());
    for (int i = 0; i < sub.num_nodes(); ++i) {
        auto src = full_features.row(sub.nodes[i]);
        std::copy(src.begin(), src.end(), f.row(i).begin());
    }
    return Graph(sub.num_nodes(), sub.edges, std::move(f));
}

ComponentResult largest_connected_component(const Graph& g) {
    int n = g.num_nodes();
    std::vector<int> comp(n, -1);
    int num_comps = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = num_comps;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int w : g.neighbors(u)) {
                if (comp[w] < 0) {
                    comp[w] = num_comps;
                    q.push(w);
                }
            }
        }
        ++num_comps;
    }

    // Component ids are assigned in order of their minimum node id, so the
    // first maximal-size component is the smallest-min-id tie-break winner.
    std::vector<int> size(num_comps, 0);
    for (int v = 0; v < n; ++v) ++size[comp[v]];
    int best = 0;
    for (int c = 1; c < num_comps; ++c)
        if (size[c] > size[best]) best = c;

    ComponentResult res;
    res.old_to_new.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        if (comp[v] == best) {
            res.old_to_new[v] = static_cast<int>(res.new_to_old.size());
            res.new_to_old.push_back(v);
        }
    }

    std::vector<Edge> edges;
    for (const auto& [u, v] : g.edges()) {
        if (res.old_to_new[u] >= 0 && res.old_to_new[v] >= 0)
            edges.emplace_back(res.old_to_new[u], res.old_to_new[v]);
    }

    Matrix f(static_cast<int>(res.new_to_old.size()), g.features().cols());
    for (size_t i = 0; i < res.new_to_old.size(); ++i) {
        auto src = g.features().row(res.new_to_old[i]);
        std::copy(src.begin(), src.end(), f.row(static_cast<int>(i)).begin());
    }
    res.graph = Graph(static_cast<int>(res.new_to_old.size()), std::move(edges), std::move(f));
    return res;
}

}  // namespace xgb
