#include "xgraphbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xgb {

Split stratified_split(const std::vector<int>& labels, int num_classes, double train_frac,
                       double val_frac, Rng& rng) {
    if (train_frac < 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0) {
        throw std::invalid_argument("stratified_split: bad fractions");
    }
    std::vector<std::vector<int>> by_class(static_cast<size_t>(num_classes));
    for (int v = 0; v < static_cast<int>(labels.size()); ++v) {
        int y = labels[static_cast<size_t>(v)];
        if (y < 0 || y >= num_classes) throw std::invalid_argument("stratified_split: label out of range");
        by_class[static_cast<size_t>(y)].push_back(v);
    }
    Split split;
    for (auto& members : by_class) {
        rng.shuffle(members);
        const int n = static_cast<int>(members.size());
        const int n_val = static_cast<int>(std::lround(val_frac * n));
        const int n_test = static_cast<int>(std::lround((1.0 - train_frac - val_frac) * n));
        const int n_train = n - n_val - n_test;
        for (int i = 0; i < n; ++i) {
            int v = members[static_cast<size_t>(i)];
            if (i < n_train) split.train.push_back(v);
            else if (i < n_train + n_val) split.val.push_back(v);
            else split.test.push_back(v);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::vector<std::vector<int>> compute_node_motifs(const Graph& g,
                                                  const std::vector<MotifInstance>& motifs,
                                                  int hops) {
    // motif id touching each node, to turn "motif intersects subgraph" into a
    // per-ball membership scan
    std::vector<std::vector<int>> touching(static_cast<size_t>(g.num_nodes()));
    for (const auto& m : motifs) {
        for (int v : m.nodes) touching[static_cast<size_t>(v)].push_back(m.id);
    }
    const int n = g.num_nodes();
    std::vector<std::vector<int>> out(static_cast<size_t>(n));
#pragma omp parallel
    {
        std::vector<int> dist(static_cast<size_t>(n), -1);
        std::vector<int> queue, seen, ids;
#pragma omp for schedule(static)
        for (int v = 0; v < n; ++v) {
            queue.clear();
            seen.clear();
            ids.clear();
            dist[static_cast<size_t>(v)] = 0;
            queue.push_back(v);
            seen.push_back(v);
            for (size_t head = 0; head < queue.size(); ++head) {
                int u = queue[head];
                int du = dist[static_cast<size_t>(u)];
                for (int id : touching[static_cast<size_t>(u)]) ids.push_back(id);
                if (du == hops) continue;
                for (int w : g.neighbors(u)) {
                    if (dist[static_cast<size_t>(w)] != -1) continue;
                    dist[static_cast<size_t>(w)] = du + 1;
                    queue.push_back(w);
                    seen.push_back(w);
                }
            }
            std::sort(ids.begin(), ids.end());
            ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
            out[static_cast<size_t>(v)] = ids;
            for (int u : seen) dist[static_cast<size_t>(u)] = -1;
        }
    }
    return out;
}

std::vector<Explanation> ground_truth_for(const Dataset& ds, int v, const Subgraph& sub) {
    std::vector<Explanation> zeta;
    const auto& ids = ds.node_motifs[static_cast<size_t>(v)];
    std::vector<double> feat(ds.feature_mask.begin(), ds.feature_mask.end());
    if (ids.empty()) {
        // no motif in reach: the honest ground truth marks nothing
        Explanation e;
        e.center = v;
        e.hard = true;
        e.feature_mask = feat;
        e.node_mask.assign(static_cast<size_t>(sub.num_nodes()), 0.0);
        e.edge_mask.assign(static_cast<size_t>(sub.num_edges()), 0.0);
        zeta.push_back(std::move(e));
        return zeta;
    }
    zeta.reserve(ids.size());
    for (int id : ids) {
        const MotifInstance& m = ds.motifs[static_cast<size_t>(id)];
        Explanation e;
        e.center = v;
        e.hard = true;
        e.feature_mask = feat;
        e.node_mask.assign(static_cast<size_t>(sub.num_nodes()), 0.0);
        for (int i = 0; i < sub.num_nodes(); ++i) {
            if (m.contains(sub.global_of(i))) e.node_mask[static_cast<size_t>(i)] = 1.0;
        }
        e.edge_mask.assign(static_cast<size_t>(sub.num_edges()), 0.0);
        for (int t = 0; t < sub.num_edges(); ++t) {
            int gu = sub.global_of(sub.edges[static_cast<size_t>(t)].first);
            int gw = sub.global_of(sub.edges[static_cast<size_t>(t)].second);
            bool u_in = gu == v || m.contains(gu);
            bool w_in = gw == v || m.contains(gw);
            if (u_in && w_in) e.edge_mask[static_cast<size_t>(t)] = 1.0;
        }
        zeta.push_back(std::move(e));
    }
    return zeta;
}

Subgraph enclosing_subgraph(const Dataset& ds, int v) {
    return l_hop_subgraph(ds.graph, v, ds.num_layers);
}

}  // namespace xgb
