#include "xgraphbench/ba_shapes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "xgraphbench/rng.hpp"

namespace xgb {

void validate(const BaShapesParams& params) {
    if (params.ba_attachment < 1) throw std::invalid_argument("ba_attachment must be >= 1");
    if (params.base_nodes <= params.ba_attachment) {
        throw std::invalid_argument("base_nodes must exceed ba_attachment");
    }
    if (params.num_houses < 0) throw std::invalid_argument("num_houses must be >= 0");
    if (params.perturb_edges < 0.0) throw std::invalid_argument("perturb_edges must be >= 0");
}

Dataset generate_ba_shapes(const BaShapesParams& params) {
    validate(params);
    SeedSplitter seeds(params.seed);
    GraphBuilder gb(params.base_nodes);

    // preferential attachment via the repeated-endpoint list: drawing an
    // entry uniformly is drawing a node proportionally to its degree
    {
        Rng rng = seeds.stream("ba");
        const int m = params.ba_attachment;
        std::vector<int> targets(static_cast<size_t>(m));
        for (int t = 0; t < m; ++t) targets[static_cast<size_t>(t)] = t;
        std::vector<int> repeated;
        for (int source = m; source < params.base_nodes; ++source) {
            for (int t : targets) {
                gb.add_edge(source, t);
                repeated.push_back(t);
                repeated.push_back(source);
            }
            std::vector<int> next;
            while (static_cast<int>(next.size()) < m) {
                const int pick = repeated[static_cast<size_t>(
                    rng.uniform_index(static_cast<std::uint64_t>(repeated.size())))];
                if (std::find(next.begin(), next.end(), pick) == next.end()) next.push_back(pick);
            }
            targets = std::move(next);
        }
    }

    // 4-cycle 0-1-2-3 plus roof node 4 over the 0-1 edge
    static const std::vector<Edge> kHouse = {{0, 1}, {0, 3}, {0, 4}, {1, 2}, {1, 4}, {2, 3}};
    std::vector<MotifInstance> houses;
    {
        Rng rng = seeds.stream("houses");
        for (int h = 0; h < params.num_houses; ++h) {
            const int base = gb.num_nodes();
            MotifInstance inst;
            inst.id = h;
            for (int t = 0; t < 5; ++t) {
                gb.add_node();
                inst.nodes.push_back(base + t);
            }
            for (const auto& [a, b] : kHouse) {
                gb.add_edge(base + a, base + b);
                inst.edges.emplace_back(base + a, base + b);
            }
            std::sort(inst.edges.begin(), inst.edges.end());
            const int anchor = static_cast<int>(
                rng.uniform_index(static_cast<std::uint64_t>(params.base_nodes)));
            const int door = base + static_cast<int>(rng.uniform_index(5));
            gb.add_edge(anchor, door);
            houses.push_back(std::move(inst));
        }
    }

    {
        Rng rng = seeds.stream("perturb");
        const int n = gb.num_nodes();
        const int extra = params.perturb_edges < 1.0
                              ? static_cast<int>(std::lround(params.perturb_edges * gb.num_edges()))
                              : static_cast<int>(std::lround(params.perturb_edges));
        int added = 0;
        std::uint64_t attempts = 0;
        const std::uint64_t max_attempts = 1000ull * (static_cast<std::uint64_t>(extra) + 1);
        while (added < extra && attempts < max_attempts) {
            ++attempts;
            const int u = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            const int w = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            if (u == w || gb.has_edge(u, w)) continue;
            gb.add_edge(u, w);
            ++added;
        }
    }

    const int n = gb.num_nodes();
    Dataset ds;
    ds.graph = gb.build(Matrix(n, 1, 1.0));
    ds.labels.assign(static_cast<size_t>(n), 0);
    for (const auto& h : houses) {
        for (int v : h.nodes) ds.labels[static_cast<size_t>(v)] = 1;
    }
    ds.num_classes = 2;
    ds.num_layers = 3;
    ds.motifs = std::move(houses);
    ds.node_motifs = compute_node_motifs(ds.graph, ds.motifs, ds.num_layers);
    ds.feature_mask.assign(1, 0);
    ds.protected_index = -1;
    Rng split_rng = seeds.stream("split");
    ds.split = stratified_split(ds.labels, ds.num_classes, 0.70, 0.05, split_rng);
    ds.generator = "ba-shapes";
    ds.params_json = ba_params_to_json(params);
    ds.seed = params.seed;
    return ds;
}

std::string ba_params_to_json(const BaShapesParams& p) {
    nlohmann::json j;
    j["base_nodes"] = p.base_nodes;
    j["ba_attachment"] = p.ba_attachment;
    j["num_houses"] = p.num_houses;
    j["perturb_edges"] = p.perturb_edges;
    j["seed"] = p.seed;
    return j.dump();
}

BaShapesParams ba_params_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    BaShapesParams p;
    p.base_nodes = j.value("base_nodes", p.base_nodes);
    p.ba_attachment = j.value("ba_attachment", p.ba_attachment);
    p.num_houses = j.value("num_houses", p.num_houses);
    p.perturb_edges = j.value("perturb_edges", p.perturb_edges);
    p.seed = j.value("seed", p.seed);
    return p;
}

}  // namespace xgb
