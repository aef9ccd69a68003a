#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xgraphbench/graph.hpp"
#include "xgraphbench/rng.hpp"

namespace xgb {

// One planted motif copy, in global node ids.
struct MotifInstance {
    int id = -1;
    std::vector<int> nodes;   // ascending global ids
    std::vector<Edge> edges;  // canonical (min,max), sorted

    bool contains(int v) const {
        return std::binary_search(nodes.begin(), nodes.end(), v);
    }
};

// Importance scores over one node's enclosing subgraph. node_mask[i] scores
// Subgraph::nodes[i], edge_mask[e] scores Subgraph::edges[e], feature_mask[j]
// scores feature column j. `center` is the explained node's global id.
struct Explanation {
    std::vector<double> node_mask;
    std::vector<double> edge_mask;
    std::vector<double> feature_mask;
    int center = -1;
    bool hard = false;
};

struct Split {
    std::vector<int> train, val, test;
};

// Per-class proportional split; within each class, node order is shuffled by
// `rng` and cut train/val/test by the given fractions (rounded to nearest,
// train absorbing the remainder).
Split stratified_split(const std::vector<int>& labels, int num_classes, double train_frac,
                       double val_frac, Rng& rng);

struct Dataset {
    Graph graph;
    std::vector<int> labels;
    int num_classes = 2;
    int num_layers = 3;  // receptive-field depth used for subgraphs and masks

    std::vector<MotifInstance> motifs;
    // For each node v, ids of motifs with at least one node inside v's
    // num_layers-hop subgraph; the domain of v's ground-truth masks.
    std::vector<std::vector<int>> node_motifs;

    std::vector<int> feature_mask;  // 1 on informative feature columns
    int protected_index = -1;       // feature column of the protected attribute, -1 if none

    Split split;

    std::string generator;    // "shapeggen" | "ba-shapes"
    std::string params_json;  // canonical parameter record for round-trips
    std::uint64_t seed = 0;

    int num_features() const { return graph.features().cols(); }
};

// Ids of motifs intersecting each node's `hops`-hop subgraph.
std::vector<std::vector<int>> compute_node_motifs(const Graph& g,
                                                  const std::vector<MotifInstance>& motifs,
                                                  int hops);

// The hard ground-truth explanations for v over `sub` (= Sub(v; num_layers)):
// one per intersecting motif. Node mask marks that motif's nodes; an edge is
// marked iff both endpoints lie in the motif's nodes or equal v; feature mask
// is the dataset's informative-column mask.
std::vector<Explanation> ground_truth_for(const Dataset& ds, int v, const Subgraph& sub);

// Convenience: extracts Sub(v; num_layers) itself.
Subgraph enclosing_subgraph(const Dataset& ds, int v);

}  // namespace xgb
