#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xgraphbench/dataset.hpp"
#include "xgraphbench/graph.hpp"
#include "xgraphbench/matrix.hpp"
#include "xgraphbench/rng.hpp"

namespace xgb {

struct ShapeGGenParams {
    std::string motif = "house";           // "house" | "triangle" | "custom"
    std::vector<Edge> custom_motif_edges;  // used when motif == "custom"
    int num_subgraphs = 1200;              // planted motif copies before trimming
    double connection_prob = 0.006;        // per ordered subgraph pair
    int subgraph_size = 11;                // expected nodes per subgraph
    int num_classes = 2;                   // max motifs per 1-hop neighborhood
    int num_features = 11;
    int num_informative = 4;
    double class_sep = 0.6;       // hypercube half-width for cluster centers
    int clusters_per_class = 2;   // Gaussian clusters per class
    double protected_noise = 0.5; // probability the protected value is re-drawn
    double homophily = 1.0;       // >0 homophilic, <0 heterophilic, 0 off
    int model_layers = 3;         // receptive-field depth for masks
    std::uint64_t seed = 0;
};

// Throws std::invalid_argument if any field is out of range or the motif is
// unknown / not a simple connected graph.
void validate(const ShapeGGenParams& params);

// Edge list of the motif named by params (node ids 0..m-1).
std::vector<Edge> motif_edges(const ShapeGGenParams& params);

struct StructureResult {
    Graph graph;  // featureless
    std::vector<MotifInstance> motifs;
};

// Plants num_subgraphs motif copies, grows each with Poisson-many pendant
// nodes attached degree-proportionally to the motif, then joins subgraphs
// with degree-weighted edges (each ordered pair considered with probability
// connection_prob; candidates that would push a node's 1-hop motif count
// above num_classes are discarded and the next candidate tried). Returns the
// largest connected component.
StructureResult generate_structure(const ShapeGGenParams& params, Rng& rng);

// label(v) = (#motifs intersecting v's closed 1-hop neighborhood) - 1.
// Throws std::runtime_error if any count falls outside 1..num_classes.
std::vector<int> assign_labels(const Graph& g, const std::vector<MotifInstance>& motifs,
                               int num_classes);

struct FeatureResult {
    Matrix features;
    std::vector<int> feature_mask;  // 1 on informative columns
    int protected_index = -1;
};

// Columns: [num_informative Gaussian-cluster features | redundant N(0,1)
// features | protected]. Cluster centers are hypercube corners of side
// 2*class_sep (sampled without replacement while they last, after that with
// replacement plus N(0, 0.1*class_sep) jitter). The protected column equals
// the label, re-drawn uniformly from the other labels with probability
// protected_noise (using flip_rng so feature draws stay untouched).
FeatureResult generate_node_features(const std::vector<int>& labels,
                                     const ShapeGGenParams& params, Rng& feature_rng,
                                     Rng& flip_rng);

struct OptimizerConfig {
    double learning_rate = 0.1;
    int iterations = 100;
    int max_pairs = 2500;  // per pair set
};

// Gradient descent on L(X) = -eta*sum_C cos(x_u,x_w) + eta*sum_Ddis cos
// + eta*sum_Dcon cos, where C holds connected same-label pairs, Ddis
// disconnected different-label pairs, Dcon connected different-label pairs
// (each set capped at max_pairs). Only the columns listed in movable_cols are
// updated. eta == 0 returns the input unchanged.
Matrix optimize_homophily(const Graph& g, const Matrix& features,
                          const std::vector<int>& labels, double eta,
                          const std::vector<int>& movable_cols, const OptimizerConfig& cfg,
                          Rng& rng);

// Full pipeline: structure, labels, features, homophily pass, 70/5/25
// stratified split, per-node motif index. Deterministic in params.seed.
Dataset generate(const ShapeGGenParams& params);

// Named presets: sg-base, sg-heterophilic, sg-smallex, sg-unfair,
// sg-moreinform, sg-lessinform.
const std::vector<std::string>& preset_names();
ShapeGGenParams preset(const std::string& name);  // throws on unknown name

std::string params_to_json(const ShapeGGenParams& params);
ShapeGGenParams params_from_json(const std::string& text);

}  // namespace xgb
