#pragma once

#include <functional>
#include <vector>

#include "xgraphbench/dataset.hpp"
#include "xgraphbench/gin.hpp"
#include "xgraphbench/graph.hpp"
#include "xgraphbench/rng.hpp"

namespace xgb {

// Marks the ceil(k_fraction * len) largest entries with 1, ties broken by
// lower index. Rank-based, so invariant under strictly increasing transforms.
std::vector<double> top_k_mask(const std::vector<double>& scores, double k_fraction);

// top_k_mask applied to all three score vectors.
Explanation harden(const Explanation& soft, double k_fraction);

// Soft scores: features ~ N(0,1), node and edge scores ~ U(0,1).
Explanation random_explanation(const Subgraph& sub, int num_features, Rng& rng);

// Explainers that run on a self-contained graph (scores indexed by its nodes
// and edge list, center given as an index into it). ges/gecf re-invoke these
// on perturbed copies.
using LocalExplainerFn =
    std::function<Explanation(const GinModel& model, const Graph& graph, int center)>;

// |d logit_pred(center) / d x|: feature scores from the center's own row,
// node scores as row L2 norms, edge scores as endpoint-score means.
Explanation grad_explain_local(const GinModel& model, const Graph& graph, int center);

// Riemann-sum path integral of the gradient from all-zero features to the
// real ones, times the features; scores shaped like grad_explain_local.
Explanation integrated_gradients_local(const GinModel& model, const Graph& graph, int center,
                                       int steps);

// Dataset-level wrappers over Sub(v; num_layers); center is the global id v.
Explanation grad_explain(const GinModel& model, const Dataset& ds, int v);
Explanation integrated_gradients(const GinModel& model, const Dataset& ds, int v,
                                 int steps = 50);

}  // namespace xgb
