#pragma once

#include <cstdint>

#include "xgraphbench/dataset.hpp"

namespace xgb {

struct BaShapesParams {
    int base_nodes = 300;
    int ba_attachment = 1;  // edges each new base node brings
    int num_houses = 80;
    // < 1: fraction of the edge count added as random perturbation edges;
    // >= 1: absolute number of perturbation edges.
    double perturb_edges = 0.01;
    std::uint64_t seed = 0;
};

void validate(const BaShapesParams& params);

// Preferential-attachment base graph, num_houses five-node houses each tied
// to a uniformly chosen base node, plus random perturbation edges between
// non-adjacent pairs. label(v) = 1 iff v belongs to a house; node features
// are constant 1-vectors and the feature ground truth is empty.
Dataset generate_ba_shapes(const BaShapesParams& params);

std::string ba_params_to_json(const BaShapesParams& params);
BaShapesParams ba_params_from_json(const std::string& text);

}  // namespace xgb
