#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xgraphbench/dataset.hpp"
#include "xgraphbench/graph.hpp"
#include "xgraphbench/matrix.hpp"

namespace xgb {

// One GIN layer: h' = mlp((1 + eps) * h_u + sum_{v in N(u)} h_v) with
// mlp = affine -> ReLU -> affine.
struct GinLayer {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;
    double eps = 0.0;
};

struct GinModel {
    int in_dim = 0;
    int hidden_dim = 16;
    int num_classes = 2;
    std::vector<GinLayer> layers;
    Matrix w_out;
    std::vector<double> b_out;

    GinModel() = default;
    // Glorot-uniform weights (zero biases, eps 0) from a stream derived from
    // `seed`, so identical seeds give identical models.
    GinModel(int in_dim, int hidden_dim, int num_classes, int num_layers, std::uint64_t seed);

    int num_layers() const { return static_cast<int>(layers.size()); }
};

struct ParamBlock {
    std::string name;
    std::span<double> data;
};

// All trainable values in a fixed order; grads use the same layout.
std::vector<ParamBlock> param_blocks(GinModel& model);

struct ForwardResult {
    Matrix logits;
    Matrix probs;
};

struct ForwardCache {
    std::vector<Matrix> h;    // h[0] = input, h[l+1] = layer l output
    std::vector<Matrix> agg;  // per-layer aggregation result
    std::vector<Matrix> pre;  // per-layer first-affine pre-activation
    std::vector<Matrix> act;  // per-layer ReLU output
    Matrix logits;
    Matrix probs;
};

ForwardResult forward(const GinModel& model, const Graph& g, const Matrix& features);
ForwardCache forward_cached(const GinModel& model, const Graph& g, const Matrix& features);

struct BackwardResult {
    GinModel grads;  // same shapes as the model, metadata ignored
    Matrix d_input;
};

// Exact gradients of sum(d_logits .* logits) w.r.t. all parameters and the
// input features.
BackwardResult backward(const GinModel& model, const Graph& g, const ForwardCache& cache,
                        const Matrix& d_logits);

struct TrainConfig {
    double learning_rate = 1e-2;
    double weight_decay = 1e-5;
    int epochs = 1000;
    std::uint64_t seed = 0;
};

struct TrainResult {
    GinModel model;
    std::vector<double> epoch_loss;  // mean train cross-entropy per epoch
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
};

// Full-batch Adam on the train split's cross-entropy. Throws on NaN loss.
TrainResult train(GinModel model, const Dataset& ds, const TrainConfig& cfg);

// argmax class per node (ties to the lower class index)
std::vector<int> predict(const GinModel& model, const Graph& g, const Matrix& features);
double accuracy(const GinModel& model, const Graph& g, const Matrix& features,
                const std::vector<int>& labels, const std::vector<int>& nodes);

// Gradient of node v's logit for class `cls` w.r.t. `features`, evaluated on
// the given graph as-is (same shape as `features`).
Matrix input_gradient(const GinModel& model, const Graph& g, const Matrix& features, int v,
                      int cls);
// Gradient of node `sub.center`'s logit for class `cls`, w.r.t. the features
// of every node in `sub` (rows follow sub.nodes).
Matrix feature_gradients_local(const GinModel& model, const Graph& g, const Subgraph& sub,
                               int cls);
// Same, scattered into a full |V| x n_f matrix (exactly 0 outside `sub`).
Matrix feature_gradients(const GinModel& model, const Graph& g, int v, int cls);

struct MaskedPrediction {
    std::vector<double> probs;  // center's class distribution
    bool empty = false;         // nothing survived the mask; probs are uniform
};

// Applies a hard explanation to Sub(u): node mask zeroes feature rows, the
// feature mask zeroes columns, the edge mask drops edges; then runs the model
// on the masked subgraph and returns the center's probabilities.
MaskedPrediction predict_masked(const GinModel& model, const Subgraph& sub,
                                const Matrix& full_features, const Explanation& hard_expl);

void save_model(const GinModel& model, const std::string& path);
GinModel load_model(const std::string& path);

}  // namespace xgb
