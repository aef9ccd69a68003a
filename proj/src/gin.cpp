#include "xgraphbench/gin.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "xgraphbench/kernels.hpp"
#include "xgraphbench/rng.hpp"

namespace xgb {

namespace {

void xavier_fill(Matrix& w, Rng& rng) {
    const double bound = std::sqrt(6.0 / (w.rows() + w.cols()));
    for (double& x : w.flat()) x = (rng.uniform() * 2.0 - 1.0) * bound;
}

}  // namespace

GinModel::GinModel(int in, int hidden, int classes, int n_layers, std::uint64_t seed)
    : in_dim(in), hidden_dim(hidden), num_classes(classes) {
    if (in < 1 || hidden < 1 || classes < 2 || n_layers < 1) {
        throw std::invalid_argument("GinModel: bad dimensions");
    }
    SeedSplitter seeds(seed);
    Rng rng = seeds.stream("init");
    layers.resize(static_cast<size_t>(n_layers));
    for (int l = 0; l < n_layers; ++l) {
        GinLayer& layer = layers[static_cast<size_t>(l)];
        layer.w1 = Matrix(l == 0 ? in : hidden, hidden);
        xavier_fill(layer.w1, rng);
        layer.b1.assign(static_cast<size_t>(hidden), 0.0);
        layer.w2 = Matrix(hidden, hidden);
        xavier_fill(layer.w2, rng);
        layer.b2.assign(static_cast<size_t>(hidden), 0.0);
        layer.eps = 0.0;
    }
    w_out = Matrix(hidden, classes);
    xavier_fill(w_out, rng);
    b_out.assign(static_cast<size_t>(classes), 0.0);
}

std::vector<ParamBlock> param_blocks(GinModel& model) {
    std::vector<ParamBlock> blocks;
    for (size_t l = 0; l < model.layers.size(); ++l) {
        GinLayer& layer = model.layers[l];
        const std::string prefix = "layer" + std::to_string(l) + ".";
        blocks.push_back({prefix + "w1", std::span<double>(layer.w1.flat())});
        blocks.push_back({prefix + "b1", std::span<double>(layer.b1)});
        blocks.push_back({prefix + "w2", std::span<double>(layer.w2.flat())});
        blocks.push_back({prefix + "b2", std::span<double>(layer.b2)});
        blocks.push_back({prefix + "eps", std::span<double>(&layer.eps, 1)});
    }
    blocks.push_back({"out.w", std::span<double>(model.w_out.flat())});
    blocks.push_back({"out.b", std::span<double>(model.b_out)});
    return blocks;
}

ForwardCache forward_cached(const GinModel& model, const Graph& g, const Matrix& features) {
    if (features.cols() != model.in_dim) {
        throw std::invalid_argument("forward: feature width does not match model input");
    }
    if (features.rows() != g.num_nodes()) {
        throw std::invalid_argument("forward: feature rows do not match node count");
    }
    const int n_layers = model.num_layers();
    ForwardCache cache;
    cache.h.resize(static_cast<size_t>(n_layers) + 1);
    cache.agg.resize(static_cast<size_t>(n_layers));
    cache.pre.resize(static_cast<size_t>(n_layers));
    cache.act.resize(static_cast<size_t>(n_layers));
    cache.h[0] = features;
    for (int l = 0; l < n_layers; ++l) {
        const GinLayer& layer = model.layers[static_cast<size_t>(l)];
        const size_t sl = static_cast<size_t>(l);
        kernels::gin_aggregate(g, layer.eps, cache.h[sl], cache.agg[sl]);
        kernels::matmul(cache.agg[sl], layer.w1, cache.pre[sl]);
        kernels::add_bias(cache.pre[sl], layer.b1);
        kernels::relu(cache.pre[sl], cache.act[sl]);
        kernels::matmul(cache.act[sl], layer.w2, cache.h[sl + 1]);
        kernels::add_bias(cache.h[sl + 1], layer.b2);
    }
    kernels::matmul(cache.h[static_cast<size_t>(n_layers)], model.w_out, cache.logits);
    kernels::add_bias(cache.logits, model.b_out);
    kernels::softmax_rows(cache.logits, cache.probs);
    return cache;
}

ForwardResult forward(const GinModel& model, const Graph& g, const Matrix& features) {
    ForwardCache cache = forward_cached(model, g, features);
    return {std::move(cache.logits), std::move(cache.probs)};
}

BackwardResult backward(const GinModel& model, const Graph& g, const ForwardCache& cache,
                        const Matrix& d_logits) {
    const int n_layers = model.num_layers();
    BackwardResult out;
    out.grads.in_dim = model.in_dim;
    out.grads.hidden_dim = model.hidden_dim;
    out.grads.num_classes = model.num_classes;
    out.grads.layers.resize(static_cast<size_t>(n_layers));

    Matrix d_h;  // gradient flowing into the current layer's output
    kernels::matmul_at_b(cache.h[static_cast<size_t>(n_layers)], d_logits, out.grads.w_out);
    kernels::col_sums(d_logits, out.grads.b_out);
    kernels::matmul_a_bt(d_logits, model.w_out, d_h);

    Matrix d_act, d_pre, d_agg;
    for (int l = n_layers - 1; l >= 0; --l) {
        const GinLayer& layer = model.layers[static_cast<size_t>(l)];
        GinLayer& grad = out.grads.layers[static_cast<size_t>(l)];
        const size_t sl = static_cast<size_t>(l);

        kernels::matmul_at_b(cache.act[sl], d_h, grad.w2);
        kernels::col_sums(d_h, grad.b2);
        kernels::matmul_a_bt(d_h, layer.w2, d_act);

        kernels::relu_backward(cache.pre[sl], d_act, d_pre);

        kernels::matmul_at_b(cache.agg[sl], d_pre, grad.w1);
        kernels::col_sums(d_pre, grad.b1);
        kernels::matmul_a_bt(d_pre, layer.w1, d_agg);

        grad.eps = 0.0;  // d agg / d eps = h, accumulated serially for determinism
        const auto& h_in = cache.h[sl];
        for (int i = 0; i < h_in.rows(); ++i) {
            for (int j = 0; j < h_in.cols(); ++j) grad.eps += d_agg(i, j) * h_in(i, j);
        }
        kernels::gin_aggregate_backward(g, layer.eps, d_agg, d_h);
    }
    out.d_input = std::move(d_h);
    return out;
}

std::vector<int> predict(const GinModel& model, const Graph& g, const Matrix& features) {
    const ForwardResult fw = forward(model, g, features);
    std::vector<int> out(static_cast<size_t>(fw.logits.rows()));
    for (int v = 0; v < fw.logits.rows(); ++v) {
        int best = 0;
        for (int c = 1; c < fw.logits.cols(); ++c) {
            if (fw.logits(v, c) > fw.logits(v, best)) best = c;
        }
        out[static_cast<size_t>(v)] = best;
    }
    return out;
}

double accuracy(const GinModel& model, const Graph& g, const Matrix& features,
                const std::vector<int>& labels, const std::vector<int>& nodes) {
    if (nodes.empty()) return 0.0;
    const auto pred = predict(model, g, features);
    int hits = 0;
    for (int v : nodes) {
        if (pred[static_cast<size_t>(v)] == labels[static_cast<size_t>(v)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

TrainResult train(GinModel model, const Dataset& ds, const TrainConfig& cfg) {
    if (cfg.learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate must be > 0");
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (ds.split.train.empty()) throw std::invalid_argument("train: empty train split");

    const Graph& g = ds.graph;
    const Matrix& x = g.features();
    const int n = g.num_nodes();
    const double inv_train = 1.0 / static_cast<double>(ds.split.train.size());

    auto blocks = param_blocks(model);
    std::vector<std::vector<double>> adam_m(blocks.size()), adam_v(blocks.size());
    for (size_t b = 0; b < blocks.size(); ++b) {
        adam_m[b].assign(blocks[b].data.size(), 0.0);
        adam_v[b].assign(blocks[b].data.size(), 0.0);
    }
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;

    TrainResult result;
    result.epoch_loss.reserve(static_cast<size_t>(cfg.epochs));
    Matrix d_logits(n, model.num_classes);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        ForwardCache cache = forward_cached(model, g, x);

        double loss = 0.0;
        std::fill(d_logits.flat().begin(), d_logits.flat().end(), 0.0);
        for (int v : ds.split.train) {
            const int y = ds.labels[static_cast<size_t>(v)];
            double mx = cache.logits(v, 0);
            for (int c = 1; c < model.num_classes; ++c) mx = std::max(mx, cache.logits(v, c));
            double lse = 0.0;
            for (int c = 0; c < model.num_classes; ++c) {
                lse += std::exp(cache.logits(v, c) - mx);
            }
            lse = mx + std::log(lse);
            loss += (lse - cache.logits(v, y)) * inv_train;
            for (int c = 0; c < model.num_classes; ++c) {
                d_logits(v, c) = (cache.probs(v, c) - (c == y ? 1.0 : 0.0)) * inv_train;
            }
        }
        if (!std::isfinite(loss)) {
            throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                     std::to_string(epoch));
        }
        result.epoch_loss.push_back(loss);

        BackwardResult bw = backward(model, g, cache, d_logits);
        auto grad_blocks = param_blocks(bw.grads);

        const double bias1 = 1.0 - std::pow(kBeta1, epoch);
        const double bias2 = 1.0 - std::pow(kBeta2, epoch);
        for (size_t b = 0; b < blocks.size(); ++b) {
            auto param = blocks[b].data;
            auto grad = grad_blocks[b].data;
            for (size_t t = 0; t < param.size(); ++t) {
                const double gt = grad[t] + cfg.weight_decay * param[t];
                adam_m[b][t] = kBeta1 * adam_m[b][t] + (1.0 - kBeta1) * gt;
                adam_v[b][t] = kBeta2 * adam_v[b][t] + (1.0 - kBeta2) * gt * gt;
                const double m_hat = adam_m[b][t] / bias1;
                const double v_hat = adam_v[b][t] / bias2;
                param[t] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEps);
            }
        }
    }

    result.train_accuracy = accuracy(model, g, x, ds.labels, ds.split.train);
    result.val_accuracy = accuracy(model, g, x, ds.labels, ds.split.val);
    result.test_accuracy = accuracy(model, g, x, ds.labels, ds.split.test);
    result.model = std::move(model);
    return result;
}

Matrix input_gradient(const GinModel& model, const Graph& g, const Matrix& features, int v,
                      int cls) {
    if (cls < 0 || cls >= model.num_classes) {
        throw std::invalid_argument("input_gradient: class out of range");
    }
    if (v < 0 || v >= g.num_nodes()) throw std::out_of_range("input_gradient: bad node");
    ForwardCache cache = forward_cached(model, g, features);
    Matrix d_logits(g.num_nodes(), model.num_classes);
    d_logits(v, cls) = 1.0;
    return backward(model, g, cache, d_logits).d_input;
}

Matrix feature_gradients_local(const GinModel& model, const Graph& g, const Subgraph& sub,
                               int cls) {
    const Graph local = induced_graph(sub, g.features());
    return input_gradient(model, local, local.features(), sub.center, cls);
}

Matrix feature_gradients(const GinModel& model, const Graph& g, int v, int cls) {
    const Subgraph sub = l_hop_subgraph(g, v, model.num_layers());
    const Matrix local = feature_gradients_local(model, g, sub, cls);
    Matrix full(g.num_nodes(), g.features().cols());
    for (int i = 0; i < sub.num_nodes(); ++i) {
        for (int j = 0; j < local.cols(); ++j) full(sub.global_of(i), j) = local(i, j);
    }
    return full;
}

MaskedPrediction predict_masked(const GinModel& model, const Subgraph& sub,
                                const Matrix& full_features, const Explanation& expl) {
    MaskedPrediction out;
    if (expl.node_mask.size() != static_cast<size_t>(sub.num_nodes()) ||
        expl.edge_mask.size() != static_cast<size_t>(sub.num_edges()) ||
        expl.feature_mask.size() != static_cast<size_t>(full_features.cols())) {
        throw std::invalid_argument("predict_masked: explanation does not match subgraph");
    }
    if (sub.num_nodes() == 0) {
        out.probs.assign(static_cast<size_t>(model.num_classes),
                         1.0 / static_cast<double>(model.num_classes));
        out.empty = true;
        return out;
    }
    Matrix x(sub.num_nodes(), full_features.cols());
    for (int i = 0; i < sub.num_nodes(); ++i) {
        if (expl.node_mask[static_cast<size_t>(i)] == 0.0) continue;
        const int gl = sub.global_of(i);
        for (int j = 0; j < x.cols(); ++j) {
            x(i, j) = full_features(gl, j) * (expl.feature_mask[static_cast<size_t>(j)] != 0.0);
        }
    }
    std::vector<Edge> kept;
    for (int e = 0; e < sub.num_edges(); ++e) {
        if (expl.edge_mask[static_cast<size_t>(e)] != 0.0) kept.push_back(sub.edges[static_cast<size_t>(e)]);
    }
    const Graph masked(sub.num_nodes(), std::move(kept), std::move(x));
    const ForwardResult fw = forward(model, masked, masked.features());
    out.probs.assign(static_cast<size_t>(model.num_classes), 0.0);
    for (int c = 0; c < model.num_classes; ++c) out.probs[static_cast<size_t>(c)] = fw.probs(sub.center, c);
    return out;
}

void save_model(const GinModel& model, const std::string& path) {
    nlohmann::json j;
    j["format"] = "xgraphbench-model-v1";
    j["in_dim"] = model.in_dim;
    j["hidden_dim"] = model.hidden_dim;
    j["num_classes"] = model.num_classes;
    j["num_layers"] = model.num_layers();
    nlohmann::json blocks = nlohmann::json::object();
    GinModel& mutable_model = const_cast<GinModel&>(model);
    for (const auto& block : param_blocks(mutable_model)) {
        blocks[block.name] = std::vector<double>(block.data.begin(), block.data.end());
    }
    j["params"] = std::move(blocks);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write model file: " + path);
    f << j.dump(2) << '\n';
}

GinModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read model file: " + path);
    nlohmann::json j;
    f >> j;
    if (j.value("format", "") != "xgraphbench-model-v1") {
        throw std::runtime_error("unsupported model format in " + path);
    }
    GinModel model(j.at("in_dim").get<int>(), j.at("hidden_dim").get<int>(),
                   j.at("num_classes").get<int>(), j.at("num_layers").get<int>(), 0);
    for (auto& block : param_blocks(model)) {
        const auto values = j.at("params").at(block.name).get<std::vector<double>>();
        if (values.size() != block.data.size()) {
            throw std::runtime_error("model block size mismatch: " + block.name);
        }
        std::copy(values.begin(), values.end(), block.data.begin());
    }
    return model;
}

}  // namespace xgb
