#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "xgraphbench/gin.hpp"
#include "xgraphbench/rng.hpp"

using namespace xgb;

namespace {

Graph random_featured_graph(int n, int n_f, Rng& rng) {
    GraphBuilder b(n);
    for (int v = 1; v < n; ++v) {
        b.add_edge(v, static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(v))));
    }
    for (int e = 0; e < n; ++e) {
        const int u = rng.uniform_int(n), w = rng.uniform_int(n);
        if (u != w) b.add_edge(u, w);
    }
    Matrix x(n, n_f);
    for (double& t : x.flat()) t = rng.normal();
    return b.build(x);
}

// scalar loss sum(d .* logits) used by every finite-difference probe
double probe_loss(const GinModel& m, const Graph& g, const Matrix& x, const Matrix& d) {
    const ForwardResult r = forward(m, g, x);
    double s = 0.0;
    for (size_t i = 0; i < d.flat().size(); ++i) s += d.flat()[i] * r.logits.flat()[i];
    return s;
}

}  // namespace

TEST_CASE("initialization is seed-deterministic and bias-free") {
    GinModel a(7, 16, 2, 3, 99), b(7, 16, 2, 3, 99), c(7, 16, 2, 3, 100);
    CHECK(a.layers[0].w1 == b.layers[0].w1);
    CHECK(a.w_out == b.w_out);
    CHECK(a.layers[2].w2 == b.layers[2].w2);
    CHECK(a.layers[0].w1 != c.layers[0].w1);
    for (const auto& layer : a.layers) {
        CHECK(layer.eps == 0.0);
        for (double t : layer.b1) CHECK(t == 0.0);
        for (double t : layer.b2) CHECK(t == 0.0);
    }
    // Glorot-uniform bound for the first layer
    const double bound = std::sqrt(6.0 / (7 + 16));
    for (double t : a.layers[0].w1.flat()) {
        CHECK(std::abs(t) <= bound);
    }
}

TEST_CASE("param_blocks exposes every trainable value exactly once") {
    GinModel m(5, 8, 3, 2, 1);
    const auto blocks = param_blocks(m);
    size_t total = 0;
    for (const auto& b : blocks) total += b.data.size();
    // layer 0: 5*8 + 8 + 8*8 + 8 + eps; layer 1: 8*8 + 8 + 8*8 + 8 + eps; head: 8*3 + 3
    CHECK(total == (5 * 8 + 8 + 8 * 8 + 8 + 1) + (8 * 8 + 8 + 8 * 8 + 8 + 1) + (8 * 3 + 3));
    // writing through a block mutates the model
    blocks[0].data[0] = 123.0;
    CHECK(m.layers[0].w1.flat()[0] == 123.0);
}

TEST_CASE("cached and plain forward agree") {
    Rng rng(5);
    const Graph g = random_featured_graph(12, 4, rng);
    const GinModel m(4, 8, 3, 2, 7);
    const ForwardResult r = forward(m, g, g.features());
    const ForwardCache c = forward_cached(m, g, g.features());
    CHECK(r.logits == c.logits);
    CHECK(r.probs == c.probs);
    CHECK(c.h.front() == g.features());
    for (int i = 0; i < g.num_nodes(); ++i) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += r.probs(i, k);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("backprop matches central finite differences everywhere") {
    Rng rng(6);
    const int n = 10, n_f = 5, classes = 3;
    Graph g = random_featured_graph(n, n_f, rng);
    GinModel m(n_f, 6, classes, 3, 8);
    for (auto& layer : m.layers) layer.eps = 0.05;  // exercise the eps gradient

    Matrix d(n, classes);
    for (double& t : d.flat()) t = rng.normal();

    const ForwardCache cache = forward_cached(m, g, g.features());
    BackwardResult back = backward(m, g, cache, d);

    const double step = 1e-5;
    auto grad_blocks = param_blocks(back.grads);
    auto model_blocks = param_blocks(m);
    REQUIRE(grad_blocks.size() == model_blocks.size());
    for (size_t bi = 0; bi < model_blocks.size(); ++bi) {
        for (size_t t = 0; t < model_blocks[bi].data.size(); ++t) {
            double& slot = model_blocks[bi].data[t];
            const double keep = slot;
            slot = keep + step;
            const double up = probe_loss(m, g, g.features(), d);
            slot = keep - step;
            const double down = probe_loss(m, g, g.features(), d);
            slot = keep;
            const double fd = (up - down) / (2.0 * step);
            const double an = grad_blocks[bi].data[t];
            const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
            INFO("block " << model_blocks[bi].name << " index " << t);
            CHECK(std::abs(fd - an) / denom < 1e-3);
        }
    }

    // feature gradients through the same probe
    Matrix x = g.features();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n_f; ++j) {
            const double keep = x(i, j);
            x(i, j) = keep + step;
            const double up = probe_loss(m, g, x, d);
            x(i, j) = keep - step;
            const double down = probe_loss(m, g, x, d);
            x(i, j) = keep;
            const double fd = (up - down) / (2.0 * step);
            const double an = back.d_input(i, j);
            const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
            CHECK(std::abs(fd - an) / denom < 1e-3);
        }
    }
}

TEST_CASE("input_gradient isolates one logit of one node") {
    Rng rng(16);
    const Graph g = random_featured_graph(9, 3, rng);
    const GinModel m(3, 6, 2, 2, 3);
    const int v = 4, cls = 1;
    const Matrix grad = input_gradient(m, g, g.features(), v, cls);

    Matrix d(9, 2);
    d(v, cls) = 1.0;
    const ForwardCache cache = forward_cached(m, g, g.features());
    const BackwardResult back = backward(m, g, cache, d);
    CHECK(grad == back.d_input);
    CHECK_THROWS_AS((void)input_gradient(m, g, g.features(), 9, 0), std::out_of_range);
    CHECK_THROWS_AS((void)input_gradient(m, g, g.features(), 0, 2), std::invalid_argument);
}

TEST_CASE("feature_gradients scatters the local result and is zero elsewhere") {
    Rng rng(26);
    const Graph g = random_featured_graph(14, 3, rng);
    const GinModel m(3, 6, 2, 1, 3);  // one layer: receptive field is 1 hop
    const int v = 5;
    const Matrix full = feature_gradients(m, g, v, 0);
    const Subgraph sub = l_hop_subgraph(g, v, 1);
    const Matrix local = feature_gradients_local(m, g, sub, 0);
    REQUIRE(local.rows() == sub.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i) {
        const int li = sub.local_of(i);
        for (int j = 0; j < 3; ++j) {
            CHECK(full(i, j) == (li >= 0 ? local(li, j) : 0.0));
        }
    }
}

TEST_CASE("training separates an easy dataset deterministically") {
    // two feature blobs, labels follow the blob, a few random edges
    Rng rng(31);
    const int n = 60;
    GraphBuilder b(n);
    for (int v = 1; v < n; ++v) b.add_edge(v, rng.uniform_int(v));
    Matrix x(n, 2);
    std::vector<int> labels(n);
    for (int v = 0; v < n; ++v) {
        labels[static_cast<size_t>(v)] = v % 2;
        x(v, 0) = rng.normal() + (v % 2 == 0 ? 2.5 : -2.5);
        x(v, 1) = rng.normal();
    }
    Dataset ds;
    ds.graph = b.build(x);
    ds.labels = labels;
    ds.num_classes = 2;
    ds.num_layers = 2;
    Rng split_rng(7);
    ds.split = stratified_split(labels, 2, 0.6, 0.2, split_rng);

    TrainConfig cfg;
    cfg.epochs = 120;
    cfg.seed = 2;
    const TrainResult r1 = train(GinModel(2, 8, 2, 2, cfg.seed), ds, cfg);
    CHECK(r1.epoch_loss.size() == 120);
    CHECK(r1.epoch_loss.back() < r1.epoch_loss.front());
    CHECK(r1.train_accuracy > 0.9);
    CHECK(r1.test_accuracy > 0.8);

    const TrainResult r2 = train(GinModel(2, 8, 2, 2, cfg.seed), ds, cfg);
    CHECK(r1.model.w_out == r2.model.w_out);  // Adam runs are bit-identical
    CHECK(r1.epoch_loss == r2.epoch_loss);
}

TEST_CASE("checkpoints round-trip bit-for-bit") {
    Rng rng(41);
    const Graph g = random_featured_graph(10, 4, rng);
    GinModel m(4, 8, 3, 2, 5);
    m.layers[0].eps = 0.25;
    const auto path = (std::filesystem::temp_directory_path() / "xgb_model_test.json").string();
    save_model(m, path);
    const GinModel loaded = load_model(path);
    CHECK(loaded.in_dim == m.in_dim);
    CHECK(loaded.hidden_dim == m.hidden_dim);
    CHECK(loaded.num_classes == m.num_classes);
    REQUIRE(loaded.num_layers() == m.num_layers());
    CHECK(loaded.layers[0].eps == 0.25);
    for (int l = 0; l < m.num_layers(); ++l) {
        CHECK(loaded.layers[static_cast<size_t>(l)].w1 == m.layers[static_cast<size_t>(l)].w1);
        CHECK(loaded.layers[static_cast<size_t>(l)].w2 == m.layers[static_cast<size_t>(l)].w2);
        CHECK(loaded.layers[static_cast<size_t>(l)].b1 == m.layers[static_cast<size_t>(l)].b1);
        CHECK(loaded.layers[static_cast<size_t>(l)].b2 == m.layers[static_cast<size_t>(l)].b2);
    }
    CHECK(loaded.w_out == m.w_out);
    CHECK(loaded.b_out == m.b_out);
    const ForwardResult a = forward(m, g, g.features());
    const ForwardResult b = forward(loaded, g, g.features());
    CHECK(a.logits == b.logits);
    std::filesystem::remove(path);
}

TEST_CASE("predict_masked applies node, feature, and edge masks") {
    Rng rng(51);
    const Graph g = random_featured_graph(12, 3, rng);
    const GinModel m(3, 6, 2, 2, 9);
    const Subgraph sub = l_hop_subgraph(g, 3, 2);

    Explanation keep_all;
    keep_all.node_mask.assign(static_cast<size_t>(sub.num_nodes()), 1.0);
    keep_all.edge_mask.assign(static_cast<size_t>(sub.num_edges()), 1.0);
    keep_all.feature_mask.assign(3, 1.0);
    const MaskedPrediction full = predict_masked(m, sub, g.features(), keep_all);
    CHECK_FALSE(full.empty);
    const Graph local = induced_graph(sub, g.features());
    const ForwardResult direct = forward(m, local, local.features());
    for (int k = 0; k < 2; ++k) {
        CHECK(full.probs[static_cast<size_t>(k)] ==
              doctest::Approx(direct.probs(sub.center, k)).epsilon(1e-12));
    }

    // all-zero node mask zeroes every feature row but keeps the topology
    Explanation zero_nodes = keep_all;
    zero_nodes.node_mask.assign(static_cast<size_t>(sub.num_nodes()), 0.0);
    const MaskedPrediction blank = predict_masked(m, sub, g.features(), zero_nodes);
    CHECK_FALSE(blank.empty);
    Matrix zeros(local.num_nodes(), 3);
    const Graph zl(local.num_nodes(), local.edges(), zeros);
    const ForwardResult zr = forward(m, zl, zl.features());
    for (int k = 0; k < 2; ++k) {
        CHECK(blank.probs[static_cast<size_t>(k)] ==
              doctest::Approx(zr.probs(sub.center, k)).epsilon(1e-12));
    }

    // dropping every edge leaves isolated nodes, still not "empty"
    Explanation no_edges = keep_all;
    no_edges.edge_mask.assign(static_cast<size_t>(sub.num_edges()), 0.0);
    const MaskedPrediction iso = predict_masked(m, sub, g.features(), no_edges);
    CHECK_FALSE(iso.empty);
    const Graph il(local.num_nodes(), {}, local.features());
    const ForwardResult ir = forward(m, il, il.features());
    for (int k = 0; k < 2; ++k) {
        CHECK(iso.probs[static_cast<size_t>(k)] ==
              doctest::Approx(ir.probs(sub.center, k)).epsilon(1e-12));
    }

    // mask length mismatches are rejected
    Explanation bad = keep_all;
    bad.node_mask.pop_back();
    CHECK_THROWS_AS((void)predict_masked(m, sub, g.features(), bad), std::invalid_argument);
}
