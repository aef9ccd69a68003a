#include "xgraphbench/explainers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace xgb {

std::vector<double> top_k_mask(const std::vector<double>& scores, double k_fraction) {
    if (k_fraction <= 0.0 || k_fraction > 1.0) {
        throw std::invalid_argument("top_k_mask: k_fraction must lie in (0,1]");
    }
    const size_t n = scores.size();
    std::vector<double> mask(n, 0.0);
    if (n == 0) return mask;
    // ceil(k*n), but don't let 0.3*10 == 3.0000000000000004 round up to 4
    const double raw = k_fraction * static_cast<double>(n);
    const double nearest = std::round(raw);
    const size_t keep = std::abs(raw - nearest) < 1e-9 ? static_cast<size_t>(nearest)
                                                       : static_cast<size_t>(std::ceil(raw));
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    for (size_t i = 0; i < std::min(keep, n); ++i) mask[order[i]] = 1.0;
    return mask;
}

Explanation harden(const Explanation& soft, double k_fraction) {
    Explanation hard;
    hard.node_mask = top_k_mask(soft.node_mask, k_fraction);
    hard.edge_mask = top_k_mask(soft.edge_mask, k_fraction);
    hard.feature_mask = top_k_mask(soft.feature_mask, k_fraction);
    hard.center = soft.center;
    hard.hard = true;
    return hard;
}

Explanation random_explanation(const Subgraph& sub, int num_features, Rng& rng) {
    Explanation e;
    e.center = sub.num_nodes() > 0 ? sub.global_of(sub.center) : -1;
    e.feature_mask.resize(static_cast<size_t>(num_features));
    for (double& s : e.feature_mask) s = rng.normal();
    e.node_mask.resize(static_cast<size_t>(sub.num_nodes()));
    for (double& s : e.node_mask) s = rng.uniform();
    e.edge_mask.resize(static_cast<size_t>(sub.num_edges()));
    for (double& s : e.edge_mask) s = rng.uniform();
    return e;
}

namespace {

// node scores = row L2 norms, feature scores = |center row|, edge scores =
// endpoint means
Explanation scores_from_attribution(const Matrix& attr, const Graph& graph, int center) {
    Explanation e;
    e.center = center;
    e.node_mask.resize(static_cast<size_t>(attr.rows()));
    for (int i = 0; i < attr.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < attr.cols(); ++j) s += attr(i, j) * attr(i, j);
        e.node_mask[static_cast<size_t>(i)] = std::sqrt(s);
    }
    e.feature_mask.resize(static_cast<size_t>(attr.cols()));
    for (int j = 0; j < attr.cols(); ++j) {
        e.feature_mask[static_cast<size_t>(j)] = std::abs(attr(center, j));
    }
    e.edge_mask.resize(graph.edges().size());
    for (size_t t = 0; t < graph.edges().size(); ++t) {
        const auto& [a, b] = graph.edges()[t];
        e.edge_mask[t] = 0.5 * (e.node_mask[static_cast<size_t>(a)] +
                                e.node_mask[static_cast<size_t>(b)]);
    }
    return e;
}

int predicted_class(const GinModel& model, const Graph& graph, int center) {
    const ForwardResult fw = forward(model, graph, graph.features());
    int best = 0;
    for (int c = 1; c < fw.logits.cols(); ++c) {
        if (fw.logits(center, c) > fw.logits(center, best)) best = c;
    }
    return best;
}

}  // namespace

Explanation grad_explain_local(const GinModel& model, const Graph& graph, int center) {
    const int cls = predicted_class(model, graph, center);
    Matrix grad = input_gradient(model, graph, graph.features(), center, cls);
    for (double& g : grad.flat()) g = std::abs(g);
    return scores_from_attribution(grad, graph, center);
}

Explanation integrated_gradients_local(const GinModel& model, const Graph& graph, int center,
                                       int steps) {
    if (steps < 2) throw std::invalid_argument("integrated_gradients: steps must be >= 2");
    const Matrix& x = graph.features();
    const int cls = predicted_class(model, graph, center);
    Matrix total(x.rows(), x.cols());
    Matrix scaled(x.rows(), x.cols());
    for (int s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s) / static_cast<double>(steps);
        for (size_t i = 0; i < scaled.flat().size(); ++i) scaled.flat()[i] = t * x.flat()[i];
        const Matrix grad = input_gradient(model, graph, scaled, center, cls);
        for (size_t i = 0; i < total.flat().size(); ++i) total.flat()[i] += grad.flat()[i];
    }
    // attribution = x * mean path gradient (zero baseline)
    for (size_t i = 0; i < total.flat().size(); ++i) {
        total.flat()[i] *= x.flat()[i] / static_cast<double>(steps);
    }
    return scores_from_attribution(total, graph, center);
}

Explanation grad_explain(const GinModel& model, const Dataset& ds, int v) {
    const Subgraph sub = enclosing_subgraph(ds, v);
    const Graph local = induced_graph(sub, ds.graph.features());
    Explanation e = grad_explain_local(model, local, sub.center);
    e.center = v;
    return e;
}

Explanation integrated_gradients(const GinModel& model, const Dataset& ds, int v, int steps) {
    const Subgraph sub = enclosing_subgraph(ds, v);
    const Graph local = induced_graph(sub, ds.graph.features());
    Explanation e = integrated_gradients_local(model, local, sub.center, steps);
    e.center = v;
    return e;
}

}  // namespace xgb
