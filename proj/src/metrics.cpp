#include "xgraphbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace xgb {

namespace {

const std::vector<double>& pick_mask(const Explanation& e, MaskKind kind) {
    switch (kind) {
        case MaskKind::node: return e.node_mask;
        case MaskKind::edge: return e.edge_mask;
        case MaskKind::feature: return e.feature_mask;
    }
    throw std::invalid_argument("bad mask kind");
}

double row_norm_diff(const Matrix& a, const Matrix& b, int row, int order) {
    double acc = 0.0;
    for (int c = 0; c < a.cols(); ++c) {
        const double d = std::abs(a(row, c) - b(row, c));
        if (order == 1) acc += d;
        else if (order == 2) acc += d * d;
        else acc = std::max(acc, d);
    }
    return order == 2 ? std::sqrt(acc) : acc;
}

int argmax_row(const Matrix& m, int row) {
    int best = 0;
    for (int c = 1; c < m.cols(); ++c) {
        if (m(row, c) > m(row, best)) best = c;
    }
    return best;
}

}  // namespace

MaskKind mask_kind_from_string(const std::string& name) {
    if (name == "node") return MaskKind::node;
    if (name == "edge") return MaskKind::edge;
    if (name == "feature") return MaskKind::feature;
    throw std::invalid_argument("unknown mask kind: " + name);
}

std::string to_string(MaskKind kind) {
    switch (kind) {
        case MaskKind::node: return "node";
        case MaskKind::edge: return "edge";
        case MaskKind::feature: return "feature";
    }
    return "?";
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine_distance: length mismatch");
    if (std::equal(a.begin(), a.end(), b.begin())) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    constexpr double kEps = 1e-12;
    return 1.0 - dot / ((std::sqrt(na) + kEps) * (std::sqrt(nb) + kEps));
}

double jaccard(const std::vector<double>& gt, const std::vector<double>& pred) {
    if (gt.size() != pred.size()) throw std::invalid_argument("jaccard: length mismatch");
    int tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < gt.size(); ++i) {
        const bool g = gt[i] != 0.0, p = pred[i] != 0.0;
        if (g && p) ++tp;
        else if (!g && p) ++fp;
        else if (g && !p) ++fn;
    }
    if (tp + fp + fn == 0) return 1.0;  // both empty: agree that nothing matters
    return static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
}

double gea(const std::vector<Explanation>& gt_set, const Explanation& pred, MaskKind kind,
           double k_fraction) {
    if (gt_set.empty()) throw std::invalid_argument("gea: empty ground-truth set");
    const Explanation hardened = pred.hard ? pred : harden(pred, k_fraction);
    const auto& p = pick_mask(hardened, kind);
    double best = 0.0;
    for (const auto& gt : gt_set) best = std::max(best, jaccard(pick_mask(gt, kind), p));
    return best;
}

double gef_from_distributions(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("gef: distribution length mismatch");
    if (p.empty()) throw std::invalid_argument("gef: empty distributions");
    constexpr double kFloor = 1e-10;
    std::vector<double> qf(q.begin(), q.end());
    double qsum = 0.0;
    for (double& qi : qf) {
        qi = std::max(qi, kFloor);
        qsum += qi;
    }
    double kl = 0.0;
    for (size_t c = 0; c < p.size(); ++c) {
        if (p[c] > 0.0) kl += p[c] * std::log(p[c] / (qf[c] / qsum));
    }
    kl = std::max(kl, 0.0);  // guard fp residue when the distributions match
    return 1.0 - std::exp(-kl);
}

double gef(const GinModel& model, const Subgraph& sub, const Matrix& full_features,
           const Explanation& expl, double k_fraction) {
    const Explanation hardened = expl.hard ? expl : harden(expl, k_fraction);
    const Graph local = induced_graph(sub, full_features);
    const ForwardResult fw = forward(model, local, local.features());
    const MaskedPrediction masked = predict_masked(model, sub, full_features, hardened);
    return gef_from_distributions(fw.probs.row(sub.center), masked.probs);
}

double ges(const GinModel& model, const LocalExplainerFn& explainer, int v, const Dataset& ds,
           const PerturbConfig& cfg, Rng& rng, int* skipped) {
    if (cfg.num_samples < 1) throw std::invalid_argument("ges: num_samples must be >= 1");
    if (cfg.compare == MaskKind::edge) {
        throw std::invalid_argument("ges: edge masks change length under edge dropping");
    }
    const Subgraph sub = enclosing_subgraph(ds, v);
    const Graph local = induced_graph(sub, ds.graph.features());
    const Explanation base = explainer(model, local, sub.center);
    const auto& base_scores = pick_mask(base, cfg.compare);

    const ForwardResult fw = forward(model, local, local.features());
    const int base_label = argmax_row(fw.logits, sub.center);
    double delta = cfg.delta;
    if (delta <= 0.0) {
        double norm = 0.0;
        for (int c = 0; c < fw.logits.cols(); ++c) {
            norm += fw.logits(sub.center, c) * fw.logits(sub.center, c);
        }
        delta = 0.1 * std::sqrt(norm);
    }

    // motif edges never drop; everything else is fair game
    std::unordered_set<long long> motif_edges;
    for (const auto& m : ds.motifs) {
        for (const auto& [a, b] : m.edges) {
            motif_edges.insert(static_cast<long long>(a) << 32 | static_cast<unsigned>(b));
        }
    }
    std::vector<char> droppable(sub.edges.size(), 0);
    for (size_t t = 0; t < sub.edges.size(); ++t) {
        const long long ga = sub.global_of(sub.edges[t].first);
        const long long gb = sub.global_of(sub.edges[t].second);
        droppable[t] = motif_edges.count(ga << 32 | static_cast<unsigned>(gb)) == 0;
    }

    double worst = 0.0;
    int skips = 0;
    Matrix noisy(local.num_nodes(), local.features().cols());
    for (int s = 0; s < cfg.num_samples; ++s) {
        for (size_t i = 0; i < noisy.flat().size(); ++i) {
            noisy.flat()[i] = local.features().flat()[i] +
                              (cfg.feature_noise_sigma > 0.0
                                   ? rng.normal(0.0, cfg.feature_noise_sigma)
                                   : 0.0);
        }
        std::vector<Edge> kept;
        kept.reserve(sub.edges.size());
        for (size_t t = 0; t < sub.edges.size(); ++t) {
            if (droppable[t] && rng.uniform() < cfg.edge_drop_prob) continue;
            kept.push_back(sub.edges[t]);
        }
        const Graph perturbed(local.num_nodes(), std::move(kept), noisy);
        const ForwardResult pfw = forward(model, perturbed, perturbed.features());
        if (argmax_row(pfw.logits, sub.center) != base_label) continue;
        if (row_norm_diff(fw.logits, pfw.logits, sub.center, cfg.norm_order) > delta) continue;
        try {
            const Explanation pexp = explainer(model, perturbed, sub.center);
            worst = std::max(worst, cosine_distance(base_scores, pick_mask(pexp, cfg.compare)));
        } catch (const std::exception&) {
            ++skips;
        }
    }
    if (skipped != nullptr) *skipped = skips;
    return worst;
}

double gecf(const LocalExplainerFn& explainer, const GinModel& model, int v, const Dataset& ds,
            Rng& rng, MaskKind kind) {
    if (ds.protected_index < 0) throw std::invalid_argument("gecf: dataset has no protected feature");
    if (ds.num_classes < 2) throw std::invalid_argument("gecf: protected feature has one value");
    const Subgraph sub = enclosing_subgraph(ds, v);
    const Graph local = induced_graph(sub, ds.graph.features());
    const Explanation base = explainer(model, local, sub.center);

    const int current = static_cast<int>(
        std::lround(local.features()(sub.center, ds.protected_index)));
    const int r = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(ds.num_classes - 1)));
    const int flipped = r < current ? r : r + 1;
    Matrix cf = local.features();
    cf(sub.center, ds.protected_index) = static_cast<double>(flipped);
    const Graph cf_graph(local.num_nodes(), local.edges(), std::move(cf));
    const Explanation cf_expl = explainer(model, cf_graph, sub.center);
    return cosine_distance(pick_mask(base, kind), pick_mask(cf_expl, kind));
}

double statistical_parity(const std::vector<int>& predictions, const std::vector<int>& groups) {
    if (predictions.size() != groups.size()) {
        throw std::invalid_argument("statistical_parity: length mismatch");
    }
    int n0 = 0, n1 = 0, pos0 = 0, pos1 = 0;
    for (size_t i = 0; i < groups.size(); ++i) {
        if (groups[i] == 0) {
            ++n0;
            pos0 += predictions[i] == 1;
        } else if (groups[i] == 1) {
            ++n1;
            pos1 += predictions[i] == 1;
        } else {
            throw std::invalid_argument("statistical_parity: groups must be 0/1");
        }
    }
    if (n0 == 0 || n1 == 0) {
        throw std::runtime_error("statistical_parity: a protected group is empty");
    }
    return std::abs(static_cast<double>(pos0) / n0 - static_cast<double>(pos1) / n1);
}

double gegf_from_predictions(const std::vector<int>& original, const std::vector<int>& masked,
                             const std::vector<int>& groups) {
    if (original.size() != masked.size() || original.size() != groups.size()) {
        throw std::invalid_argument("gegf: prediction/group length mismatch");
    }
    return std::abs(statistical_parity(original, groups) - statistical_parity(masked, groups));
}

double gegf(const GinModel& model, const std::vector<int>& nodes,
            const std::vector<Explanation>& explanations, const Dataset& ds, double k_fraction) {
    if (nodes.empty()) throw std::invalid_argument("gegf: empty node list");
    if (nodes.size() != explanations.size()) {
        throw std::invalid_argument("gegf: one explanation per node required");
    }
    if (ds.protected_index < 0) throw std::invalid_argument("gegf: dataset has no protected feature");

    std::vector<int> groups(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        const int g = static_cast<int>(
            std::lround(ds.graph.features()(nodes[i], ds.protected_index)));
        if (g != 0 && g != 1) {
            throw std::invalid_argument("gegf: protected feature not binary on this node set");
        }
        groups[i] = g;
    }

    const std::vector<int> full_pred = predict(model, ds.graph, ds.graph.features());
    std::vector<int> original(nodes.size()), masked(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        original[i] = full_pred[static_cast<size_t>(nodes[i])];
        const Subgraph sub = enclosing_subgraph(ds, nodes[i]);
        const Explanation& e = explanations[i];
        const Explanation hardened = e.hard ? e : harden(e, k_fraction);
        const MaskedPrediction mp = predict_masked(model, sub, ds.graph.features(), hardened);
        int best = 0;
        for (int c = 1; c < ds.num_classes; ++c) {
            if (mp.probs[static_cast<size_t>(c)] > mp.probs[static_cast<size_t>(best)]) best = c;
        }
        masked[i] = best;
    }
    return gegf_from_predictions(original, masked, groups);
}

}  // namespace xgb
