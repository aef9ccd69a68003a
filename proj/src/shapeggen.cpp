#include "xgraphbench/shapeggen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace xgb {

namespace {

int motif_node_count(const std::vector<Edge>& edges) {
    int mx = -1;
    for (const auto& [a, b] : edges) mx = std::max({mx, a, b});
    return mx + 1;
}

bool motif_connected(const std::vector<Edge>& edges, int n) {
    if (n <= 0) return false;
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (const auto& [a, b] : edges) {
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    for (size_t head = 0; head < queue.size(); ++head) {
        for (int w : adj[static_cast<size_t>(queue[head])]) {
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                queue.push_back(w);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

// sorted-set insert of one id (-1 = nothing)
std::vector<int> set_with(const std::vector<int>& s, int id) {
    std::vector<int> out = s;
    if (id >= 0) {
        auto it = std::lower_bound(out.begin(), out.end(), id);
        if (it == out.end() || *it != id) out.insert(it, id);
    }
    return out;
}

}  // namespace

std::vector<Edge> motif_edges(const ShapeGGenParams& params) {
    if (params.motif == "house") {
        // 4-cycle 0-1-2-3 plus roof node 4 over the 0-1 edge
        return {{0, 1}, {0, 3}, {0, 4}, {1, 2}, {1, 4}, {2, 3}};
    }
    if (params.motif == "triangle") {
        return {{0, 1}, {0, 2}, {1, 2}};
    }
    if (params.motif == "custom") {
        std::vector<Edge> out;
        out.reserve(params.custom_motif_edges.size());
        for (const auto& [a, b] : params.custom_motif_edges) {
            out.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    throw std::invalid_argument("unknown motif: " + params.motif);
}

void validate(const ShapeGGenParams& params) {
    auto edges = motif_edges(params);  // throws on unknown name
    if (edges.empty()) throw std::invalid_argument("motif has no edges");
    for (const auto& [a, b] : edges) {
        if (a == b || a < 0) throw std::invalid_argument("motif edge is a self-loop or negative");
    }
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw std::invalid_argument("motif has duplicate edges");
    }
    const int m = motif_node_count(edges);
    if (!motif_connected(edges, m)) throw std::invalid_argument("motif must be connected");
    if (params.num_subgraphs < 1) throw std::invalid_argument("num_subgraphs must be >= 1");
    if (params.connection_prob < 0.0 || params.connection_prob > 1.0) {
        throw std::invalid_argument("connection_prob must lie in [0,1]");
    }
    if (params.subgraph_size < m) throw std::invalid_argument("subgraph_size smaller than motif");
    if (params.num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
    if (params.num_informative < 1 || params.num_informative > params.num_features - 1) {
        throw std::invalid_argument("need 1 <= num_informative <= num_features - 1");
    }
    if (params.class_sep <= 0.0) throw std::invalid_argument("class_sep must be positive");
    if (params.clusters_per_class < 1) throw std::invalid_argument("clusters_per_class must be >= 1");
    if (params.protected_noise < 0.0 || params.protected_noise > 1.0) {
        throw std::invalid_argument("protected_noise must lie in [0,1]");
    }
    if (!std::isfinite(params.homophily)) throw std::invalid_argument("homophily must be finite");
    if (params.model_layers < 1) throw std::invalid_argument("model_layers must be >= 1");
}

StructureResult generate_structure(const ShapeGGenParams& params, Rng& rng) {
    validate(params);
    const auto shape = motif_edges(params);
    const int shape_n = motif_node_count(shape);
    const int n_sub = params.num_subgraphs;
    const int k_max = params.num_classes;

    GraphBuilder gb;
    std::vector<MotifInstance> motifs;
    motifs.reserve(static_cast<size_t>(n_sub));
    std::vector<std::vector<int>> members(static_cast<size_t>(n_sub));
    std::vector<int> motif_of;  // node -> motif id, -1 for pendant nodes

    const double lambda = static_cast<double>(params.subgraph_size - shape_n);
    for (int i = 0; i < n_sub; ++i) {
        const int base = gb.num_nodes();
        MotifInstance inst;
        inst.id = i;
        for (int t = 0; t < shape_n; ++t) {
            gb.add_node();
            motif_of.push_back(i);
            inst.nodes.push_back(base + t);
            members[static_cast<size_t>(i)].push_back(base + t);
        }
        for (const auto& [a, b] : shape) {
            gb.add_edge(base + a, base + b);
            inst.edges.emplace_back(base + a, base + b);
        }
        std::sort(inst.edges.begin(), inst.edges.end());
        motifs.push_back(std::move(inst));

        const int extra = lambda > 0.0 ? static_cast<int>(rng.poisson(lambda)) : 0;
        std::vector<double> weights(static_cast<size_t>(shape_n));
        for (int t = 0; t < extra; ++t) {
            for (int s = 0; s < shape_n; ++s) {
                weights[static_cast<size_t>(s)] = static_cast<double>(gb.degree(base + s));
            }
            const int anchor = base + static_cast<int>(rng.weighted_index(weights));
            const int fresh = gb.add_node();
            motif_of.push_back(-1);
            gb.add_edge(fresh, anchor);
            members[static_cast<size_t>(i)].push_back(fresh);
        }
    }

    // v's current set of motifs with a node in its closed 1-hop neighborhood;
    // within one untouched subgraph that is exactly {i}
    std::vector<std::vector<int>> motif_sets(static_cast<size_t>(gb.num_nodes()));
    for (int i = 0; i < n_sub; ++i) {
        for (int v : members[static_cast<size_t>(i)]) motif_sets[static_cast<size_t>(v)] = {i};
    }

    const double p = params.connection_prob;
    std::vector<std::pair<int, int>> pool;
    std::vector<double> pool_weights;
    for (int i = 0; i < n_sub; ++i) {
        for (int j = 0; j < n_sub; ++j) {
            if (j == i) continue;
            if (rng.uniform() >= p) continue;
            pool.clear();
            for (int u : members[static_cast<size_t>(i)]) {
                for (int w : members[static_cast<size_t>(j)]) {
                    if (!gb.has_edge(u, w)) pool.emplace_back(u, w);
                }
            }
            while (!pool.empty()) {
                // each endpoint degree-proportional within its own subgraph,
                // so a candidate pair's weight is the degree product
                pool_weights.resize(pool.size());
                for (size_t t = 0; t < pool.size(); ++t) {
                    pool_weights[t] = static_cast<double>(gb.degree(pool[t].first)) *
                                      static_cast<double>(gb.degree(pool[t].second));
                }
                const size_t pick = rng.weighted_index(pool_weights);
                const auto [u, w] = pool[pick];
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
                auto set_u = set_with(motif_sets[static_cast<size_t>(u)], motif_of[static_cast<size_t>(w)]);
                auto set_w = set_with(motif_sets[static_cast<size_t>(w)], motif_of[static_cast<size_t>(u)]);
                if (static_cast<int>(set_u.size()) > k_max || static_cast<int>(set_w.size()) > k_max) {
                    continue;  // would overflow a 1-hop motif count; try next candidate
                }
                gb.add_edge(u, w);
                motif_sets[static_cast<size_t>(u)] = std::move(set_u);
                motif_sets[static_cast<size_t>(w)] = std::move(set_w);
                break;
            }
        }
    }

    auto comp = largest_connected_component(gb.build());
    StructureResult out;
    out.graph = std::move(comp.graph);
    for (const auto& inst : motifs) {
        // subgraphs are connected, so a motif survives whole or not at all
        if (comp.old_to_new[static_cast<size_t>(inst.nodes.front())] < 0) continue;
        MotifInstance kept;
        kept.id = static_cast<int>(out.motifs.size());
        for (int v : inst.nodes) kept.nodes.push_back(comp.old_to_new[static_cast<size_t>(v)]);
        std::sort(kept.nodes.begin(), kept.nodes.end());
        for (const auto& [a, b] : inst.edges) {
            const int na = comp.old_to_new[static_cast<size_t>(a)];
            const int nb = comp.old_to_new[static_cast<size_t>(b)];
            kept.edges.emplace_back(std::min(na, nb), std::max(na, nb));
        }
        std::sort(kept.edges.begin(), kept.edges.end());
        out.motifs.push_back(std::move(kept));
    }
    return out;
}

std::vector<int> assign_labels(const Graph& g, const std::vector<MotifInstance>& motifs,
                               int num_classes) {
    const auto counts = compute_node_motifs(g, motifs, 1);
    std::vector<int> labels(static_cast<size_t>(g.num_nodes()));
    for (int v = 0; v < g.num_nodes(); ++v) {
        const int c = static_cast<int>(counts[static_cast<size_t>(v)].size());
        if (c < 1 || c > num_classes) {
            throw std::runtime_error("node " + std::to_string(v) + " touches " + std::to_string(c) +
                                     " motifs; generation violated the 1.." +
                                     std::to_string(num_classes) + " bound");
        }
        labels[static_cast<size_t>(v)] = c - 1;
    }
    return labels;
}

FeatureResult generate_node_features(const std::vector<int>& labels,
                                     const ShapeGGenParams& params, Rng& feature_rng,
                                     Rng& flip_rng) {
    const int n = static_cast<int>(labels.size());
    const int n_f = params.num_features;
    const int n_i = params.num_informative;
    const int k = params.num_classes;
    const int n_clusters = k * params.clusters_per_class;
    const double s_f = params.class_sep;

    // cluster centers on hypercube corners {±s_f}^{n_i}
    const bool corners_exhausted =
        n_i < 63 && (std::uint64_t{1} << n_i) < static_cast<std::uint64_t>(n_clusters);
    std::vector<std::vector<double>> centers;
    std::vector<std::uint64_t> used;
    centers.reserve(static_cast<size_t>(n_clusters));
    while (static_cast<int>(centers.size()) < n_clusters) {
        const std::uint64_t corner = feature_rng.uniform_index(std::uint64_t{1} << std::min(n_i, 62));
        if (!corners_exhausted) {
            if (std::find(used.begin(), used.end(), corner) != used.end()) continue;
            used.push_back(corner);
        }
        std::vector<double> c(static_cast<size_t>(n_i));
        for (int d = 0; d < n_i; ++d) {
            c[static_cast<size_t>(d)] = (corner >> d & 1u) ? s_f : -s_f;
            if (corners_exhausted) c[static_cast<size_t>(d)] += feature_rng.normal(0.0, 0.1 * s_f);
        }
        centers.push_back(std::move(c));
    }

    FeatureResult out;
    out.features = Matrix(n, n_f);
    for (int v = 0; v < n; ++v) {
        const int cluster = labels[static_cast<size_t>(v)] * params.clusters_per_class +
                            static_cast<int>(feature_rng.uniform_index(
                                static_cast<std::uint64_t>(params.clusters_per_class)));
        const auto& center = centers[static_cast<size_t>(cluster)];
        for (int d = 0; d < n_i; ++d) {
            out.features(v, d) = center[static_cast<size_t>(d)] + feature_rng.normal();
        }
        for (int d = n_i; d < n_f - 1; ++d) out.features(v, d) = feature_rng.normal();
    }
    for (int v = 0; v < n; ++v) {
        int value = labels[static_cast<size_t>(v)];
        if (flip_rng.uniform() < params.protected_noise) {
            const int r = static_cast<int>(flip_rng.uniform_index(static_cast<std::uint64_t>(k - 1)));
            value = r < value ? r : r + 1;
        }
        out.features(v, n_f - 1) = static_cast<double>(value);
    }
    out.feature_mask.assign(static_cast<size_t>(n_f), 0);
    for (int d = 0; d < n_i; ++d) out.feature_mask[static_cast<size_t>(d)] = 1;
    out.protected_index = n_f - 1;
    return out;
}

Matrix optimize_homophily(const Graph& g, const Matrix& features,
                          const std::vector<int>& labels, double eta,
                          const std::vector<int>& movable_cols, const OptimizerConfig& cfg,
                          Rng& rng) {
    if (eta == 0.0) return features;
    const int n = g.num_nodes();
    const int dim = features.cols();
    const size_t cap = static_cast<size_t>(cfg.max_pairs);

    std::vector<std::pair<int, int>> same_conn, diff_conn, diff_disc;
    for (const auto& [u, w] : g.edges()) {
        if (labels[static_cast<size_t>(u)] == labels[static_cast<size_t>(w)]) {
            same_conn.emplace_back(u, w);
        } else {
            diff_conn.emplace_back(u, w);
        }
    }
    auto truncate = [&](std::vector<std::pair<int, int>>& pairs) {
        if (pairs.size() > cap) {
            rng.partial_shuffle(pairs, cap);
            pairs.resize(cap);
        }
    };
    truncate(same_conn);
    truncate(diff_conn);
    const std::uint64_t max_attempts = 1000ull * cfg.max_pairs;
    for (std::uint64_t attempt = 0; diff_disc.size() < cap && attempt < max_attempts; ++attempt) {
        const int u = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        const int w = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        if (u == w || labels[static_cast<size_t>(u)] == labels[static_cast<size_t>(w)]) continue;
        if (g.has_edge(u, w)) continue;
        diff_disc.emplace_back(u, w);
    }

    Matrix x = features;
    Matrix grad(n, dim);
    constexpr double kEps = 1e-12;
    auto accumulate = [&](const std::vector<std::pair<int, int>>& pairs, double coef) {
        if (pairs.empty()) return;
        // per-pair unit weight: the mean-normalized gradient would move
        // features by ~1e-4 over the whole run and no homophily pattern
        // would emerge; the cosine gradient is orthogonal to the feature
        // vector, so the larger steps rotate without inflating norms
        const double c = coef;
        for (const auto& [u, w] : pairs) {
            auto xu = x.row(u), xw = x.row(w);
            double dot = 0.0, nu2 = 0.0, nw2 = 0.0;
            for (int d = 0; d < dim; ++d) {
                dot += xu[static_cast<size_t>(d)] * xw[static_cast<size_t>(d)];
                nu2 += xu[static_cast<size_t>(d)] * xu[static_cast<size_t>(d)];
                nw2 += xw[static_cast<size_t>(d)] * xw[static_cast<size_t>(d)];
            }
            const double nu = std::sqrt(nu2) + kEps;
            const double nw = std::sqrt(nw2) + kEps;
            const double sim = dot / (nu * nw);
            for (int d = 0; d < dim; ++d) {
                grad(u, d) += c * (xw[static_cast<size_t>(d)] / (nu * nw) -
                                   sim * xu[static_cast<size_t>(d)] / (nu * nu));
                grad(w, d) += c * (xu[static_cast<size_t>(d)] / (nu * nw) -
                                   sim * xw[static_cast<size_t>(d)] / (nw * nw));
            }
        }
    };

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        std::fill(grad.flat().begin(), grad.flat().end(), 0.0);
        accumulate(same_conn, -eta);   // eta > 0 pulls same-label neighbors together
        accumulate(diff_disc, eta);    // and pushes different-label pairs apart
        accumulate(diff_conn, eta);
        for (int col : movable_cols) {
            for (int v = 0; v < n; ++v) x(v, col) -= cfg.learning_rate * grad(v, col);
        }
    }
    return x;
}

Dataset generate(const ShapeGGenParams& params) {
    validate(params);
    SeedSplitter seeds(params.seed);

    Rng structure_rng = seeds.stream("structure");
    StructureResult sr = generate_structure(params, structure_rng);
    const std::vector<int> labels = assign_labels(sr.graph, sr.motifs, params.num_classes);

    Rng feature_rng = seeds.stream("features");
    Rng flip_rng = seeds.stream("flip");
    FeatureResult fr = generate_node_features(labels, params, feature_rng, flip_rng);

    Matrix x = std::move(fr.features);
    if (params.homophily != 0.0) {
        std::vector<int> movable;  // redundant columns only
        for (int d = params.num_informative; d < params.num_features - 1; ++d) movable.push_back(d);
        Rng opt_rng = seeds.stream("optimizer");
        x = optimize_homophily(sr.graph, x, labels, params.homophily, movable, OptimizerConfig{},
                               opt_rng);
    }

    Dataset ds;
    ds.graph = Graph(sr.graph.num_nodes(), sr.graph.edges(), std::move(x));
    ds.labels = labels;
    ds.num_classes = params.num_classes;
    ds.num_layers = params.model_layers;
    ds.motifs = std::move(sr.motifs);
    ds.node_motifs = compute_node_motifs(ds.graph, ds.motifs, ds.num_layers);
    ds.feature_mask = std::move(fr.feature_mask);
    ds.protected_index = fr.protected_index;
    Rng split_rng = seeds.stream("split");
    ds.split = stratified_split(ds.labels, ds.num_classes, 0.70, 0.05, split_rng);
    ds.generator = "shapeggen";
    ds.params_json = params_to_json(params);
    ds.seed = params.seed;
    return ds;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"sg-base",   "sg-heterophilic", "sg-smallex",
                                                   "sg-unfair", "sg-moreinform",   "sg-lessinform"};
    return names;
}

ShapeGGenParams preset(const std::string& name) {
    std::string key;
    key.reserve(name.size());
    for (char c : name) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

    ShapeGGenParams base;  // defaults are sg-base
    if (key == "sg-base") return base;
    if (key == "sg-heterophilic") {
        base.homophily = -1.0;
        return base;
    }
    if (key == "sg-smallex") {
        base.motif = "triangle";
        base.num_subgraphs = 1300;
        base.subgraph_size = 12;
        base.class_sep = 0.5;
        return base;
    }
    if (key == "sg-unfair") {
        base.protected_noise = 0.75;
        return base;
    }
    if (key == "sg-moreinform") {
        base.num_informative = 8;
        return base;
    }
    if (key == "sg-lessinform") {
        base.num_features = 21;
        base.num_informative = 4;
        return base;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

std::string params_to_json(const ShapeGGenParams& p) {
    nlohmann::json j;
    j["motif"] = p.motif;
    if (p.motif == "custom") {
        auto arr = nlohmann::json::array();
        for (const auto& [a, b] : p.custom_motif_edges) arr.push_back({a, b});
        j["custom_motif_edges"] = arr;
    }
    j["num_subgraphs"] = p.num_subgraphs;
    j["connection_prob"] = p.connection_prob;
    j["subgraph_size"] = p.subgraph_size;
    j["num_classes"] = p.num_classes;
    j["num_features"] = p.num_features;
    j["num_informative"] = p.num_informative;
    j["class_sep"] = p.class_sep;
    j["clusters_per_class"] = p.clusters_per_class;
    j["protected_noise"] = p.protected_noise;
    j["homophily"] = p.homophily;
    j["model_layers"] = p.model_layers;
    j["seed"] = p.seed;
    return j.dump();
}

ShapeGGenParams params_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ShapeGGenParams p;
    p.motif = j.value("motif", p.motif);
    if (j.contains("custom_motif_edges")) {
        for (const auto& e : j.at("custom_motif_edges")) {
            p.custom_motif_edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        }
    }
    p.num_subgraphs = j.value("num_subgraphs", p.num_subgraphs);
    p.connection_prob = j.value("connection_prob", p.connection_prob);
    p.subgraph_size = j.value("subgraph_size", p.subgraph_size);
    p.num_classes = j.value("num_classes", p.num_classes);
    p.num_features = j.value("num_features", p.num_features);
    p.num_informative = j.value("num_informative", p.num_informative);
    p.class_sep = j.value("class_sep", p.class_sep);
    p.clusters_per_class = j.value("clusters_per_class", p.clusters_per_class);
    p.protected_noise = j.value("protected_noise", p.protected_noise);
    p.homophily = j.value("homophily", p.homophily);
    p.model_layers = j.value("model_layers", p.model_layers);
    p.seed = j.value("seed", p.seed);
    return p;
}

}  // namespace xgb
