#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <vector>

#include "xgraphbench/shapeggen.hpp"

using namespace xgb;

namespace {

ShapeGGenParams small_params() {
    ShapeGGenParams p;
    p.num_subgraphs = 60;
    p.connection_prob = 0.05;
    p.subgraph_size = 9;
    p.num_features = 8;
    p.num_informative = 3;
    p.seed = 21;
    return p;
}

// permutation-based isomorphism check for tiny motifs (degree sequences lie;
// e.g. the complete bipartite 2x3 graph shares the house's)
bool isomorphic(const std::vector<int>& nodes, std::vector<Edge> edges,
                const std::vector<Edge>& shape, int shape_n) {
    if (static_cast<int>(nodes.size()) != shape_n) return false;
    std::vector<int> perm(static_cast<size_t>(shape_n));
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(edges.begin(), edges.end());
    do {
        std::vector<Edge> mapped;
        for (const auto& [a, b] : shape) {
            const int u = nodes[static_cast<size_t>(perm[static_cast<size_t>(a)])];
            const int v = nodes[static_cast<size_t>(perm[static_cast<size_t>(b)])];
            mapped.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::sort(mapped.begin(), mapped.end());
        if (mapped == edges) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// independent recount of motifs within the closed 1-hop neighborhood
int one_hop_motif_count(const Graph& g, const std::vector<MotifInstance>& motifs, int v) {
    std::set<int> close(g.neighbors(v).begin(), g.neighbors(v).end());
    close.insert(v);
    int count = 0;
    for (const auto& m : motifs) {
        const bool hit = std::any_of(m.nodes.begin(), m.nodes.end(),
                                     [&](int u) { return close.count(u) > 0; });
        count += hit ? 1 : 0;
    }
    return count;
}

}  // namespace

TEST_CASE("validate rejects out-of-range parameters") {
    CHECK_NOTHROW(validate(ShapeGGenParams{}));
    auto bad = ShapeGGenParams{};
    bad.num_subgraphs = 0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = ShapeGGenParams{};
    bad.connection_prob = 1.5;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = ShapeGGenParams{};
    bad.num_informative = bad.num_features;  // no room for the protected column
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = ShapeGGenParams{};
    bad.motif = "dodecahedron";
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = ShapeGGenParams{};
    bad.motif = "custom";
    bad.custom_motif_edges = {{0, 1}, {2, 3}};  // disconnected
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad.custom_motif_edges = {{0, 1}, {1, 2}};
    CHECK_NOTHROW(validate(bad));
}

TEST_CASE("motif library matches the named shapes") {
    ShapeGGenParams p;
    p.motif = "house";
    const auto house = motif_edges(p);
    CHECK(house.size() == 6);
    CHECK(house == std::vector<Edge>{{0, 1}, {0, 3}, {0, 4}, {1, 2}, {1, 4}, {2, 3}});
    p.motif = "triangle";
    const auto tri = motif_edges(p);
    CHECK(tri == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("structure plants intact motifs and keeps one component") {
    auto p = small_params();
    Rng rng(SeedSplitter(p.seed).derive("structure"));
    const StructureResult sr = generate_structure(p, rng);
    const Graph& g = sr.graph;
    CHECK(g.num_nodes() > 5 * p.num_subgraphs / 2);
    CHECK_FALSE(sr.motifs.empty());

    const auto shape = motif_edges(p);
    for (const auto& m : sr.motifs) {
        REQUIRE(m.nodes.size() == 5);
        CHECK(std::is_sorted(m.nodes.begin(), m.nodes.end()));
        CHECK(isomorphic(m.nodes, m.edges, shape, 5));
        for (const auto& [a, b] : m.edges) CHECK(g.has_edge(a, b));
    }

    // connectivity: BFS from 0 reaches everything
    std::vector<char> seen(static_cast<size_t>(g.num_nodes()), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int w : g.neighbors(u)) {
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                ++reached;
                q.push(w);
            }
        }
    }
    CHECK(reached == g.num_nodes());
}

TEST_CASE("labels equal the recounted 1-hop motif tally minus one") {
    auto p = small_params();
    Rng rng(SeedSplitter(p.seed).derive("structure"));
    const StructureResult sr = generate_structure(p, rng);
    const auto labels = assign_labels(sr.graph, sr.motifs, p.num_classes);
    REQUIRE(static_cast<int>(labels.size()) == sr.graph.num_nodes());
    for (int v = 0; v < sr.graph.num_nodes(); ++v) {
        const int count = one_hop_motif_count(sr.graph, sr.motifs, v);
        REQUIRE(count >= 1);
        REQUIRE(count <= p.num_classes);
        CHECK(labels[static_cast<size_t>(v)] == count - 1);
    }
}

TEST_CASE("informative columns separate the classes, noise columns do not") {
    // one cluster per class puts each class mean on its own hypercube corner,
    // so a nearest-class-mean probe has a clean analytic success rate
    ShapeGGenParams p = small_params();
    p.clusters_per_class = 1;
    p.class_sep = 2.0;
    const int n = 3000;
    std::vector<int> labels(n);
    for (int v = 0; v < n; ++v) labels[static_cast<size_t>(v)] = v % p.num_classes;

    Rng feature_rng(SeedSplitter(p.seed).derive("features"));
    Rng flip_rng(SeedSplitter(p.seed).derive("flips"));
    const FeatureResult fr = generate_node_features(labels, p, feature_rng, flip_rng);
    REQUIRE(fr.features.rows() == n);
    REQUIRE(fr.features.cols() == p.num_features);
    REQUIRE(static_cast<int>(fr.feature_mask.size()) == p.num_features);
    for (int col = 0; col < p.num_features; ++col) {
        CHECK(fr.feature_mask[static_cast<size_t>(col)] == (col < p.num_informative ? 1 : 0));
    }
    CHECK(fr.protected_index == p.num_features - 1);

    const Matrix& x = fr.features;
    auto block_accuracy = [&](int from, int to) {
        std::vector<double> m0(static_cast<size_t>(to - from), 0.0), m1 = m0;
        int n0 = 0, n1 = 0;
        for (int v = 0; v < n; ++v) {
            auto& m = labels[static_cast<size_t>(v)] == 0 ? m0 : m1;
            (labels[static_cast<size_t>(v)] == 0 ? n0 : n1)++;
            for (int c = from; c < to; ++c) m[static_cast<size_t>(c - from)] += x(v, c);
        }
        for (auto& t : m0) t /= n0;
        for (auto& t : m1) t /= n1;
        int right = 0;
        for (int v = 0; v < n; ++v) {
            double d0 = 0.0, d1 = 0.0;
            for (int c = from; c < to; ++c) {
                const double z = x(v, c);
                d0 += (z - m0[static_cast<size_t>(c - from)]) * (z - m0[static_cast<size_t>(c - from)]);
                d1 += (z - m1[static_cast<size_t>(c - from)]) * (z - m1[static_cast<size_t>(c - from)]);
            }
            const int pred = d0 <= d1 ? 0 : 1;
            right += pred == labels[static_cast<size_t>(v)] ? 1 : 0;
        }
        return static_cast<double>(right) / n;
    };
    // corners differ by >= 2 * class_sep in some dimension: error <= Phi(-2)
    const double informative_acc = block_accuracy(0, p.num_informative);
    CHECK(informative_acc > 0.85);
    // untouched noise columns carry nothing
    const double noise_acc = block_accuracy(p.num_informative, p.num_features - 1);
    CHECK(noise_acc < 0.62);
    CHECK(informative_acc > noise_acc + 0.25);

    // the noise block really is standard normal
    double mean = 0.0, var = 0.0;
    int count = 0;
    for (int v = 0; v < n; ++v) {
        for (int c = p.num_informative; c < p.num_features - 1; ++c) {
            mean += x(v, c);
            ++count;
        }
    }
    mean /= count;
    for (int v = 0; v < n; ++v) {
        for (int c = p.num_informative; c < p.num_features - 1; ++c) {
            var += (x(v, c) - mean) * (x(v, c) - mean);
        }
    }
    var /= count - 1;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("protected column is the label with noise-rate flips") {
    auto p = small_params();
    p.num_subgraphs = 300;  // more nodes for a tighter rate estimate
    p.protected_noise = 0.3;
    p.homophily = 0.0;
    const Dataset ds = generate(p);
    REQUIRE(ds.protected_index == p.num_features - 1);
    const Matrix& x = ds.graph.features();
    int flips = 0, n = ds.graph.num_nodes();
    for (int v = 0; v < n; ++v) {
        const int val = static_cast<int>(std::lround(x(v, ds.protected_index)));
        CHECK(val >= 0);
        CHECK(val < ds.num_classes);
        flips += val != ds.labels[static_cast<size_t>(v)] ? 1 : 0;
    }
    // with K=2 every flip lands on the other label
    CHECK(static_cast<double>(flips) / n == doctest::Approx(0.3).epsilon(0.15));
}

TEST_CASE("homophily pass moves only redundant columns, in the right direction") {
    auto p = small_params();
    p.homophily = 0.0;
    const Dataset flat = generate(p);
    p.homophily = 1.0;
    const Dataset homo = generate(p);
    p.homophily = -1.0;
    const Dataset hetero = generate(p);

    const Matrix& xf = flat.graph.features();
    const Matrix& xh = homo.graph.features();
    // informative and protected columns are bit-identical to the unoptimized run
    for (int v = 0; v < flat.graph.num_nodes(); ++v) {
        for (int c = 0; c < p.num_informative; ++c) CHECK(xf(v, c) == xh(v, c));
        CHECK(xf(v, p.num_features - 1) == xh(v, p.num_features - 1));
    }

    auto same_label_sim = [](const Dataset& ds) {
        const Matrix& x = ds.graph.features();
        double total = 0.0;
        int cnt = 0;
        for (const auto& [u, w] : ds.graph.edges()) {
            if (ds.labels[static_cast<size_t>(u)] != ds.labels[static_cast<size_t>(w)]) continue;
            double dot = 0.0, nu = 0.0, nw = 0.0;
            for (int c = 0; c < x.cols(); ++c) {
                dot += x(u, c) * x(w, c);
                nu += x(u, c) * x(u, c);
                nw += x(w, c) * x(w, c);
            }
            total += dot / (std::sqrt(nu) * std::sqrt(nw) + 1e-12);
            ++cnt;
        }
        return total / cnt;
    };
    const double s_flat = same_label_sim(flat);
    const double s_homo = same_label_sim(homo);
    const double s_hetero = same_label_sim(hetero);
    CHECK(s_homo > s_flat);
    CHECK(s_homo > s_hetero);
}

TEST_CASE("eta zero leaves features untouched") {
    auto p = small_params();
    p.homophily = 0.0;
    Rng opt(3);
    const Dataset ds = generate(p);
    const auto before = ds.graph.features();
    const auto after = optimize_homophily(ds.graph, before, ds.labels, 0.0, {4, 5}, {}, opt);
    CHECK(after == before);
}

TEST_CASE("presets carry the documented parameterizations") {
    CHECK(preset_names().size() == 6);
    const auto base = preset("sg-base");
    CHECK(base.motif == "house");
    CHECK(base.num_subgraphs == 1200);
    CHECK(base.connection_prob == 0.006);
    CHECK(base.subgraph_size == 11);
    CHECK(base.num_features == 11);
    CHECK(base.num_informative == 4);
    CHECK(base.class_sep == 0.6);
    CHECK(base.clusters_per_class == 2);
    CHECK(base.protected_noise == 0.5);
    CHECK(base.homophily == 1.0);
    CHECK(base.model_layers == 3);

    CHECK(preset("sg-heterophilic").homophily == -1.0);
    const auto smallex = preset("sg-smallex");
    CHECK(smallex.motif == "triangle");
    CHECK(smallex.num_subgraphs == 1300);
    CHECK(smallex.subgraph_size == 12);
    CHECK(smallex.class_sep == 0.5);
    CHECK(preset("sg-unfair").protected_noise == 0.75);
    CHECK(preset("sg-moreinform").num_informative == 8);
    CHECK(preset("sg-lessinform").num_features == 21);
    CHECK_THROWS_AS(preset("sg-nope"), std::invalid_argument);
}

TEST_CASE("parameter json round-trips") {
    auto p = small_params();
    p.motif = "custom";
    p.custom_motif_edges = {{0, 1}, {1, 2}, {0, 2}};
    p.homophily = -0.5;
    const auto q = params_from_json(params_to_json(p));
    CHECK(q.motif == p.motif);
    CHECK(q.custom_motif_edges == p.custom_motif_edges);
    CHECK(q.num_subgraphs == p.num_subgraphs);
    CHECK(q.connection_prob == p.connection_prob);
    CHECK(q.subgraph_size == p.subgraph_size);
    CHECK(q.num_classes == p.num_classes);
    CHECK(q.num_features == p.num_features);
    CHECK(q.num_informative == p.num_informative);
    CHECK(q.class_sep == p.class_sep);
    CHECK(q.clusters_per_class == p.clusters_per_class);
    CHECK(q.protected_noise == p.protected_noise);
    CHECK(q.homophily == p.homophily);
    CHECK(q.model_layers == p.model_layers);
    CHECK(q.seed == p.seed);
}

TEST_CASE("generation is deterministic in the seed") {
    auto p = small_params();
    const Dataset a = generate(p);
    const Dataset b = generate(p);
    CHECK(a.graph.num_nodes() == b.graph.num_nodes());
    CHECK(a.graph.edges() == b.graph.edges());
    CHECK(a.graph.features() == b.graph.features());
    CHECK(a.labels == b.labels);
    CHECK(a.split.train == b.split.train);
    p.seed = 22;
    const Dataset c = generate(p);
    CHECK(a.graph.edges() != c.graph.edges());
}
