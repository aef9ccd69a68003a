#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "xgraphbench/dataset.hpp"
#include "xgraphbench/rng.hpp"

using namespace xgb;

namespace {

// house (0..4) bridged to a triangle (5..7) through a chain 4-8, 8-5
Dataset tiny_dataset() {
    GraphBuilder b(9);
    b.add_edge(0, 1);
    b.add_edge(1, 2);
    b.add_edge(2, 3);
    b.add_edge(0, 3);
    b.add_edge(0, 4);
    b.add_edge(1, 4);
    b.add_edge(5, 6);
    b.add_edge(6, 7);
    b.add_edge(5, 7);
    b.add_edge(4, 8);
    b.add_edge(8, 5);
    Matrix x(9, 3, 1.0);

    Dataset ds;
    ds.graph = b.build(x);
    ds.labels = {0, 0, 0, 0, 0, 1, 1, 1, 1};
    ds.num_classes = 2;
    ds.num_layers = 2;
    MotifInstance house;
    house.id = 0;
    house.nodes = {0, 1, 2, 3, 4};
    house.edges = {{0, 1}, {0, 3}, {0, 4}, {1, 2}, {1, 4}, {2, 3}};
    MotifInstance tri;
    tri.id = 1;
    tri.nodes = {5, 6, 7};
    tri.edges = {{5, 6}, {5, 7}, {6, 7}};
    ds.motifs = {house, tri};
    ds.node_motifs = compute_node_motifs(ds.graph, ds.motifs, ds.num_layers);
    ds.feature_mask = {1, 1, 0};
    return ds;
}

}  // namespace

TEST_CASE("stratified_split covers each class proportionally and exactly once") {
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) labels.push_back(i < 40 ? 0 : 1);
    Rng rng(9);
    const Split s = stratified_split(labels, 2, 0.70, 0.05, rng);

    std::vector<int> all;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
        CHECK(std::is_sorted(part->begin(), part->end()));
        all.insert(all.end(), part->begin(), part->end());
    }
    std::sort(all.begin(), all.end());
    std::vector<int> everyone(100);
    std::iota(everyone.begin(), everyone.end(), 0);
    CHECK(all == everyone);  // disjoint and complete

    auto count_class = [&](const std::vector<int>& part, int c) {
        return std::count_if(part.begin(), part.end(), [&](int v) { return labels[static_cast<size_t>(v)] == c; });
    };
    CHECK(count_class(s.train, 0) == 28);  // 70% of 40
    CHECK(count_class(s.val, 0) == 2);     // 5% of 40
    CHECK(count_class(s.test, 0) == 10);
    CHECK(count_class(s.train, 1) == 42);
    CHECK(count_class(s.val, 1) == 3);
    CHECK(count_class(s.test, 1) == 15);

    Rng rng2(9);
    const Split again = stratified_split(labels, 2, 0.70, 0.05, rng2);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);
}

TEST_CASE("compute_node_motifs matches hop distances from each motif") {
    const Dataset ds = tiny_dataset();
    // node 8 sits within 2 hops of both shapes
    CHECK(ds.node_motifs[8] == std::vector<int>{0, 1});
    // deep house corner 2: two hops reach {0,1,3,4}, all house-only
    CHECK(ds.node_motifs[2] == std::vector<int>{0});
    // triangle node 6 reaches node 8's neighbor 5 but not the house
    CHECK(ds.node_motifs[6] == std::vector<int>{1});
    // house node 4 reaches 8 then 5, which belongs to the triangle
    CHECK(ds.node_motifs[4] == std::vector<int>{0, 1});

    // radius-0: only nodes inside a motif see it
    const auto zero = compute_node_motifs(ds.graph, ds.motifs, 0);
    CHECK(zero[0] == std::vector<int>{0});
    CHECK(zero[8].empty());
}

TEST_CASE("ground truth marks motif nodes, intra-motif edges, and the spokes to v") {
    const Dataset ds = tiny_dataset();
    const Subgraph sub = enclosing_subgraph(ds, 8);
    const auto gt = ground_truth_for(ds, 8, sub);
    REQUIRE(gt.size() == 2);

    for (const auto& e : gt) {
        CHECK(e.hard);
        CHECK(e.center == 8);
        CHECK(e.feature_mask == std::vector<double>{1.0, 1.0, 0.0});
        REQUIRE(e.node_mask.size() == static_cast<size_t>(sub.num_nodes()));
        REQUIRE(e.edge_mask.size() == static_cast<size_t>(sub.num_edges()));
    }

    // first mask is the house's: marked nodes are exactly the house members in range
    for (int i = 0; i < sub.num_nodes(); ++i) {
        const int g = sub.global_of(i);
        CHECK(gt[0].node_mask[static_cast<size_t>(i)] == (ds.motifs[0].contains(g) ? 1.0 : 0.0));
        CHECK(gt[1].node_mask[static_cast<size_t>(i)] == (ds.motifs[1].contains(g) ? 1.0 : 0.0));
    }
    // an edge is kept iff both endpoints are motif nodes or the explained node;
    // 4-8 has one house end and v itself, 8-5 is v plus a triangle node
    for (int e = 0; e < sub.num_edges(); ++e) {
        const auto [a, b] = sub.edges[static_cast<size_t>(e)];
        const int ga = sub.global_of(a), gb = sub.global_of(b);
        auto in0 = [&](int u) { return ds.motifs[0].contains(u) || u == 8; };
        auto in1 = [&](int u) { return ds.motifs[1].contains(u) || u == 8; };
        CHECK(gt[0].edge_mask[static_cast<size_t>(e)] == ((in0(ga) && in0(gb)) ? 1.0 : 0.0));
        CHECK(gt[1].edge_mask[static_cast<size_t>(e)] == ((in1(ga) && in1(gb)) ? 1.0 : 0.0));
    }
    const int e48 = static_cast<int>(std::find(sub.edges.begin(), sub.edges.end(),
                                               Edge{sub.local_of(4), sub.local_of(8)}) -
                                     sub.edges.begin());
    REQUIRE(e48 < sub.num_edges());
    CHECK(gt[0].edge_mask[static_cast<size_t>(e48)] == 1.0);
    CHECK(gt[1].edge_mask[static_cast<size_t>(e48)] == 0.0);
}

TEST_CASE("nodes with no motif in reach get one all-zero ground-truth mask") {
    Dataset ds = tiny_dataset();
    ds.num_layers = 1;
    ds.node_motifs = compute_node_motifs(ds.graph, ds.motifs, 1);
    // make node 8 motif-free by pretending motifs sit elsewhere
    ds.motifs[0].nodes = {0, 1, 2};
    ds.motifs[1].nodes = {2, 3};
    ds.node_motifs[8].clear();
    const Subgraph sub = enclosing_subgraph(ds, 8);
    const auto gt = ground_truth_for(ds, 8, sub);
    REQUIRE(gt.size() == 1);
    CHECK(gt[0].hard);
    for (double m : gt[0].node_mask) CHECK(m == 0.0);
    for (double m : gt[0].edge_mask) CHECK(m == 0.0);
}

TEST_CASE("enclosing_subgraph honors the dataset receptive field") {
    Dataset ds = tiny_dataset();
    const Subgraph two = enclosing_subgraph(ds, 2);
    CHECK(two.nodes == std::vector<int>{0, 1, 2, 3, 4});
    ds.num_layers = 3;
    const Subgraph three = enclosing_subgraph(ds, 2);
    CHECK(three.nodes == std::vector<int>{0, 1, 2, 3, 4, 8});
}
