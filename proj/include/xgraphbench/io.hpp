#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xgraphbench/dataset.hpp"
#include "xgraphbench/graph.hpp"

namespace xgb {

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double x);

// FNV-1a over a file's bytes, as a fixed-width hex string.
std::string file_checksum(const std::string& path);

// Dataset bundle directory: manifest.json (format "xgraphbench-v1", params,
// checksums) plus edges.csv, features.csv, labels.csv, masks.jsonl,
// motifs.json, split.json. Loading verifies the version and every checksum.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

// Explanations as JSON lines, one record per node (soft scores).
void save_explanations(const std::vector<Explanation>& explanations, const std::string& path);
std::vector<Explanation> load_explanations(const std::string& path);

struct MetricRow {
    int node = -1;
    std::string metric;
    std::string mask_kind;
    double value = 0.0;
    int n_samples = 1;
    std::uint64_t seed = 0;
};

// CSV with header node_id,metric,mask_kind,value,n_samples,seed followed by
// mean and stderr summary rows per (metric, mask_kind) group.
void write_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path);

// Sub(v; num_layers) in DOT form; node/edge attributes carry the
// explanation's scores and the center node is flagged.
void export_dot(const Dataset& ds, int v, const Explanation& expl, const std::string& path);

// CSV degree,count with degrees ascending.
void write_degree_histogram(const Graph& g, const std::string& path);

}  // namespace xgb
