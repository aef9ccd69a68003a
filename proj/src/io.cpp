#include "xgraphbench/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "xgraphbench/rng.hpp"

namespace xgb {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s) {
    double out = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("bad numeric field: '" + std::string(s) + "'");
    }
    return out;
}

int parse_int(std::string_view s) {
    int out = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("bad integer field: '" + std::string(s) + "'");
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("missing file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> non_empty_lines(std::string_view text) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (start < text.size()) {
        size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        if (pos > start) out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

const char* const kBundleFiles[] = {"edges.csv",  "features.csv", "labels.csv",
                                    "masks.jsonl", "motifs.json",  "split.json"};

}  // namespace

std::string file_checksum(const std::string& path) {
    const std::string bytes = read_file(path);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return std::string(buf);
}

void save_dataset(const Dataset& ds, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path root(dir);

    {
        std::ostringstream out;
        for (const auto& [u, v] : ds.graph.edges()) out << u << ',' << v << '\n';
        write_file((root / "edges.csv").string(), out.str());
    }
    {
        std::ostringstream out;
        const Matrix& x = ds.graph.features();
        for (int i = 0; i < x.rows(); ++i) {
            for (int j = 0; j < x.cols(); ++j) {
                if (j > 0) out << ',';
                out << format_double(x(i, j));
            }
            out << '\n';
        }
        write_file((root / "features.csv").string(), out.str());
    }
    {
        std::ostringstream out;
        for (int y : ds.labels) out << y << '\n';
        write_file((root / "labels.csv").string(), out.str());
    }
    {
        std::ostringstream out;
        for (size_t v = 0; v < ds.node_motifs.size(); ++v) {
            nlohmann::json j;
            j["v"] = v;
            j["motifs"] = ds.node_motifs[v];
            out << j.dump() << '\n';
        }
        write_file((root / "masks.jsonl").string(), out.str());
    }
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& m : ds.motifs) {
            nlohmann::json j;
            j["id"] = m.id;
            j["nodes"] = m.nodes;
            auto edges = nlohmann::json::array();
            for (const auto& [a, b] : m.edges) edges.push_back({a, b});
            j["edges"] = std::move(edges);
            arr.push_back(std::move(j));
        }
        write_file((root / "motifs.json").string(), arr.dump(2) + "\n");
    }
    {
        nlohmann::json j;
        j["train"] = ds.split.train;
        j["val"] = ds.split.val;
        j["test"] = ds.split.test;
        write_file((root / "split.json").string(), j.dump(2) + "\n");
    }

    nlohmann::json manifest;
    manifest["format"] = "xgraphbench-v1";
    manifest["generator"] = ds.generator;
    manifest["params"] = nlohmann::json::parse(ds.params_json);
    manifest["seed"] = ds.seed;
    manifest["num_nodes"] = ds.graph.num_nodes();
    manifest["num_features"] = ds.num_features();
    manifest["num_classes"] = ds.num_classes;
    manifest["num_layers"] = ds.num_layers;
    manifest["protected_index"] = ds.protected_index;
    manifest["feature_mask"] = ds.feature_mask;
    nlohmann::json sums = nlohmann::json::object();
    for (const char* name : kBundleFiles) sums[name] = file_checksum((root / name).string());
    manifest["checksums"] = std::move(sums);
    write_file((root / "manifest.json").string(), manifest.dump(2) + "\n");
}

Dataset load_dataset(const std::string& dir) {
    const fs::path root(dir);
    const nlohmann::json manifest =
        nlohmann::json::parse(read_file((root / "manifest.json").string()));
    const std::string format = manifest.value("format", "");
    if (format != "xgraphbench-v1") {
        throw std::runtime_error("unsupported bundle format '" + format + "' in " + dir);
    }
    const auto& sums = manifest.at("checksums");
    for (const char* name : kBundleFiles) {
        const std::string expected = sums.at(name).get<std::string>();
        const std::string actual = file_checksum((root / name).string());
        if (expected != actual) {
            throw std::runtime_error(std::string("checksum mismatch for ") + name + " in " + dir);
        }
    }

    Dataset ds;
    ds.generator = manifest.value("generator", "");
    ds.params_json = manifest.at("params").dump();
    ds.seed = manifest.at("seed").get<std::uint64_t>();
    ds.num_classes = manifest.at("num_classes").get<int>();
    ds.num_layers = manifest.at("num_layers").get<int>();
    ds.protected_index = manifest.at("protected_index").get<int>();
    ds.feature_mask = manifest.at("feature_mask").get<std::vector<int>>();
    const int n = manifest.at("num_nodes").get<int>();
    const int n_f = manifest.at("num_features").get<int>();

    std::vector<Edge> edges;
    const std::string edges_text = read_file((root / "edges.csv").string());
    for (auto line : non_empty_lines(edges_text)) {
        const auto parts = split(line, ',');
        if (parts.size() != 2) throw std::runtime_error("corrupt edges.csv line");
        edges.emplace_back(parse_int(parts[0]), parse_int(parts[1]));
    }

    Matrix x(n, n_f);
    {
        const std::string text = read_file((root / "features.csv").string());
        const auto lines = non_empty_lines(text);
        if (static_cast<int>(lines.size()) != n) {
            throw std::runtime_error("features.csv row count does not match manifest");
        }
        for (int i = 0; i < n; ++i) {
            const auto parts = split(lines[static_cast<size_t>(i)], ',');
            if (static_cast<int>(parts.size()) != n_f) {
                throw std::runtime_error("features.csv column count does not match manifest");
            }
            for (int j = 0; j < n_f; ++j) x(i, j) = parse_double(parts[static_cast<size_t>(j)]);
        }
    }
    ds.graph = Graph(n, std::move(edges), std::move(x));

    const std::string labels_text = read_file((root / "labels.csv").string());
    for (auto line : non_empty_lines(labels_text)) {
        ds.labels.push_back(parse_int(line));
    }
    if (static_cast<int>(ds.labels.size()) != n) {
        throw std::runtime_error("labels.csv row count does not match manifest");
    }

    for (const auto& j : nlohmann::json::parse(read_file((root / "motifs.json").string()))) {
        MotifInstance m;
        m.id = j.at("id").get<int>();
        m.nodes = j.at("nodes").get<std::vector<int>>();
        for (const auto& e : j.at("edges")) {
            m.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        }
        ds.motifs.push_back(std::move(m));
    }

    ds.node_motifs.assign(static_cast<size_t>(n), {});
    const std::string masks_text = read_file((root / "masks.jsonl").string());
    for (auto line : non_empty_lines(masks_text)) {
        const auto j = nlohmann::json::parse(line);
        const int v = j.at("v").get<int>();
        if (v < 0 || v >= n) throw std::runtime_error("masks.jsonl references unknown node");
        ds.node_motifs[static_cast<size_t>(v)] = j.at("motifs").get<std::vector<int>>();
    }

    const auto j = nlohmann::json::parse(read_file((root / "split.json").string()));
    ds.split.train = j.at("train").get<std::vector<int>>();
    ds.split.val = j.at("val").get<std::vector<int>>();
    ds.split.test = j.at("test").get<std::vector<int>>();
    return ds;
}

void save_explanations(const std::vector<Explanation>& explanations, const std::string& path) {
    std::ostringstream out;
    for (const auto& e : explanations) {
        nlohmann::json j;
        j["v"] = e.center;
        j["hard"] = e.hard;
        j["node_scores"] = e.node_mask;
        j["edge_scores"] = e.edge_mask;
        j["feature_scores"] = e.feature_mask;
        out << j.dump() << '\n';
    }
    write_file(path, out.str());
}

std::vector<Explanation> load_explanations(const std::string& path) {
    std::vector<Explanation> out;
    const std::string text = read_file(path);
    for (auto line : non_empty_lines(text)) {
        const auto j = nlohmann::json::parse(line);
        Explanation e;
        e.center = j.at("v").get<int>();
        e.hard = j.value("hard", false);
        e.node_mask = j.at("node_scores").get<std::vector<double>>();
        e.edge_mask = j.at("edge_scores").get<std::vector<double>>();
        e.feature_mask = j.at("feature_scores").get<std::vector<double>>();
        out.push_back(std::move(e));
    }
    return out;
}

void write_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "node_id,metric,mask_kind,value,n_samples,seed\n";
    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const auto& r : rows) {
        out << r.node << ',' << r.metric << ',' << r.mask_kind << ',' << format_double(r.value)
            << ',' << r.n_samples << ',' << r.seed << '\n';
        groups[{r.metric, r.mask_kind}].push_back(r.value);
    }
    for (const auto& [key, values] : groups) {
        const double n = static_cast<double>(values.size());
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        const double stderr_ = values.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
        out << "mean," << key.first << ',' << key.second << ',' << format_double(mean) << ','
            << values.size() << ",0\n";
        out << "stderr," << key.first << ',' << key.second << ',' << format_double(stderr_)
            << ',' << values.size() << ",0\n";
    }
    write_file(path, out.str());
}

void export_dot(const Dataset& ds, int v, const Explanation& expl, const std::string& path) {
    if (v < 0 || v >= ds.graph.num_nodes()) throw std::invalid_argument("export_dot: bad node");
    const Subgraph sub = enclosing_subgraph(ds, v);
    if (expl.node_mask.size() != static_cast<size_t>(sub.num_nodes()) ||
        expl.edge_mask.size() != static_cast<size_t>(sub.num_edges())) {
        throw std::invalid_argument("export_dot: explanation does not match Sub(v)");
    }
    std::ostringstream out;
    out << "graph node_" << v << " {\n";
    for (int i = 0; i < sub.num_nodes(); ++i) {
        out << "  n" << sub.global_of(i) << " [importance=\""
            << format_double(expl.node_mask[static_cast<size_t>(i)]) << '"';
        if (sub.global_of(i) == v) out << ", center=\"1\"";
        out << "];\n";
    }
    for (int t = 0; t < sub.num_edges(); ++t) {
        const auto& [a, b] = sub.edges[static_cast<size_t>(t)];
        out << "  n" << sub.global_of(a) << " -- n" << sub.global_of(b) << " [importance=\""
            << format_double(expl.edge_mask[static_cast<size_t>(t)]) << "\"];\n";
    }
    out << "}\n";
    write_file(path, out.str());
}

void write_degree_histogram(const Graph& g, const std::string& path) {
    std::map<int, int> hist;
    for (int v = 0; v < g.num_nodes(); ++v) ++hist[g.degree(v)];
    std::ostringstream out;
    out << "degree,count\n";
    for (const auto& [degree, count] : hist) out << degree << ',' << count << '\n';
    write_file(path, out.str());
}

}  // namespace xgb
