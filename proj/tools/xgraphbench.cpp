#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xgraphbench/ba_shapes.hpp"
#include "xgraphbench/explainers.hpp"
#include "xgraphbench/gin.hpp"
#include "xgraphbench/io.hpp"
#include "xgraphbench/metrics.hpp"
#include "xgraphbench/rng.hpp"
#include "xgraphbench/shapeggen.hpp"

namespace {

std::string default_out() {
    const char* env = std::getenv("XGRAPHBENCH_OUT");
    return env != nullptr ? std::string(env) : std::string();
}

std::vector<int> parse_nodes(const std::string& spec, int num_nodes) {
    std::vector<int> nodes;
    if (spec == "all") {
        nodes.resize(static_cast<size_t>(num_nodes));
        for (int v = 0; v < num_nodes; ++v) nodes[static_cast<size_t>(v)] = v;
        return nodes;
    }
    size_t start = 0;
    while (start <= spec.size()) {
        size_t pos = spec.find(',', start);
        if (pos == std::string::npos) pos = spec.size();
        const std::string tok = spec.substr(start, pos - start);
        if (!tok.empty()) {
            const int v = std::stoi(tok);
            if (v < 0 || v >= num_nodes) {
                throw std::invalid_argument("node " + tok + " out of range");
            }
            nodes.push_back(v);
        }
        start = pos + 1;
    }
    if (nodes.empty()) throw std::invalid_argument("--nodes selected nothing");
    return nodes;
}

xgb::LocalExplainerFn make_local_explainer(const std::string& method, std::uint64_t seed,
                                           int ig_steps) {
    if (method == "grad") {
        return [](const xgb::GinModel& m, const xgb::Graph& g, int center) {
            return xgb::grad_explain_local(m, g, center);
        };
    }
    if (method == "ig") {
        return [ig_steps](const xgb::GinModel& m, const xgb::Graph& g, int center) {
            return xgb::integrated_gradients_local(m, g, center, ig_steps);
        };
    }
    if (method == "random") {
        // fresh stream per call so repeated runs stay reproducible
        auto counter = std::make_shared<std::uint64_t>(0);
        return [seed, counter](const xgb::GinModel&, const xgb::Graph& g, int center) {
            xgb::Subgraph whole;
            for (int v = 0; v < g.num_nodes(); ++v) whole.nodes.push_back(v);
            whole.edges = g.edges();
            whole.center = center;
            xgb::Rng rng = xgb::SeedSplitter(seed).stream("random-local", (*counter)++);
            return xgb::random_explanation(whole, g.features().cols(), rng);
        };
    }
    throw std::invalid_argument("unknown method: " + method);
}

int run(int argc, char** argv) {
    CLI::App app{"synthetic graph benchmark toolkit: motif datasets, a reference GIN, "
                 "baseline explainers, and explanation metrics"};
    app.require_subcommand(1);

    // generate
    std::string gen_preset, gen_params_file, gen_out = default_out();
    std::uint64_t gen_seed = 0;
    bool gen_seed_set = false;
    auto* gen = app.add_subcommand("generate", "generate a dataset bundle");
    auto* preset_opt = gen->add_option("--preset", gen_preset, "preset name (sg-base, ...)");
    auto* params_opt = gen->add_option("--params", gen_params_file, "JSON parameter file");
    preset_opt->excludes(params_opt);
    gen->add_option("--seed", gen_seed, "generation seed")->each([&](const std::string&) {
        gen_seed_set = true;
    });
    gen->add_option("--out", gen_out, "bundle directory")->required(gen_out.empty());

    // train
    std::string train_data, train_out = default_out();
    xgb::TrainConfig train_cfg;
    int train_hidden = 16;
    auto* tr = app.add_subcommand("train", "train the reference model on a bundle");
    tr->add_option("--data", train_data, "dataset bundle directory")->required();
    tr->add_option("--epochs", train_cfg.epochs, "training epochs");
    tr->add_option("--lr", train_cfg.learning_rate, "learning rate");
    tr->add_option("--weight-decay", train_cfg.weight_decay, "L2 coefficient");
    tr->add_option("--seed", train_cfg.seed, "weight-init seed");
    tr->add_option("--hidden", train_hidden, "hidden width");
    tr->add_option("--out", train_out, "model checkpoint path")->required(train_out.empty());

    // explain
    std::string ex_data, ex_model, ex_method = "grad", ex_nodes = "all", ex_out = default_out();
    std::uint64_t ex_seed = 0;
    int ex_steps = 50;
    auto* ex = app.add_subcommand("explain", "produce soft explanations");
    ex->add_option("--data", ex_data)->required();
    ex->add_option("--model", ex_model)->required();
    ex->add_option("--method", ex_method, "random | grad | ig")
        ->check(CLI::IsMember({"random", "grad", "ig"}));
    ex->add_option("--nodes", ex_nodes, "'all' or comma-separated node ids");
    ex->add_option("--seed", ex_seed, "seed for the random method");
    ex->add_option("--steps", ex_steps, "integration steps for ig");
    ex->add_option("--out", ex_out, "output JSONL path")->required(ex_out.empty());

    // evaluate
    std::string ev_data, ev_model, ev_expl, ev_metrics = "gea,gef,ges,gecf,gegf";
    std::string ev_out = default_out(), ev_mask = "node", ev_method = "grad";
    double ev_k = 0.25;
    std::uint64_t ev_seed = 0;
    auto* ev = app.add_subcommand("evaluate", "score explanations with the five metrics");
    ev->add_option("--data", ev_data)->required();
    ev->add_option("--model", ev_model)->required();
    ev->add_option("--explanations", ev_expl)->required();
    ev->add_option("--metrics", ev_metrics, "comma list of gea,gef,ges,gecf,gegf");
    ev->add_option("--k", ev_k, "top-k fraction for hardening");
    ev->add_option("--mask-kind", ev_mask, "mask compared by gea: node | edge | feature")
        ->check(CLI::IsMember({"node", "edge", "feature"}));
    ev->add_option("--method", ev_method,
                   "explainer re-run by ges/gecf on perturbed inputs: random | grad | ig")
        ->check(CLI::IsMember({"random", "grad", "ig"}));
    ev->add_option("--seed", ev_seed, "seed for ges/gecf perturbations");
    ev->add_option("--out", ev_out, "metrics CSV path")->required(ev_out.empty());

    // export-dot
    std::string dot_data, dot_expl_file, dot_out = default_out();
    int dot_node = 0;
    auto* dot = app.add_subcommand("export-dot", "write one node's subgraph as DOT");
    dot->add_option("--data", dot_data)->required();
    dot->add_option("--node", dot_node)->required();
    dot->add_option("--explanations", dot_expl_file, "JSONL with a record for --node");
    dot->add_option("--out", dot_out, "output DOT path")->required(dot_out.empty());

    // report
    std::string rep_data, rep_hist;
    auto* rep = app.add_subcommand("report", "dataset statistics");
    rep->add_option("--data", rep_data)->required();
    rep->add_option("--degree-hist", rep_hist, "degree histogram CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        xgb::Dataset ds;
        if (!gen_params_file.empty()) {
            std::ifstream f(gen_params_file);
            if (!f) throw std::runtime_error("cannot read params file: " + gen_params_file);
            std::ostringstream ss;
            ss << f.rdbuf();
            const auto j = nlohmann::json::parse(ss.str());
            if (j.value("generator", "shapeggen") == "ba-shapes") {
                auto p = xgb::ba_params_from_json(ss.str());
                if (gen_seed_set) p.seed = gen_seed;
                ds = xgb::generate_ba_shapes(p);
            } else {
                auto p = xgb::params_from_json(ss.str());
                if (gen_seed_set) p.seed = gen_seed;
                ds = xgb::generate(p);
            }
        } else if (!gen_preset.empty()) {
            auto p = xgb::preset(gen_preset);
            if (gen_seed_set) p.seed = gen_seed;
            ds = xgb::generate(p);
        } else {
            throw std::invalid_argument("generate needs --preset or --params");
        }
        xgb::save_dataset(ds, gen_out);
        std::cout << "wrote " << gen_out << ": " << ds.graph.num_nodes() << " nodes, "
                  << ds.graph.num_edges() << " edges, " << ds.motifs.size() << " motifs\n";
        return 0;
    }

    if (tr->parsed()) {
        const xgb::Dataset ds = xgb::load_dataset(train_data);
        xgb::GinModel model(ds.num_features(), train_hidden, ds.num_classes, ds.num_layers,
                            train_cfg.seed);
        const xgb::TrainResult res = xgb::train(std::move(model), ds, train_cfg);
        xgb::save_model(res.model, train_out);
        std::cout << "final loss " << res.epoch_loss.back() << ", train acc "
                  << res.train_accuracy << ", val acc " << res.val_accuracy << ", test acc "
                  << res.test_accuracy << '\n';
        std::cout << "wrote " << train_out << '\n';
        return 0;
    }

    if (ex->parsed()) {
        const xgb::Dataset ds = xgb::load_dataset(ex_data);
        const xgb::GinModel model = xgb::load_model(ex_model);
        const auto nodes = parse_nodes(ex_nodes, ds.graph.num_nodes());
        xgb::SeedSplitter seeds(ex_seed);
        std::vector<xgb::Explanation> out;
        out.reserve(nodes.size());
        for (int v : nodes) {
            if (ex_method == "random") {
                const xgb::Subgraph sub = xgb::enclosing_subgraph(ds, v);
                xgb::Rng rng = seeds.stream("random", static_cast<std::uint64_t>(v));
                out.push_back(xgb::random_explanation(sub, ds.num_features(), rng));
            } else if (ex_method == "grad") {
                out.push_back(xgb::grad_explain(model, ds, v));
            } else {
                out.push_back(xgb::integrated_gradients(model, ds, v, ex_steps));
            }
        }
        xgb::save_explanations(out, ex_out);
        std::cout << "wrote " << out.size() << " explanations to " << ex_out << '\n';
        return 0;
    }

    if (ev->parsed()) {
        std::vector<std::string> wanted;
        for (size_t start = 0; start <= ev_metrics.size();) {
            size_t pos = ev_metrics.find(',', start);
            if (pos == std::string::npos) pos = ev_metrics.size();
            const std::string tok = ev_metrics.substr(start, pos - start);
            if (!tok.empty()) wanted.push_back(tok);
            start = pos + 1;
        }
        for (const auto& m : wanted) {
            if (m != "gea" && m != "gef" && m != "ges" && m != "gecf" && m != "gegf") {
                throw CLI::ValidationError("--metrics", "unknown metric: " + m);
            }
        }
        if (wanted.empty()) throw CLI::ValidationError("--metrics", "no metrics selected");

        const xgb::Dataset ds = xgb::load_dataset(ev_data);
        const xgb::GinModel model = xgb::load_model(ev_model);
        const auto expls = xgb::load_explanations(ev_expl);
        const xgb::MaskKind gea_kind = xgb::mask_kind_from_string(ev_mask);
        const xgb::LocalExplainerFn local = make_local_explainer(ev_method, ev_seed, 50);
        xgb::SeedSplitter seeds(ev_seed);
        xgb::PerturbConfig pcfg;

        std::vector<xgb::MetricRow> rows;
        for (const auto& name : wanted) {
            if (name == "gegf") {
                std::vector<int> nodes;
                for (const auto& e : expls) nodes.push_back(e.center);
                const double value = xgb::gegf(model, nodes, expls, ds, ev_k);
                rows.push_back({-1, "gegf", "all", value, 1, ev_seed});
                continue;
            }
            for (const auto& e : expls) {
                const int v = e.center;
                const xgb::Subgraph sub = xgb::enclosing_subgraph(ds, v);
                if (e.node_mask.size() != static_cast<size_t>(sub.num_nodes()) ||
                    e.edge_mask.size() != static_cast<size_t>(sub.num_edges())) {
                    throw std::runtime_error("explanation for node " + std::to_string(v) +
                                             " does not match its subgraph");
                }
                if (name == "gea") {
                    const auto gt = xgb::ground_truth_for(ds, v, sub);
                    rows.push_back({v, "gea", xgb::to_string(gea_kind),
                                    xgb::gea(gt, e, gea_kind, ev_k), 1, ev_seed});
                } else if (name == "gef") {
                    rows.push_back({v, "gef", "all",
                                    xgb::gef(model, sub, ds.graph.features(), e, ev_k), 1,
                                    ev_seed});
                } else if (name == "ges") {
                    xgb::Rng rng = seeds.stream("ges", static_cast<std::uint64_t>(v));
                    rows.push_back({v, "ges", xgb::to_string(pcfg.compare),
                                    xgb::ges(model, local, v, ds, pcfg, rng),
                                    pcfg.num_samples, ev_seed});
                } else {
                    xgb::Rng rng = seeds.stream("gecf", static_cast<std::uint64_t>(v));
                    rows.push_back({v, "gecf", "feature",
                                    xgb::gecf(local, model, v, ds, rng), 1, ev_seed});
                }
            }
        }
        xgb::write_metrics_csv(rows, ev_out);
        std::cout << "wrote " << rows.size() << " metric rows to " << ev_out << '\n';
        return 0;
    }

    if (dot->parsed()) {
        const xgb::Dataset ds = xgb::load_dataset(dot_data);
        const xgb::Subgraph sub = xgb::enclosing_subgraph(ds, dot_node);
        xgb::Explanation chosen;
        if (!dot_expl_file.empty()) {
            bool found = false;
            for (const auto& e : xgb::load_explanations(dot_expl_file)) {
                if (e.center == dot_node) {
                    chosen = e;
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw std::runtime_error("no explanation for node " + std::to_string(dot_node));
            }
        } else {
            // union of the node's ground-truth masks
            chosen.center = dot_node;
            chosen.hard = true;
            chosen.node_mask.assign(static_cast<size_t>(sub.num_nodes()), 0.0);
            chosen.edge_mask.assign(static_cast<size_t>(sub.num_edges()), 0.0);
            chosen.feature_mask.assign(ds.feature_mask.begin(), ds.feature_mask.end());
            for (const auto& gt : xgb::ground_truth_for(ds, dot_node, sub)) {
                for (size_t i = 0; i < gt.node_mask.size(); ++i) {
                    chosen.node_mask[i] = std::max(chosen.node_mask[i], gt.node_mask[i]);
                }
                for (size_t i = 0; i < gt.edge_mask.size(); ++i) {
                    chosen.edge_mask[i] = std::max(chosen.edge_mask[i], gt.edge_mask[i]);
                }
            }
        }
        xgb::export_dot(ds, dot_node, chosen, dot_out);
        std::cout << "wrote " << dot_out << '\n';
        return 0;
    }

    if (rep->parsed()) {
        const xgb::Dataset ds = xgb::load_dataset(rep_data);
        xgb::write_degree_histogram(ds.graph, rep_hist);
        std::cout << "wrote " << rep_hist << '\n';
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
}
