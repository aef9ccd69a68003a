#pragma once

#include <span>
#include <vector>

#include "xgraphbench/dataset.hpp"
#include "xgraphbench/explainers.hpp"
#include "xgraphbench/gin.hpp"
#include "xgraphbench/rng.hpp"

namespace xgb {

enum class MaskKind { node, edge, feature };

MaskKind mask_kind_from_string(const std::string& name);
std::string to_string(MaskKind kind);

// 1 - cos(a, b); exactly 0 for identical vectors, norms guarded by 1e-12.
double cosine_distance(std::span<const double> a, std::span<const double> b);

// TP / (TP + FP + FN) over 0/1 masks; two all-zero masks agree completely (1).
double jaccard(const std::vector<double>& gt, const std::vector<double>& pred);

// Accuracy: best Jaccard against any ground-truth mask of the chosen kind.
// Soft predictions are hardened with top_k_mask first.
double gea(const std::vector<Explanation>& gt_set, const Explanation& pred, MaskKind kind,
           double k_fraction);

// The unfaithfulness core: 1 - exp(-KL(p || q)). q is floored at 1e-10 and
// renormalized; 0 * ln 0 counts as 0, so the value stays below 1.
double gef_from_distributions(std::span<const double> p, std::span<const double> q);

// Unfaithfulness: gef_from_distributions(f(S_u), f(S_u')) where S_u' keeps
// only what the hardened explanation marks.
double gef(const GinModel& model, const Subgraph& sub, const Matrix& full_features,
           const Explanation& expl, double k_fraction);

struct PerturbConfig {
    double feature_noise_sigma = 0.01;
    double edge_drop_prob = 0.001;  // applied to non-motif edges only
    int num_samples = 25;
    double delta = 0.0;  // logit-shift bound; <= 0 means 0.1 * ||logits||_2
    int norm_order = 2;  // 1, 2, or 0 for infinity
    MaskKind compare = MaskKind::node;
};

// Instability: max cosine distance between the explanation of Sub(v) and the
// explanations of admissible perturbations (same predicted label, logit shift
// within delta). 0 if no sample qualifies. `skipped` counts explainer
// failures, if given.
double ges(const GinModel& model, const LocalExplainerFn& explainer, int v, const Dataset& ds,
           const PerturbConfig& cfg, Rng& rng, int* skipped = nullptr);

// Counterfactual fairness: cosine distance between the explanations before
// and after flipping v's protected feature to a uniformly drawn other value.
double gecf(const LocalExplainerFn& explainer, const GinModel& model, int v, const Dataset& ds,
            Rng& rng, MaskKind kind = MaskKind::feature);

// |P(pred=1 | group 0) - P(pred=1 | group 1)|; throws if a group is empty.
double statistical_parity(const std::vector<int>& predictions, const std::vector<int>& groups);

// The group-fairness core: |SP(original) - SP(masked)| for given labelings.
double gegf_from_predictions(const std::vector<int>& original, const std::vector<int>& masked,
                             const std::vector<int>& groups);

// Group fairness: gegf_from_predictions over `nodes`, with each node's masked
// prediction taken under its own hardened explanation.
double gegf(const GinModel& model, const std::vector<int>& nodes,
            const std::vector<Explanation>& explanations, const Dataset& ds, double k_fraction);

}  // namespace xgb
