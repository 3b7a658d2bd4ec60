#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace yodar {

struct BoostConfig {
    int n_rounds = 200;
    int max_depth = 3;
    double shrinkage = 0.1;
    double subsample = 0.5;
    int min_leaf = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

// Binary tree over the 9 fusion metrics; leaves carry log-odds increments.
struct TreeNode {
    bool is_leaf = true;
    int feature_index = -1;
    double threshold = 0.0;
    double leaf_value = 0.0;
    std::unique_ptr<TreeNode> left, right;
};

struct Ensemble {
    double base_score = 0.0;  // initial log-odds
    double shrinkage = 0.1;
    int n_features = 9;
    std::vector<std::unique_ptr<TreeNode>> trees;
};

// Stochastic gradient boosting under logistic loss: each round fits a
// depth-limited least-squares tree to the residuals t - p on a seeded
// subsample; leaf values take one Newton step (sum r / sum p(1-p), clamped to
// +-4). Throws DataError when only one class is present.
Ensemble fit(const std::vector<std::vector<double>>& features,
             const std::vector<std::uint8_t>& labels, const BoostConfig& cfg,
             std::vector<double>* round_loss = nullptr);

double predict_proba(const Ensemble& e, const std::vector<double>& features);

// Exposed for testing: CART split search by squared-error reduction over
// midpoints of consecutive distinct values; ties go to the lowest feature
// index, then the lowest threshold.
std::unique_ptr<TreeNode> fit_tree(const std::vector<std::vector<double>>& features,
                                   const std::vector<double>& residuals,
                                   const std::vector<double>& hessians, const BoostConfig& cfg,
                                   const std::vector<std::size_t>& active_rows);

}  // namespace yodar
