#include "yodar/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "yodar/errors.hpp"
#include "yodar/rng.hpp"

namespace yodar {

void BoostConfig::validate() const {
    if (n_rounds < 1) throw ConfigError("BoostConfig: n_rounds must be >= 1");
    if (max_depth < 1) throw ConfigError("BoostConfig: max_depth must be >= 1");
    if (!(shrinkage > 0.0 && shrinkage <= 1.0)) throw ConfigError("BoostConfig: shrinkage in (0,1]");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("BoostConfig: subsample in (0,1]");
    if (min_leaf < 1) throw ConfigError("BoostConfig: min_leaf must be >= 1");
}

namespace {

constexpr double kLeafClamp = 4.0;

double newton_leaf(const std::vector<double>& residuals, const std::vector<double>& hessians,
                   const std::vector<std::size_t>& rows) {
    // canonical accumulation order (sorted by value) so the fitted tree does
    // not depend on the order training rows were supplied in
    std::vector<std::pair<double, double>> terms;
    terms.reserve(rows.size());
    for (std::size_t r : rows) terms.emplace_back(residuals[r], hessians[r]);
    std::sort(terms.begin(), terms.end());
    double sr = 0.0, sh = 0.0;
    for (const auto& [r, h] : terms) {
        sr += r;
        sh += h;
    }
    double v = sr / std::max(sh, 1e-12);
    return std::clamp(v, -kLeafClamp, kLeafClamp);
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

SplitChoice best_split(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& residuals, int n_features, int min_leaf,
                       const std::vector<std::size_t>& rows) {
    SplitChoice best;
    auto n = static_cast<double>(rows.size());

    std::vector<std::pair<double, double>> vals(rows.size());  // (feature value, residual)
    for (int f = 0; f < n_features; ++f) {
        for (std::size_t i = 0; i < rows.size(); ++i)
            vals[i] = {features[rows[i]][static_cast<std::size_t>(f)], residuals[rows[i]]};
        std::sort(vals.begin(), vals.end());
        double total = 0.0;
        for (const auto& [x, r] : vals) total += r;
        double parent = total * total / n;

        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            left_sum += vals[i].second;
            if (vals[i].first == vals[i + 1].first) continue;  // split only between distinct values
            auto nl = static_cast<double>(i + 1);
            double nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            double right_sum = total - left_sum;
            double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
            double thr = 0.5 * (vals[i].first + vals[i + 1].first);
            if (gain > best.gain + 1e-12 ||
                (best.found && std::abs(gain - best.gain) <= 1e-12 &&
                 (f < best.feature || (f == best.feature && thr < best.threshold)))) {
                best.found = true;
                best.feature = f;
                best.threshold = thr;
                best.gain = gain;
            }
        }
    }
    return best;
}

std::unique_ptr<TreeNode> grow(const std::vector<std::vector<double>>& features,
                               const std::vector<double>& residuals,
                               const std::vector<double>& hessians, const BoostConfig& cfg,
                               const std::vector<std::size_t>& rows, int depth) {
    auto node = std::make_unique<TreeNode>();
    node->leaf_value = newton_leaf(residuals, hessians, rows);
    if (depth >= cfg.max_depth || rows.size() < 2 * static_cast<std::size_t>(cfg.min_leaf))
        return node;
    int n_features = static_cast<int>(features[rows.front()].size());
    SplitChoice sp = best_split(features, residuals, n_features, cfg.min_leaf, rows);
    if (!sp.found || sp.gain <= 0.0) return node;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
        if (features[r][static_cast<std::size_t>(sp.feature)] < sp.threshold)
            left_rows.push_back(r);
        else
            right_rows.push_back(r);
    }
    node->is_leaf = false;
    node->feature_index = sp.feature;
    node->threshold = sp.threshold;
    node->left = grow(features, residuals, hessians, cfg, left_rows, depth + 1);
    node->right = grow(features, residuals, hessians, cfg, right_rows, depth + 1);
    return node;
}

double tree_value(const TreeNode& node, const std::vector<double>& x) {
    const TreeNode* cur = &node;
    while (!cur->is_leaf)
        cur = x[static_cast<std::size_t>(cur->feature_index)] < cur->threshold ? cur->left.get()
                                                                              : cur->right.get();
    return cur->leaf_value;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::unique_ptr<TreeNode> fit_tree(const std::vector<std::vector<double>>& features,
                                   const std::vector<double>& residuals,
                                   const std::vector<double>& hessians, const BoostConfig& cfg,
                                   const std::vector<std::size_t>& active_rows) {
    if (active_rows.empty()) throw DataError("fit_tree: no active rows");
    return grow(features, residuals, hessians, cfg, active_rows, 0);
}

Ensemble fit(const std::vector<std::vector<double>>& features,
             const std::vector<std::uint8_t>& labels, const BoostConfig& cfg,
             std::vector<double>* round_loss) {
    cfg.validate();
    std::size_t n = features.size();
    if (n < 2 || labels.size() != n) throw DataError("fit: need >= 2 consistent rows");
    std::size_t n_pos = 0;
    for (std::uint8_t l : labels) n_pos += l ? 1 : 0;
    if (n_pos == 0 || n_pos == n)
        throw DataError("fit: both classes must be present (got " + std::to_string(n_pos) + "/" +
                        std::to_string(n) + " positives)");

    Ensemble e;
    e.shrinkage = cfg.shrinkage;
    e.n_features = static_cast<int>(features.front().size());
    double pbar = static_cast<double>(n_pos) / static_cast<double>(n);
    e.base_score = std::log(pbar / (1.0 - pbar));

    std::vector<double> score(n, e.base_score);
    std::vector<double> resid(n), hess(n);
    RngStream root(cfg.seed);

    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);

    for (int round = 0; round < cfg.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            double p = sigmoid(score[i]);
            resid[i] = (labels[i] ? 1.0 : 0.0) - p;
            hess[i] = p * (1.0 - p);
        }
        std::vector<std::size_t> active = all_rows;
        if (cfg.subsample < 1.0) {
            RngStream rs = root.child("round").child(static_cast<std::uint64_t>(round));
            rs.shuffle(active);
            auto k = static_cast<std::size_t>(cfg.subsample * static_cast<double>(n));
            k = std::max<std::size_t>(k, 2);
            active.resize(k);
            std::sort(active.begin(), active.end());
        }
        auto tree = fit_tree(features, resid, hess, cfg, active);
        for (std::size_t i = 0; i < n; ++i) score[i] += cfg.shrinkage * tree_value(*tree, features[i]);
        e.trees.push_back(std::move(tree));
        if (round_loss) {
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double p = sigmoid(score[i]);
                p = std::clamp(p, 1e-15, 1.0 - 1e-15);
                loss -= labels[i] ? std::log(p) : std::log(1.0 - p);
            }
            round_loss->push_back(loss / static_cast<double>(n));
        }
    }
    return e;
}

double predict_proba(const Ensemble& e, const std::vector<double>& features) {
    if (static_cast<int>(features.size()) != e.n_features)
        throw ShapeError("predict_proba: expected " + std::to_string(e.n_features) +
                         " features, got " + std::to_string(features.size()));
    double z = e.base_score;
    for (const auto& t : e.trees) z += e.shrinkage * tree_value(*t, features);
    return sigmoid(z);
}

}  // namespace yodar
