#include "yodar/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "yodar/errors.hpp"

namespace yodar {

void FusionConfig::validate() const {
    for (double v : {t_f, t_fuse, t_iou_label, nms_iou})
        if (v < 0.0 || v > 1.0) throw ConfigError("FusionConfig: thresholds must be in [0,1]");
}

std::pair<double, double> radar_stats_over_box(const Box2D& b, const SliceProbs& y,
                                               const ImageGrid& grid) {
    std::vector<int> slices = slices_overlapping_box(b, grid);
    if (slices.empty()) return {0.0, 0.0};
    double mu = 0.0;
    for (int s : slices) mu += y[static_cast<std::size_t>(s - 1)];
    mu /= static_cast<double>(slices.size());
    double var = 0.0;
    for (int s : slices) {
        double d = y[static_cast<std::size_t>(s - 1)] - mu;
        var += d * d;
    }
    var /= static_cast<double>(slices.size());
    return {mu, std::sqrt(var)};
}

FeatureVector build_features(const CandidateBox& c, const SliceProbs& y, const ImageGrid& grid) {
    auto [mu, sigma] = radar_stats_over_box(c.box, y, grid);
    return {c.z, c.p_vehicle, c.box.cx, c.box.cy, c.box.w, c.box.h, c.box.area(), mu, sigma};
}

std::vector<bool> label_candidates(const std::vector<CandidateBox>& cands,
                                   const std::vector<Box2D>& gt, double t_iou_label) {
    std::vector<bool> labels(cands.size(), false);
    for (std::size_t i = 0; i < cands.size(); ++i) {
        double best = 0.0;  // max over the empty set is 0
        for (const Box2D& a : gt) best = std::max(best, iou_2d(a, cands[i].box));
        labels[i] = best > t_iou_label;
    }
    return labels;
}

std::vector<ScoredBox> fuse_scene(const std::vector<CandidateBox>& cands, const SliceProbs& y,
                                  const Ensemble& e, const FusionConfig& cfg,
                                  const ImageGrid& grid) {
    std::vector<ScoredBox> scored;
    for (const CandidateBox& c : cands) {
        double p = predict_proba(e, build_features(c, y, grid));
        if (p >= cfg.t_fuse) scored.push_back({c.box, p});
    }
    std::vector<ScoredBox> kept = nms(scored, cfg.nms_iou);
    std::stable_sort(kept.begin(), kept.end(),
                     [](const ScoredBox& a, const ScoredBox& b) { return a.score > b.score; });
    return kept;
}

}  // namespace yodar
