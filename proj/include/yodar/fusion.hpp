#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "yodar/gbm.hpp"
#include "yodar/geometry.hpp"
#include "yodar/radarnet.hpp"

namespace yodar {

// One camera detection: box plus objectness z and vehicle probability.
struct CandidateBox {
    Box2D box;
    double z = 0.0;
    double p_vehicle = 0.0;

    double score() const { return z * p_vehicle; }
};

// The nine fusion metrics, fixed order: z, p_vehicle, cx, cy, w, h, A, mu, sigma.
using FeatureVector = std::vector<double>;
inline constexpr int kNumFusionFeatures = 9;

struct LabeledExample {
    FeatureVector features;
    bool is_tp = false;
    int scene_id = 0;
    int box_id = 0;
};

struct FusionConfig {
    double t_f = 0.05;         // low candidate threshold on z * p_vehicle
    double t_fuse = 0.5;       // decision threshold on the meta-probability
    double t_iou_label = 0.5;  // TP/FP labeling threshold (strict >)
    double nms_iou = 0.45;

    void validate() const;
};

// Mean and population standard deviation of the slice probabilities under the
// box; (0, 0) when the box overlaps no slice.
std::pair<double, double> radar_stats_over_box(const Box2D& b, const SliceProbs& y,
                                               const ImageGrid& grid);

FeatureVector build_features(const CandidateBox& c, const SliceProbs& y, const ImageGrid& grid);

// Per-box labeling: TP iff max IoU against ground truth is strictly above the
// threshold. No one-to-one matching here; that lives in evaluation.
std::vector<bool> label_candidates(const std::vector<CandidateBox>& cands,
                                   const std::vector<Box2D>& gt, double t_iou_label);

// Meta-classify each candidate, keep those at or above t_fuse, NMS, sort by
// fused score descending. Candidates are assumed pre-filtered at t_f.
std::vector<ScoredBox> fuse_scene(const std::vector<CandidateBox>& cands, const SliceProbs& y,
                                  const Ensemble& e, const FusionConfig& cfg,
                                  const ImageGrid& grid);

}  // namespace yodar
