#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "yodar/geometry.hpp"

namespace yodar {

// Greedy one-to-one matching result for one scene.
struct MatchResult {
    std::vector<int> det_matched_gt;     // per detection: matched GT index or -1 (FP)
    std::vector<std::uint8_t> gt_matched;  // per GT: 1 if some detection claimed it

    long tp() const {
        long n = 0;
        for (int g : det_matched_gt) n += g >= 0 ? 1 : 0;
        return n;
    }
    long fp() const { return static_cast<long>(det_matched_gt.size()) - tp(); }
    long fn() const {
        long n = 0;
        for (std::uint8_t m : gt_matched) n += m ? 0 : 1;
        return n;
    }
};

// Detections processed by descending score (ties by input index); each claims
// the unmatched GT with the highest IoU when that IoU >= t.
MatchResult match_detections(const std::vector<ScoredBox>& dets, const std::vector<Box2D>& gt,
                             double t);

// One evaluated scene: detections of a single detector plus ground truth.
struct EvalScene {
    std::vector<ScoredBox> dets;
    std::vector<Box2D> gt_boxes;
    std::vector<double> gt_ranges;  // meters, parallel to gt_boxes
};

// Area under the precision-recall step curve from the globally ranked TP/FP
// flags: each TP contributes (1/n_gt) times the precision immediately before
// its rank (left-continuous lower step). n_gt == 0 is an error.
double ap_from_flags(const std::vector<std::uint8_t>& tp_flags, std::size_t n_gt);

// Global score ranking across scenes, rank-incremental greedy matching,
// exact step integration. Single class, so this is also the mAP.
double average_precision(const std::vector<EvalScene>& scenes, double t);

// TP / (TP + FP + FN); the paper reports "accuracy" without a formula, this
// Jaccard-style detection accuracy is the substitute used throughout.
double detection_accuracy(long tp, long fp, long fn);

struct BinCounts {
    double bin_width_m = 10.0;
    std::vector<long> gt_count;    // GT per distance bin
    std::vector<long> tp_matched;  // one-to-one matched TP per bin
    std::vector<long> tp_perbox;   // GT covered by any detection with IoU >= t
};

// Distance-binned recall over [0, n_bins * bin_width). GT beyond the last bin
// are ignored.
BinCounts distance_binned_recall(const std::vector<EvalScene>& scenes, double t,
                                 double bin_width_m = 10.0, int n_bins = 10);

// Spatial heatmaps: distance bins (rows) x 16 column bins of 100 px.
// Cell membership by box center column and GT range.
struct Heatmap {
    int n_dist_bins = 10;
    int n_col_bins = 16;
    std::vector<double> cells;  // row-major

    double& at(int d, int c) { return cells[static_cast<std::size_t>(d) * n_col_bins + c]; }
    double at(int d, int c) const { return cells[static_cast<std::size_t>(d) * n_col_bins + c]; }
};

Heatmap heatmap_gt_counts(const std::vector<EvalScene>& scenes, const ImageGrid& grid,
                          double bin_width_m = 10.0, int n_bins = 10);

// Detected-GT counts per cell for one detector (numerator of the recall map).
Heatmap heatmap_detected_counts(const std::vector<EvalScene>& scenes, double t,
                                const ImageGrid& grid, double bin_width_m = 10.0, int n_bins = 10);

// Elementwise detected/gt; cells without GT get NaN (rendered blank).
Heatmap heatmap_recall(const Heatmap& detected, const Heatmap& gt);

struct FpStudyRow {
    std::string detector;
    double threshold = 0.0;
    long tp = 0;
    long fp = 0;
    bool matched = true;  // false when no camera threshold reaches the fused TP level
};

// Lower the camera score threshold until its TP count reaches the fused TP
// count; emit (camera @ default, camera @ matched, fused). Camera detections
// must be the full NMS-filtered candidate list with raw scores.
std::vector<FpStudyRow> fp_at_matched_tp(const std::vector<EvalScene>& camera_scenes,
                                         const std::vector<EvalScene>& fused_scenes,
                                         double default_threshold, double t);

}  // namespace yodar
