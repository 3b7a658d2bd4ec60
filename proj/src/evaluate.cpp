#include "yodar/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "yodar/errors.hpp"

namespace yodar {

MatchResult match_detections(const std::vector<ScoredBox>& dets, const std::vector<Box2D>& gt,
                             double t) {
    MatchResult r;
    r.det_matched_gt.assign(dets.size(), -1);
    r.gt_matched.assign(gt.size(), 0);
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].score > dets[b].score;
    });
    for (std::size_t di : order) {
        double best_iou = 0.0;
        int best_gt = -1;
        for (std::size_t gi = 0; gi < gt.size(); ++gi) {
            if (r.gt_matched[gi]) continue;
            double iou = iou_2d(dets[di].box, gt[gi]);
            if (iou > best_iou) {
                best_iou = iou;
                best_gt = static_cast<int>(gi);
            }
        }
        if (best_gt >= 0 && best_iou >= t) {
            r.det_matched_gt[di] = best_gt;
            r.gt_matched[static_cast<std::size_t>(best_gt)] = 1;
        }
    }
    return r;
}

double ap_from_flags(const std::vector<std::uint8_t>& tp_flags, std::size_t n_gt) {
    if (n_gt == 0) throw DataError("average_precision: no ground truth");
    if (tp_flags.empty()) return 0.0;
    // Left-continuous step integration: each TP contributes the recall it
    // gains times the precision just before its rank (precision 1 before any
    // detection). Gives (TP, FP, TP) with 2 GT exactly 0.75.
    std::size_t n = tp_flags.size();
    double ap = 0.0;
    double tp = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!tp_flags[k]) continue;
        double prev_precision = k == 0 ? 1.0 : tp / static_cast<double>(k);
        tp += 1.0;
        ap += prev_precision / static_cast<double>(n_gt);
    }
    return ap;
}

double average_precision(const std::vector<EvalScene>& scenes, double t) {
    std::size_t n_gt = 0;
    for (const EvalScene& s : scenes) n_gt += s.gt_boxes.size();
    if (n_gt == 0) throw DataError("average_precision: no ground truth");

    struct Ranked {
        double score;
        std::size_t scene, det;
    };
    std::vector<Ranked> ranked;
    for (std::size_t si = 0; si < scenes.size(); ++si)
        for (std::size_t di = 0; di < scenes[si].dets.size(); ++di)
            ranked.push_back({scenes[si].dets[di].score, si, di});
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.scene != b.scene) return a.scene < b.scene;
        return a.det < b.det;
    });

    std::vector<std::vector<std::uint8_t>> gt_taken(scenes.size());
    for (std::size_t si = 0; si < scenes.size(); ++si)
        gt_taken[si].assign(scenes[si].gt_boxes.size(), 0);

    std::vector<std::uint8_t> flags;
    flags.reserve(ranked.size());
    for (const Ranked& r : ranked) {
        const EvalScene& s = scenes[r.scene];
        double best_iou = 0.0;
        int best_gt = -1;
        for (std::size_t gi = 0; gi < s.gt_boxes.size(); ++gi) {
            if (gt_taken[r.scene][gi]) continue;
            double iou = iou_2d(s.dets[r.det].box, s.gt_boxes[gi]);
            if (iou > best_iou) {
                best_iou = iou;
                best_gt = static_cast<int>(gi);
            }
        }
        bool is_tp = best_gt >= 0 && best_iou >= t;
        if (is_tp) gt_taken[r.scene][static_cast<std::size_t>(best_gt)] = 1;
        flags.push_back(is_tp ? 1 : 0);
    }
    return ap_from_flags(flags, n_gt);
}

double detection_accuracy(long tp, long fp, long fn) {
    long denom = tp + fp + fn;
    if (denom <= 0) throw DataError("detection_accuracy: TP+FP+FN must be positive");
    return static_cast<double>(tp) / static_cast<double>(denom);
}

BinCounts distance_binned_recall(const std::vector<EvalScene>& scenes, double t,
                                 double bin_width_m, int n_bins) {
    if (bin_width_m <= 0.0) throw ConfigError("distance_binned_recall: bin width must be positive");
    BinCounts bc;
    bc.bin_width_m = bin_width_m;
    bc.gt_count.assign(static_cast<std::size_t>(n_bins), 0);
    bc.tp_matched.assign(static_cast<std::size_t>(n_bins), 0);
    bc.tp_perbox.assign(static_cast<std::size_t>(n_bins), 0);
    for (const EvalScene& s : scenes) {
        MatchResult m = match_detections(s.dets, s.gt_boxes, t);
        for (std::size_t gi = 0; gi < s.gt_boxes.size(); ++gi) {
            int bin = static_cast<int>(s.gt_ranges[gi] / bin_width_m);
            if (bin < 0 || bin >= n_bins) continue;
            bc.gt_count[static_cast<std::size_t>(bin)]++;
            if (m.gt_matched[gi]) bc.tp_matched[static_cast<std::size_t>(bin)]++;
            // per-box rule: GT covered by any detection at IoU >= t
            for (const ScoredBox& d : s.dets)
                if (iou_2d(d.box, s.gt_boxes[gi]) >= t) {
                    bc.tp_perbox[static_cast<std::size_t>(bin)]++;
                    break;
                }
        }
    }
    return bc;
}

namespace {

Heatmap make_heatmap(int n_dist_bins, int n_col_bins) {
    Heatmap h;
    h.n_dist_bins = n_dist_bins;
    h.n_col_bins = n_col_bins;
    h.cells.assign(static_cast<std::size_t>(n_dist_bins) * n_col_bins, 0.0);
    return h;
}

bool heatmap_cell(const Box2D& box, double range_m, const ImageGrid& grid, double bin_width_m,
                  int n_dist_bins, int n_col_bins, int& d, int& c) {
    d = static_cast<int>(range_m / bin_width_m);
    double col_width = static_cast<double>(grid.width_px) / n_col_bins;
    c = static_cast<int>(box.cx / col_width);
    return d >= 0 && d < n_dist_bins && c >= 0 && c < n_col_bins;
}

}  // namespace

Heatmap heatmap_gt_counts(const std::vector<EvalScene>& scenes, const ImageGrid& grid,
                          double bin_width_m, int n_bins) {
    Heatmap h = make_heatmap(n_bins, 16);
    for (const EvalScene& s : scenes)
        for (std::size_t gi = 0; gi < s.gt_boxes.size(); ++gi) {
            int d, c;
            if (heatmap_cell(s.gt_boxes[gi], s.gt_ranges[gi], grid, bin_width_m, n_bins, 16, d, c))
                h.at(d, c) += 1.0;
        }
    return h;
}

Heatmap heatmap_detected_counts(const std::vector<EvalScene>& scenes, double t,
                                const ImageGrid& grid, double bin_width_m, int n_bins) {
    Heatmap h = make_heatmap(n_bins, 16);
    for (const EvalScene& s : scenes) {
        MatchResult m = match_detections(s.dets, s.gt_boxes, t);
        for (std::size_t gi = 0; gi < s.gt_boxes.size(); ++gi) {
            if (!m.gt_matched[gi]) continue;
            int d, c;
            if (heatmap_cell(s.gt_boxes[gi], s.gt_ranges[gi], grid, bin_width_m, n_bins, 16, d, c))
                h.at(d, c) += 1.0;
        }
    }
    return h;
}

Heatmap heatmap_recall(const Heatmap& detected, const Heatmap& gt) {
    Heatmap h = detected;
    for (std::size_t i = 0; i < h.cells.size(); ++i)
        h.cells[i] = gt.cells[i] > 0.0 ? detected.cells[i] / gt.cells[i]
                                       : std::numeric_limits<double>::quiet_NaN();
    return h;
}

namespace {

struct TotalCounts {
    long tp = 0, fp = 0;
};

TotalCounts count_at_threshold(const std::vector<EvalScene>& scenes, double threshold, double t) {
    TotalCounts out;
    for (const EvalScene& s : scenes) {
        std::vector<ScoredBox> kept;
        for (const ScoredBox& d : s.dets)
            if (d.score >= threshold) kept.push_back(d);
        MatchResult m = match_detections(kept, s.gt_boxes, t);
        out.tp += m.tp();
        out.fp += m.fp();
    }
    return out;
}

}  // namespace

std::vector<FpStudyRow> fp_at_matched_tp(const std::vector<EvalScene>& camera_scenes,
                                         const std::vector<EvalScene>& fused_scenes,
                                         double default_threshold, double t) {
    TotalCounts fused = count_at_threshold(fused_scenes, 0.0, t);
    TotalCounts cam_default = count_at_threshold(camera_scenes, default_threshold, t);

    // candidate thresholds: every distinct camera score, descending
    std::vector<double> scores;
    for (const EvalScene& s : camera_scenes)
        for (const ScoredBox& d : s.dets) scores.push_back(d.score);
    std::sort(scores.begin(), scores.end(), std::greater<>());
    scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

    // TP is monotone non-decreasing as the threshold drops; binary search the
    // first (largest) threshold whose TP count reaches the fused level
    bool matched = false;
    double matched_thr = 0.0;
    TotalCounts cam_matched{};
    std::size_t lo = 0, hi = scores.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        TotalCounts c = count_at_threshold(camera_scenes, scores[mid], t);
        if (c.tp >= fused.tp)
            hi = mid;
        else
            lo = mid + 1;
    }
    if (lo < scores.size()) {
        matched = true;
        matched_thr = scores[lo];
        cam_matched = count_at_threshold(camera_scenes, matched_thr, t);
    } else if (!scores.empty()) {
        // unmatchable: report the closest achievable level (threshold 0)
        matched_thr = 0.0;
        cam_matched = count_at_threshold(camera_scenes, 0.0, t);
    }

    std::vector<FpStudyRow> rows;
    rows.push_back({"camera_default", default_threshold, cam_default.tp, cam_default.fp, true});
    rows.push_back({"camera_matched", matched_thr, cam_matched.tp, cam_matched.fp, matched});
    rows.push_back({"fused", 0.0, fused.tp, fused.fp, true});
    return rows;
}

}  // namespace yodar
