#include "yodar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "yodar/errors.hpp"

namespace yodar {

void ImageGrid::validate() const {
    if (width_px <= 0 || height_px <= 0 || n_slices <= 0)
        throw ConfigError("ImageGrid: dimensions must be positive");
    if (width_px % n_slices != 0)
        throw ConfigError("ImageGrid: width_px must be divisible by n_slices");
}

std::pair<double, double> project_to_image(double lateral_m, double range_m,
                                           const CameraModel& cam, const ImageGrid& grid) {
    if (range_m <= 0.0) throw DomainError("project_to_image: range must be positive");
    double column = grid.width_px / 2.0 + cam.focal_px * lateral_m / range_m;
    double row = cam.horizon_row + cam.focal_px * cam.cam_height / range_m;
    return {column, row};
}

std::vector<int> slices_overlapping_box(const Box2D& b, const ImageGrid& grid) {
    double lo = std::max(b.left(), 0.0);
    double hi = std::min(b.right(), static_cast<double>(grid.width_px));
    std::vector<int> out;
    if (hi <= lo) return out;  // outside the image or zero width after clamp
    double sw = grid.slice_width();
    // slice s covers [(s-1)*sw, s*sw); positive-length overlap required
    int first = static_cast<int>(std::floor(lo / sw)) + 1;
    int last = static_cast<int>(std::ceil(hi / sw));
    first = std::max(first, 1);
    last = std::min(last, grid.n_slices);
    for (int s = first; s <= last; ++s) {
        double s_lo = (s - 1) * sw;
        double s_hi = s * sw;
        if (std::min(hi, s_hi) - std::max(lo, s_lo) > 0.0) out.push_back(s);
    }
    return out;
}

double iou_1d(const Interval1D& a, const Interval1D& b) {
    double inter = std::min(a.hi, b.hi) - std::max(a.lo, b.lo);
    if (inter <= 0.0) return 0.0;
    double uni = std::max(a.hi, b.hi) - std::min(a.lo, b.lo);
    if (uni <= 0.0) return 0.0;  // both degenerate
    return inter / uni;
}

double iou_2d(const Box2D& a, const Box2D& b) {
    double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
    double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    double inter = iw * ih;
    double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

std::vector<std::uint8_t> occupancy_from_gt(const std::vector<Box2D>& gt_boxes,
                                            const ImageGrid& grid) {
    std::vector<std::uint8_t> t(static_cast<std::size_t>(grid.n_slices), 0);
    for (const Box2D& b : gt_boxes)
        for (int s : slices_overlapping_box(b, grid)) t[static_cast<std::size_t>(s - 1)] = 1;
    return t;
}

std::vector<ScoredBox> nms(const std::vector<ScoredBox>& boxes, double iou_thresh) {
    std::vector<std::size_t> order(boxes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return boxes[i].score > boxes[j].score;  // stable: ties keep input order
    });
    std::vector<bool> dropped(boxes.size(), false);
    std::vector<ScoredBox> kept;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        std::size_t i = order[oi];
        if (dropped[i]) continue;
        kept.push_back(boxes[i]);
        for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
            std::size_t j = order[oj];
            if (!dropped[j] && iou_2d(boxes[i].box, boxes[j].box) >= iou_thresh) dropped[j] = true;
        }
    }
    return kept;
}

}  // namespace yodar
