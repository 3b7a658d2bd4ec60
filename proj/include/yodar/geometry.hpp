#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace yodar {

// Front-view image divided into n_slices vertical strips.
struct ImageGrid {
    int width_px = 1600;
    int height_px = 900;
    int n_slices = 160;

    double slice_width() const { return static_cast<double>(width_px) / n_slices; }
    void validate() const;
};

// Axis-aligned box, center/size parameterization, pixel units.
struct Box2D {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
    double left() const { return cx - 0.5 * w; }
    double right() const { return cx + 0.5 * w; }
    double top() const { return cy - 0.5 * h; }
    double bottom() const { return cy + 0.5 * h; }
};

struct Interval1D {
    double lo = 0.0;
    double hi = 0.0;
};

// Idealized pinhole stand-in for a calibrated front camera.
struct CameraModel {
    double focal_px = 800.0;
    double cam_height = 0.5;   // meters above the radar plane
    double horizon_row = 450.0;
};

// Project a ground-plane point (lateral offset, forward range, both meters)
// to image (column, row). Throws DomainError for non-positive range.
std::pair<double, double> project_to_image(double lateral_m, double range_m,
                                           const CameraModel& cam, const ImageGrid& grid);

// 1-indexed slices whose half-open column span [(s-1)*W/Ns, s*W/Ns) overlaps
// the box with strictly positive length. The box is clamped to [0, width_px]
// first; a box entirely outside the image yields an empty set.
std::vector<int> slices_overlapping_box(const Box2D& b, const ImageGrid& grid);

double iou_1d(const Interval1D& a, const Interval1D& b);
double iou_2d(const Box2D& a, const Box2D& b);

// Binary occupancy over slices: 1 where any ground-truth box overlaps.
std::vector<std::uint8_t> occupancy_from_gt(const std::vector<Box2D>& gt_boxes,
                                            const ImageGrid& grid);

struct ScoredBox {
    Box2D box;
    double score = 0.0;
};

// Greedy NMS: highest score wins, ties broken by lower input index.
std::vector<ScoredBox> nms(const std::vector<ScoredBox>& boxes, double iou_thresh);

}  // namespace yodar
