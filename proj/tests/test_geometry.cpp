#include <doctest.h>

#include <cmath>

#include "yodar/errors.hpp"
#include "yodar/geometry.hpp"
#include "yodar/rng.hpp"

using namespace yodar;

namespace {

// Pixel-grid counting oracle: boxes with integer corners, count unit cells.
double iou_oracle(const Box2D& a, const Box2D& b) {
    int lo_x = static_cast<int>(std::lround(std::min(a.left(), b.left())));
    int hi_x = static_cast<int>(std::lround(std::max(a.right(), b.right())));
    int lo_y = static_cast<int>(std::lround(std::min(a.top(), b.top())));
    int hi_y = static_cast<int>(std::lround(std::max(a.bottom(), b.bottom())));
    long inter = 0, uni = 0;
    for (int x = lo_x; x < hi_x; ++x)
        for (int y = lo_y; y < hi_y; ++y) {
            double cx = x + 0.5, cy = y + 0.5;
            bool in_a = cx > a.left() && cx < a.right() && cy > a.top() && cy < a.bottom();
            bool in_b = cx > b.left() && cx < b.right() && cy > b.top() && cy < b.bottom();
            inter += in_a && in_b ? 1 : 0;
            uni += in_a || in_b ? 1 : 0;
        }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Box2D lattice_box(RngStream& s) {
    double x0 = static_cast<double>(s.uniform_int(0, 30));
    double y0 = static_cast<double>(s.uniform_int(0, 30));
    double w = static_cast<double>(s.uniform_int(1, 12));
    double h = static_cast<double>(s.uniform_int(1, 12));
    return {x0 + 0.5 * w, y0 + 0.5 * h, w, h};
}

}  // namespace

TEST_CASE("iou_2d agrees with the pixel-grid counting oracle") {
    RngStream s(42);
    for (int i = 0; i < 1000; ++i) {
        Box2D a = lattice_box(s);
        Box2D b = lattice_box(s);
        CHECK(std::abs(iou_2d(a, b) - iou_oracle(a, b)) < 1e-6);
    }
}

TEST_CASE("iou_2d handles the known quarter-overlap example") {
    Box2D a{5.0, 5.0, 10.0, 10.0};
    Box2D b{10.0, 10.0, 10.0, 10.0};  // overlap 5x5=25, union 175
    CHECK(iou_2d(a, b) == doctest::Approx(25.0 / 175.0).epsilon(1e-12));
    CHECK(iou_2d(a, a) == doctest::Approx(1.0));
    CHECK(iou_2d(a, Box2D{100.0, 100.0, 4.0, 4.0}) == 0.0);
}

TEST_CASE("iou_1d properties hold on an exhaustive grid") {
    // all integer intervals [lo, lo+len) with lo in 0..24, len in 0..15 -> 1e4+ pairs
    for (int lo_a = 0; lo_a < 10; ++lo_a)
        for (int len_a = 0; len_a < 10; ++len_a)
            for (int lo_b = 0; lo_b < 10; ++lo_b)
                for (int len_b = 0; len_b < 10; ++len_b) {
                    Interval1D a{static_cast<double>(lo_a), static_cast<double>(lo_a + len_a)};
                    Interval1D b{static_cast<double>(lo_b), static_cast<double>(lo_b + len_b)};
                    double ab = iou_1d(a, b);
                    CHECK(ab == iou_1d(b, a));  // symmetry
                    CHECK(ab >= 0.0);
                    CHECK(ab <= 1.0);
                    if (len_a > 0) CHECK(iou_1d(a, a) == 1.0);  // identity
                    if (lo_a + len_a <= lo_b || lo_b + len_b <= lo_a)
                        CHECK(ab == 0.0);  // disjoint (touching counts as disjoint)
                }
}

TEST_CASE("slices_overlapping_box uses half-open 1-indexed spans") {
    ImageGrid grid;  // 1600 x 900, 160 slices of width 10
    CHECK(slices_overlapping_box({20.0, 450.0, 10.0, 100.0}, grid) ==
          std::vector<int>{2, 3});  // [15, 25)
    // boundary-aligned box [10, 20] touches slice 3 with zero length
    CHECK(slices_overlapping_box({15.0, 450.0, 10.0, 100.0}, grid) == std::vector<int>{2});
    CHECK(slices_overlapping_box({-50.0, 450.0, 10.0, 100.0}, grid).empty());
    CHECK(slices_overlapping_box({1650.0, 450.0, 10.0, 100.0}, grid).empty());
    // clamped at the right edge
    CHECK(slices_overlapping_box({1600.0, 450.0, 20.0, 100.0}, grid) == std::vector<int>{160});
    // full-width box touches every slice
    CHECK(slices_overlapping_box({800.0, 450.0, 1600.0, 100.0}, grid).size() == 160);
}

TEST_CASE("occupancy_from_gt marks exactly the overlapped slices") {
    ImageGrid grid;
    auto t = occupancy_from_gt({{20.0, 450.0, 10.0, 100.0}, {100.0, 450.0, 5.0, 50.0}}, grid);
    REQUIRE(t.size() == 160);
    long ones = 0;
    for (auto v : t) ones += v;
    CHECK(ones == 4);  // slices 2,3 and 10,11 ([97.5, 102.5) straddles a boundary)
    CHECK(t[1] == 1);
    CHECK(t[2] == 1);
    CHECK(t[9] == 1);
    CHECK(t[10] == 1);
}

TEST_CASE("project_to_image matches the pinhole formulas and rejects bad range") {
    ImageGrid grid;
    CameraModel cam;  // f=800, height 0.5, horizon 450
    auto [col, row] = project_to_image(4.0, 80.0, cam, grid);
    CHECK(col == doctest::Approx(800.0 + 800.0 * 4.0 / 80.0));
    CHECK(row == doctest::Approx(450.0 + 800.0 * 0.5 / 80.0));
    CHECK_THROWS_AS(project_to_image(0.0, 0.0, cam, grid), DomainError);
    CHECK_THROWS_AS(project_to_image(0.0, -3.0, cam, grid), DomainError);
}

TEST_CASE("nms keeps the A-C pair in an A-B-C chain") {
    // B overlaps A and C; A and C are disjoint. A suppresses B, C survives.
    std::vector<ScoredBox> boxes{
        {{10.0, 10.0, 10.0, 10.0}, 0.9},   // A
        {{16.0, 10.0, 10.0, 10.0}, 0.8},   // B, IoU(A,B) = 4/16 = 0.25
        {{22.0, 10.0, 10.0, 10.0}, 0.7},   // C, IoU(B,C) = 0.25, IoU(A,C) = 0
    };
    auto kept = nms(boxes, 0.2);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].score == 0.9);
    CHECK(kept[1].score == 0.7);
}

TEST_CASE("nms breaks score ties by input order and is idempotent") {
    std::vector<ScoredBox> boxes{
        {{10.0, 10.0, 10.0, 10.0}, 0.5},
        {{11.0, 10.0, 10.0, 10.0}, 0.5},
    };
    auto kept = nms(boxes, 0.5);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].box.cx == 10.0);
    auto again = nms(kept, 0.5);
    CHECK(again.size() == kept.size());
}

TEST_CASE("nms property: no kept pair overlaps at or above the threshold") {
    RngStream s(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ScoredBox> boxes;
        int n = s.uniform_int(1, 20);
        for (int i = 0; i < n; ++i)
            boxes.push_back({lattice_box(s), s.uniform()});
        auto kept = nms(boxes, 0.3);
        CHECK(kept.size() <= boxes.size());
        for (std::size_t i = 0; i < kept.size(); ++i)
            for (std::size_t j = i + 1; j < kept.size(); ++j)
                CHECK(iou_2d(kept[i].box, kept[j].box) < 0.3);
    }
}

TEST_CASE("ImageGrid validation rejects non-divisible widths") {
    ImageGrid g;
    g.width_px = 1601;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = ImageGrid{};
    g.n_slices = 0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    CHECK_NOTHROW(ImageGrid{}.validate());
}
