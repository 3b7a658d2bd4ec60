#include <doctest.h>

#include <cmath>

#include "yodar/errors.hpp"
#include "yodar/fusion.hpp"
#include "yodar/rng.hpp"

using namespace yodar;

TEST_CASE("radar_stats_over_box computes mean and population sigma") {
    ImageGrid grid;  // slice width 10
    SliceProbs y(160, 0.0);
    y[1] = 0.2;  // slice 2
    y[2] = 0.8;  // slice 3
    Box2D b{20.0, 450.0, 10.0, 100.0};  // covers slices 2 and 3
    auto [mu, sigma] = radar_stats_over_box(b, y, grid);
    CHECK(mu == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sigma == doctest::Approx(0.3).epsilon(1e-12));

    // a box outside the image overlaps no slice -> (0, 0)
    auto [mu0, sigma0] = radar_stats_over_box({-200.0, 450.0, 10.0, 100.0}, y, grid);
    CHECK(mu0 == 0.0);
    CHECK(sigma0 == 0.0);
}

TEST_CASE("build_features has nine entries in the fixed order with A = w*h") {
    ImageGrid grid;
    SliceProbs y(160, 0.25);
    CandidateBox c{{100.0, 400.0, 40.0, 30.0}, 0.8, 0.9};
    FeatureVector f = build_features(c, y, grid);
    REQUIRE(static_cast<int>(f.size()) == kNumFusionFeatures);
    CHECK(f[0] == 0.8);                                     // z
    CHECK(f[1] == 0.9);                                     // p_vehicle
    CHECK(f[2] == 100.0);                                   // cx
    CHECK(f[3] == 400.0);                                   // cy
    CHECK(f[4] == 40.0);                                    // w
    CHECK(f[5] == 30.0);                                    // h
    CHECK(std::abs(f[6] - 40.0 * 30.0) < 1e-9);             // A
    CHECK(f[7] == doctest::Approx(0.25).epsilon(1e-12));    // mu (constant probs)
    CHECK(f[8] == doctest::Approx(0.0).epsilon(1e-12));     // sigma
}

TEST_CASE("mu stays in [0,1] and sigma in [0,0.5] on random probabilities") {
    ImageGrid grid;
    RngStream s(8);
    for (int trial = 0; trial < 200; ++trial) {
        SliceProbs y(160);
        for (double& v : y) v = s.uniform();
        Box2D b{s.uniform(0.0, 1600.0), 450.0, s.uniform(1.0, 400.0), 100.0};
        auto [mu, sigma] = radar_stats_over_box(b, y, grid);
        CHECK(mu >= 0.0);
        CHECK(mu <= 1.0);
        CHECK(sigma >= 0.0);
        CHECK(sigma <= 0.5 + 1e-12);  // population sigma of values in [0,1]
    }
}

TEST_CASE("label_candidates uses a strict IoU threshold and max over GT") {
    std::vector<CandidateBox> cands{
        {{10.0, 10.0, 10.0, 10.0}, 0.9, 0.9},  // exact match
        {{16.0, 10.0, 10.0, 10.0}, 0.9, 0.9},  // IoU 0.25 with first GT
    };
    std::vector<Box2D> gt{{10.0, 10.0, 10.0, 10.0}};
    auto labels = label_candidates(cands, gt, 0.5);
    CHECK(labels == std::vector<bool>{true, false});
    // IoU exactly at the threshold does not count (strict >)
    std::vector<Box2D> half{{10.0, 10.0, 10.0, 5.0}};  // IoU vs cand 0 = 0.5
    CHECK(label_candidates(cands, half, 0.5)[0] == false);
    // empty GT -> all negative
    CHECK(label_candidates(cands, {}, 0.5) == std::vector<bool>{false, false});
}

TEST_CASE("fuse_scene with a tree-free ensemble reduces to a constant gate") {
    ImageGrid grid;
    SliceProbs y(160, 0.5);
    std::vector<CandidateBox> cands{
        {{100.0, 400.0, 40.0, 30.0}, 0.8, 0.9},
        {{600.0, 400.0, 40.0, 30.0}, 0.4, 0.9},
    };
    FusionConfig cfg;

    Ensemble keep;  // sigmoid(2) ~= 0.88 >= t_fuse
    keep.base_score = 2.0;
    auto kept = fuse_scene(cands, y, keep, cfg, grid);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].score == kept[1].score);  // constant classifier

    Ensemble drop;  // sigmoid(-2) ~= 0.12 < t_fuse
    drop.base_score = -2.0;
    CHECK(fuse_scene(cands, y, drop, cfg, grid).empty());
}

TEST_CASE("fuse_scene suppresses overlapping boxes and sorts by fused score") {
    ImageGrid grid;
    SliceProbs y(160, 0.5);
    std::vector<CandidateBox> cands{
        {{100.0, 400.0, 40.0, 30.0}, 0.8, 0.9},
        {{102.0, 401.0, 40.0, 30.0}, 0.7, 0.9},  // near-duplicate of the first
        {{600.0, 400.0, 40.0, 30.0}, 0.4, 0.9},
    };
    Ensemble keep;
    keep.base_score = 2.0;
    FusionConfig cfg;
    auto kept = fuse_scene(cands, y, keep, cfg, grid);
    REQUIRE(kept.size() == 2);
    for (std::size_t i = 1; i < kept.size(); ++i) CHECK(kept[i - 1].score >= kept[i].score);
}

TEST_CASE("FusionConfig validation") {
    FusionConfig c;
    c.t_fuse = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_NOTHROW(FusionConfig{}.validate());
}
