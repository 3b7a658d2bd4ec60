#pragma once

#include <cstdint>
#include <vector>

#include "yodar/fusion.hpp"
#include "yodar/geometry.hpp"
#include "yodar/radarnet.hpp"
#include "yodar/rng.hpp"

namespace yodar {

struct WorldConfig {
    int n_scenes = 100;
    int vehicles_min = 2;
    int vehicles_max = 7;
    double dist_min_m = 5.0;
    double dist_max_m = 100.0;
    double lat_min_m = -30.0;
    double lat_max_m = 30.0;
    double moving_fraction = 0.6;
    bool night = false;
    // when in [0,1], per-scene Bernoulli overrides the flat night flag
    double night_fraction = -1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CameraSimConfig {
    double base_recall = 0.9;
    double recall_decay_per_m = 0.006;
    double night_recall_penalty = 0.25;
    double score_tp_mean = 0.75;
    double score_tp_std = 0.1;
    double score_fp_mean = 0.25;
    double score_fp_std = 0.12;
    double fp_rate_per_scene = 1.5;
    double box_jitter_px = 3.0;
    // a missed vehicle still surfaces as a low-score candidate this often;
    // these are the boxes fusion exists to rescue
    double miss_emit_prob = 0.5;

    void validate() const;
};

struct RadarSimConfig {
    double detect_prob_moving = 0.7;
    double detect_prob_static = 0.02;
    double max_range_m = 120.0;
    double range_noise_m = 0.5;
    double velocity_noise_mps = 0.3;
    int points_min = 1;
    int points_max = 3;
    int clutter_min = 1;  // per frame
    int clutter_max = 4;

    void validate() const;
};

struct GroundTruthVehicle {
    double lateral_m = 0.0;
    double range_m = 0.0;
    double width_m = 1.8;
    double height_m = 1.5;
    double speed_long = 0.0;  // m/s relative, 0 for parked
    double speed_lat = 0.0;
    bool radar_observed = false;  // any radar return in any frame
    Box2D box;                    // projected image-plane box
};

struct Scene {
    int id = 0;
    bool night = false;
    std::vector<GroundTruthVehicle> gt;
    std::vector<CandidateBox> cands;
    std::vector<std::vector<RadarPoint>> radar_frames;  // oldest -> current
};

// Analytic probability that the camera emits a full-score detection for a
// vehicle; also the reference curve for the recall calibration test.
double camera_emit_prob(const CameraSimConfig& cfg, double range_m, bool night);

// origin, when non-null, records 0 = detected GT, 1 = low-score missed GT,
// 2 = false positive per candidate.
std::vector<CandidateBox> simulate_camera_detector(const Scene& scene,
                                                   const CameraSimConfig& cfg,
                                                   const CameraModel& cam, const ImageGrid& grid,
                                                   const WorldConfig& world, RngStream stream,
                                                   std::vector<int>* origin = nullptr);

// Emits n_t frames of radar points (constant-velocity back-projection at the
// 13 Hz radar frame spacing) and flags the vehicles that produced returns.
std::vector<std::vector<RadarPoint>> simulate_radar(Scene& scene, const RadarSimConfig& cfg,
                                                    const CameraModel& cam, const ImageGrid& grid,
                                                    RngStream stream, int n_t = 3);

std::vector<Scene> generate_world(const WorldConfig& cfg, const CameraSimConfig& cam_cfg,
                                  const RadarSimConfig& radar_cfg, const CameraModel& cam,
                                  const ImageGrid& grid, int n_t = 3);

}  // namespace yodar
