#include "yodar/synth.hpp"

#include <algorithm>
#include <cmath>

#include "yodar/errors.hpp"

namespace yodar {

namespace {

constexpr double kRadarFrameDt = 1.0 / 13.0;  // 13 Hz capture rate

Box2D project_vehicle_box(double lateral_m, double range_m, double width_m, double height_m,
                          const CameraModel& cam, const ImageGrid& grid) {
    auto [col, row] = project_to_image(lateral_m, range_m, cam, grid);
    double w_px = width_m * cam.focal_px / range_m;
    double h_px = height_m * cam.focal_px / range_m;
    // projected row is the ground contact line, so the box sits on it
    return {col, row - 0.5 * h_px, w_px, h_px};
}

}  // namespace

void WorldConfig::validate() const {
    if (n_scenes < 0) throw ConfigError("WorldConfig: n_scenes must be >= 0");
    if (vehicles_min < 0 || vehicles_max < vehicles_min)
        throw ConfigError("WorldConfig: empty vehicles_per_scene range");
    if (!(dist_min_m > 0.0 && dist_max_m >= dist_min_m))
        throw ConfigError("WorldConfig: empty distance range");
    if (lat_max_m < lat_min_m) throw ConfigError("WorldConfig: empty lateral range");
    if (!(moving_fraction >= 0.0 && moving_fraction <= 1.0))
        throw ConfigError("WorldConfig: moving_fraction in [0,1]");
}

void CameraSimConfig::validate() const {
    for (double p : {base_recall, night_recall_penalty, miss_emit_prob})
        if (p < 0.0 || p > 1.0) throw ConfigError("CameraSimConfig: probabilities in [0,1]");
    if (fp_rate_per_scene < 0.0) throw ConfigError("CameraSimConfig: fp_rate_per_scene >= 0");
}

void RadarSimConfig::validate() const {
    for (double p : {detect_prob_moving, detect_prob_static})
        if (p < 0.0 || p > 1.0) throw ConfigError("RadarSimConfig: probabilities in [0,1]");
    if (points_max < points_min || clutter_max < clutter_min)
        throw ConfigError("RadarSimConfig: empty point-count range");
}

double camera_emit_prob(const CameraSimConfig& cfg, double range_m, bool night) {
    double p = cfg.base_recall * (1.0 - cfg.recall_decay_per_m * range_m);
    if (night) p *= 1.0 - cfg.night_recall_penalty;
    return std::clamp(p, 0.05, 1.0);
}

namespace {

CandidateBox make_candidate(Box2D box, double product_score, double jitter_px, RngStream& s) {
    if (jitter_px > 0.0) {
        box.cx += s.normal(0.0, jitter_px);
        box.cy += s.normal(0.0, jitter_px);
        box.w = std::max(2.0, box.w + s.normal(0.0, jitter_px));
        box.h = std::max(2.0, box.h + s.normal(0.0, jitter_px));
    }
    CandidateBox c;
    c.box = box;
    c.p_vehicle = std::clamp(s.normal(0.9, 0.05), 0.5, 0.999);
    c.z = std::clamp(product_score / c.p_vehicle, 0.01, 1.0);
    return c;
}

}  // namespace

std::vector<CandidateBox> simulate_camera_detector(const Scene& scene, const CameraSimConfig& cfg,
                                                   const CameraModel& cam, const ImageGrid& grid,
                                                   const WorldConfig& world, RngStream stream,
                                                   std::vector<int>* origin) {
    std::vector<CandidateBox> out;
    for (std::size_t vi = 0; vi < scene.gt.size(); ++vi) {
        const GroundTruthVehicle& v = scene.gt[vi];
        RngStream s = stream.child("vehicle").child(vi);
        double p_emit = camera_emit_prob(cfg, v.range_m, scene.night);
        if (s.bernoulli(p_emit)) {
            double score = std::clamp(s.normal(cfg.score_tp_mean, cfg.score_tp_std), 0.05, 0.999);
            out.push_back(make_candidate(v.box, score, cfg.box_jitter_px, s));
            if (origin) origin->push_back(0);
        } else if (s.bernoulli(cfg.miss_emit_prob)) {
            double score = s.uniform(0.05, 0.25);
            out.push_back(make_candidate(v.box, score, cfg.box_jitter_px, s));
            if (origin) origin->push_back(1);
        }
    }
    RngStream fs = stream.child("fp");
    int n_fp = fs.poisson(cfg.fp_rate_per_scene);
    double frustum = 0.5 * grid.width_px / cam.focal_px;
    for (int i = 0; i < n_fp; ++i) {
        double range = fs.uniform(world.dist_min_m, world.dist_max_m);
        double lateral = fs.uniform(-0.85, 0.85) * frustum * range;
        double wm = 1.8 * fs.uniform(0.7, 1.4);
        double hm = 1.5 * fs.uniform(0.7, 1.4);
        Box2D box = project_vehicle_box(lateral, range, wm, hm, cam, grid);
        double score = std::clamp(fs.normal(cfg.score_fp_mean, cfg.score_fp_std), 0.05, 0.999);
        out.push_back(make_candidate(box, score, cfg.box_jitter_px, fs));
        if (origin) origin->push_back(2);
    }
    return out;
}

std::vector<std::vector<RadarPoint>> simulate_radar(Scene& scene, const RadarSimConfig& cfg,
                                                    const CameraModel& cam, const ImageGrid& grid,
                                                    RngStream stream, int n_t) {
    std::vector<std::vector<RadarPoint>> frames(static_cast<std::size_t>(n_t));
    double frustum = 0.5 * grid.width_px / cam.focal_px;
    for (int f = 0; f < n_t; ++f) {
        RngStream fstream = stream.child("frame").child(static_cast<std::uint64_t>(f));
        double age = (n_t - 1 - f) * kRadarFrameDt;
        for (std::size_t vi = 0; vi < scene.gt.size(); ++vi) {
            GroundTruthVehicle& v = scene.gt[vi];
            RngStream vs = fstream.child("vehicle").child(vi);
            bool moving = std::abs(v.speed_long) + std::abs(v.speed_lat) > 1e-9;
            double p = moving ? cfg.detect_prob_moving : cfg.detect_prob_static;
            double range_f = v.range_m - v.speed_long * age;
            double lat_f = v.lateral_m - v.speed_lat * age;
            if (range_f <= 1.0 || range_f > cfg.max_range_m) continue;
            if (!vs.bernoulli(p)) continue;
            v.radar_observed = true;
            int k = vs.uniform_int(cfg.points_min, cfg.points_max);
            for (int j = 0; j < k; ++j) {
                double r = std::max(1.0, range_f + vs.normal(0.0, cfg.range_noise_m));
                // returns scatter across the vehicle body
                double lat = lat_f + vs.uniform(-0.5, 0.5) * v.width_m;
                auto [col, row] = project_to_image(lat, r, cam, grid);
                RadarPoint p_out;
                p_out.range_m = r;
                p_out.proj_height_px = row;
                p_out.v_lat = v.speed_lat + vs.normal(0.0, cfg.velocity_noise_mps);
                p_out.v_long = v.speed_long + vs.normal(0.0, cfg.velocity_noise_mps);
                p_out.column_px = col;
                frames[static_cast<std::size_t>(f)].push_back(p_out);
            }
        }
        RngStream cs = fstream.child("clutter");
        int n_clutter = cs.uniform_int(cfg.clutter_min, cfg.clutter_max);
        for (int j = 0; j < n_clutter; ++j) {
            double r = cs.uniform(2.0, cfg.max_range_m);
            double lat = cs.uniform(-0.9, 0.9) * frustum * r;
            auto [col, row] = project_to_image(lat, r, cam, grid);
            RadarPoint p_out;
            p_out.range_m = r;
            p_out.proj_height_px = row;
            p_out.v_lat = cs.normal(0.0, 2.0);
            p_out.v_long = cs.normal(0.0, 2.0);
            p_out.column_px = col;
            frames[static_cast<std::size_t>(f)].push_back(p_out);
        }
    }
    return frames;
}

std::vector<Scene> generate_world(const WorldConfig& cfg, const CameraSimConfig& cam_cfg,
                                  const RadarSimConfig& radar_cfg, const CameraModel& cam,
                                  const ImageGrid& grid, int n_t) {
    cfg.validate();
    cam_cfg.validate();
    radar_cfg.validate();
    grid.validate();

    RngStream root(cfg.seed);
    double frustum = 0.5 * grid.width_px / cam.focal_px;
    std::vector<Scene> scenes;
    scenes.reserve(static_cast<std::size_t>(cfg.n_scenes));
    for (int i = 0; i < cfg.n_scenes; ++i) {
        RngStream ss = root.child("scene").child(static_cast<std::uint64_t>(i));
        Scene scene;
        scene.id = i;
        scene.night = cfg.night_fraction >= 0.0
                          ? ss.child("night").bernoulli(cfg.night_fraction)
                          : cfg.night;
        RngStream vstream = ss.child("vehicles");
        int n_veh = vstream.uniform_int(cfg.vehicles_min, cfg.vehicles_max);
        for (int v = 0; v < n_veh; ++v) {
            RngStream vs = vstream.child(static_cast<std::uint64_t>(v));
            GroundTruthVehicle g;
            g.range_m = vs.uniform(cfg.dist_min_m, cfg.dist_max_m);
            double lat_bound = 0.8 * frustum * g.range_m;
            double lo = std::max(cfg.lat_min_m, -lat_bound);
            double hi = std::min(cfg.lat_max_m, lat_bound);
            g.lateral_m = lo < hi ? vs.uniform(lo, hi) : 0.0;
            if (vs.bernoulli(cfg.moving_fraction)) {
                g.speed_long = (vs.bernoulli(0.5) ? 1.0 : -1.0) * vs.uniform(3.0, 15.0);
                g.speed_lat = vs.normal(0.0, 0.5);
            }
            g.box = project_vehicle_box(g.lateral_m, g.range_m, g.width_m, g.height_m, cam, grid);
            scene.gt.push_back(g);
        }
        scene.radar_frames = simulate_radar(scene, radar_cfg, cam, grid, ss.child("radar"), n_t);
        scene.cands = simulate_camera_detector(scene, cam_cfg, cam, grid, cfg, ss.child("camera"));
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

}  // namespace yodar
