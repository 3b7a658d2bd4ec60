#include "yodar/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>

#include "yodar/errors.hpp"
#include "yodar/parallel.hpp"
#include "yodar/rng.hpp"
#include "yodar/store.hpp"
#include "yodar/svg.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace yodar {

namespace {

void reject_unknown(const json& j, const std::string& section, const std::set<std::string>& keys) {
    if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in config section '" + section + "'");
}

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
    grid.validate();
    world.validate();
    camera_sim.validate();
    radar_sim.validate();
    radar_train.validate();
    boost.validate();
    fusion.validate();
    if (cam.focal_px <= 0.0) throw ConfigError("camera_model: focal_px must be positive");
    if (!(t_g > 0.0 && t_g < 1.0)) throw ConfigError("t_g must be in (0,1)");
    if (train_night_fraction < 0.0 || train_night_fraction > 1.0)
        throw ConfigError("train_night_fraction must be in [0,1]");
}

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("config parse error: ") + ex.what());
    }
    RunConfig cfg;
    reject_unknown(j, "<root>",
                   {"seed", "grid", "camera_model", "world", "camera_sim", "radar_sim",
                    "radar_train", "boost", "fusion", "eval"});
    get_opt(j, "seed", cfg.seed);
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, "grid", {"width_px", "height_px", "n_slices"});
        get_opt(g, "width_px", cfg.grid.width_px);
        get_opt(g, "height_px", cfg.grid.height_px);
        get_opt(g, "n_slices", cfg.grid.n_slices);
    }
    if (j.contains("camera_model")) {
        const json& c = j["camera_model"];
        reject_unknown(c, "camera_model", {"focal_px", "cam_height", "horizon_row"});
        get_opt(c, "focal_px", cfg.cam.focal_px);
        get_opt(c, "cam_height", cfg.cam.cam_height);
        get_opt(c, "horizon_row", cfg.cam.horizon_row);
    }
    if (j.contains("world")) {
        const json& w = j["world"];
        reject_unknown(w, "world",
                       {"train_scenes", "val_scenes", "test_scenes", "train_night_fraction",
                        "vehicles_min", "vehicles_max", "dist_min_m", "dist_max_m", "lat_min_m",
                        "lat_max_m", "moving_fraction"});
        get_opt(w, "train_scenes", cfg.train_scenes);
        get_opt(w, "val_scenes", cfg.val_scenes);
        get_opt(w, "test_scenes", cfg.test_scenes);
        get_opt(w, "train_night_fraction", cfg.train_night_fraction);
        get_opt(w, "vehicles_min", cfg.world.vehicles_min);
        get_opt(w, "vehicles_max", cfg.world.vehicles_max);
        get_opt(w, "dist_min_m", cfg.world.dist_min_m);
        get_opt(w, "dist_max_m", cfg.world.dist_max_m);
        get_opt(w, "lat_min_m", cfg.world.lat_min_m);
        get_opt(w, "lat_max_m", cfg.world.lat_max_m);
        get_opt(w, "moving_fraction", cfg.world.moving_fraction);
    }
    if (j.contains("camera_sim")) {
        const json& c = j["camera_sim"];
        reject_unknown(c, "camera_sim",
                       {"base_recall", "recall_decay_per_m", "night_recall_penalty",
                        "score_tp_mean", "score_tp_std", "score_fp_mean", "score_fp_std",
                        "fp_rate_per_scene", "box_jitter_px", "miss_emit_prob"});
        get_opt(c, "base_recall", cfg.camera_sim.base_recall);
        get_opt(c, "recall_decay_per_m", cfg.camera_sim.recall_decay_per_m);
        get_opt(c, "night_recall_penalty", cfg.camera_sim.night_recall_penalty);
        get_opt(c, "score_tp_mean", cfg.camera_sim.score_tp_mean);
        get_opt(c, "score_tp_std", cfg.camera_sim.score_tp_std);
        get_opt(c, "score_fp_mean", cfg.camera_sim.score_fp_mean);
        get_opt(c, "score_fp_std", cfg.camera_sim.score_fp_std);
        get_opt(c, "fp_rate_per_scene", cfg.camera_sim.fp_rate_per_scene);
        get_opt(c, "box_jitter_px", cfg.camera_sim.box_jitter_px);
        get_opt(c, "miss_emit_prob", cfg.camera_sim.miss_emit_prob);
    }
    if (j.contains("radar_sim")) {
        const json& r = j["radar_sim"];
        reject_unknown(r, "radar_sim",
                       {"detect_prob_moving", "detect_prob_static", "max_range_m", "range_noise_m",
                        "velocity_noise_mps", "points_min", "points_max", "clutter_min",
                        "clutter_max"});
        get_opt(r, "detect_prob_moving", cfg.radar_sim.detect_prob_moving);
        get_opt(r, "detect_prob_static", cfg.radar_sim.detect_prob_static);
        get_opt(r, "max_range_m", cfg.radar_sim.max_range_m);
        get_opt(r, "range_noise_m", cfg.radar_sim.range_noise_m);
        get_opt(r, "velocity_noise_mps", cfg.radar_sim.velocity_noise_mps);
        get_opt(r, "points_min", cfg.radar_sim.points_min);
        get_opt(r, "points_max", cfg.radar_sim.points_max);
        get_opt(r, "clutter_min", cfg.radar_sim.clutter_min);
        get_opt(r, "clutter_max", cfg.radar_sim.clutter_max);
    }
    if (j.contains("radar_train")) {
        const json& t = j["radar_train"];
        reject_unknown(t, "radar_train",
                       {"phases", "batch_size", "weight_decay", "alpha", "base_channels"});
        if (t.contains("phases")) {
            cfg.radar_train.phases.clear();
            for (const json& p : t["phases"])
                cfg.radar_train.phases.push_back({p.at(0).get<int>(), p.at(1).get<double>()});
        }
        get_opt(t, "batch_size", cfg.radar_train.batch_size);
        get_opt(t, "weight_decay", cfg.radar_train.weight_decay);
        get_opt(t, "alpha", cfg.radar_train.alpha);
        get_opt(t, "base_channels", cfg.net.base_channels);
    }
    if (j.contains("boost")) {
        const json& b = j["boost"];
        reject_unknown(b, "boost",
                       {"n_rounds", "max_depth", "shrinkage", "subsample", "min_leaf"});
        get_opt(b, "n_rounds", cfg.boost.n_rounds);
        get_opt(b, "max_depth", cfg.boost.max_depth);
        get_opt(b, "shrinkage", cfg.boost.shrinkage);
        get_opt(b, "subsample", cfg.boost.subsample);
        get_opt(b, "min_leaf", cfg.boost.min_leaf);
    }
    if (j.contains("fusion")) {
        const json& f = j["fusion"];
        reject_unknown(f, "fusion", {"t_f", "t_fuse", "t_iou_label", "nms_iou", "t_g"});
        get_opt(f, "t_f", cfg.fusion.t_f);
        get_opt(f, "t_fuse", cfg.fusion.t_fuse);
        get_opt(f, "t_iou_label", cfg.fusion.t_iou_label);
        get_opt(f, "nms_iou", cfg.fusion.nms_iou);
        get_opt(f, "t_g", cfg.t_g);
    }
    if (j.contains("eval")) {
        const json& e = j["eval"];
        reject_unknown(e, "eval", {"camera_default_thresh", "iou", "bin_width_m"});
        get_opt(e, "camera_default_thresh", cfg.camera_default_thresh);
        get_opt(e, "iou", cfg.eval_iou);
        get_opt(e, "bin_width_m", cfg.bin_width_m);
    }
    cfg.grid.validate();
    cfg.net.n_s = cfg.grid.n_slices;
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(read_text_file(path));
}

std::vector<CandidateBox> prefilter_candidates(const std::vector<CandidateBox>& cands, double t_f) {
    std::vector<CandidateBox> out;
    for (const CandidateBox& c : cands)
        if (c.score() >= t_f) out.push_back(c);
    return out;
}

namespace {

SliceProbs scene_slice_probs(const Scene& scene, const RadarNet& net, const ImageGrid& grid) {
    return net.infer(
        build_input_tensor(scene.radar_frames, grid, net.config().n_t, net.config().n_f));
}

std::vector<SliceProbs> all_slice_probs(const std::vector<Scene>& scenes, const RadarNet& net,
                                        const ImageGrid& grid) {
    std::vector<SliceProbs> probs(scenes.size());
    parallel_for(scenes.size(), [&](std::size_t i) {
        probs[i] = scene_slice_probs(scenes[i], net, grid);
    });
    return probs;
}

std::string run_config_fingerprint(const RunConfig& cfg, const std::string& tag) {
    return config_digest(tag + ":" + std::to_string(cfg.seed));
}

}  // namespace

std::vector<LabeledExample> build_training_set(const std::vector<Scene>& scenes,
                                               const RadarNet& net, const FusionConfig& cfg,
                                               const ImageGrid& grid) {
    std::vector<SliceProbs> probs = all_slice_probs(scenes, net, grid);
    std::vector<LabeledExample> rows;
    for (std::size_t si = 0; si < scenes.size(); ++si) {
        const Scene& scene = scenes[si];
        std::vector<CandidateBox> cands = prefilter_candidates(scene.cands, cfg.t_f);
        std::vector<Box2D> gt_boxes;
        for (const GroundTruthVehicle& v : scene.gt) gt_boxes.push_back(v.box);
        std::vector<bool> labels = label_candidates(cands, gt_boxes, cfg.t_iou_label);
        for (std::size_t bi = 0; bi < cands.size(); ++bi) {
            LabeledExample ex;
            ex.features = build_features(cands[bi], probs[si], grid);
            ex.is_tp = labels[bi];
            ex.scene_id = scene.id;
            ex.box_id = static_cast<int>(bi);
            rows.push_back(std::move(ex));
        }
    }
    return rows;
}

DetectorSet build_detectors(const std::vector<Scene>& scenes, const RadarNet& net,
                            const Ensemble& ensemble, const RunConfig& cfg) {
    std::vector<SliceProbs> probs = all_slice_probs(scenes, net, cfg.grid);
    DetectorSet out;
    out.radar.resize(scenes.size());
    out.camera.resize(scenes.size());
    out.camera_all.resize(scenes.size());
    out.fused.resize(scenes.size());
    double sw = cfg.grid.slice_width();
    for (std::size_t si = 0; si < scenes.size(); ++si) {
        const Scene& scene = scenes[si];
        EvalScene base;
        for (const GroundTruthVehicle& v : scene.gt) {
            base.gt_boxes.push_back(v.box);
            base.gt_ranges.push_back(v.range_m);
        }

        // radar-only: slice bundles lifted to full-height boxes scored by
        // mean bundle probability
        EvalScene radar = base;
        for (const SliceBundle& bnd : extract_bundles(probs[si], cfg.t_g)) {
            double lo = (bnd.first - 1) * sw;
            double hi = bnd.last * sw;
            double mean = 0.0;
            for (int s = bnd.first; s <= bnd.last; ++s)
                mean += probs[si][static_cast<std::size_t>(s - 1)];
            mean /= static_cast<double>(bnd.last - bnd.first + 1);
            radar.dets.push_back({{0.5 * (lo + hi), cfg.grid.height_px / 2.0, hi - lo,
                                   static_cast<double>(cfg.grid.height_px)},
                                  mean});
        }

        std::vector<CandidateBox> cands = prefilter_candidates(scene.cands, cfg.fusion.t_f);

        EvalScene camera_all = base;
        {
            std::vector<ScoredBox> scored;
            for (const CandidateBox& c : cands) scored.push_back({c.box, c.score()});
            camera_all.dets = nms(scored, cfg.fusion.nms_iou);
        }
        EvalScene camera = base;
        for (const ScoredBox& d : camera_all.dets)
            if (d.score >= cfg.camera_default_thresh) camera.dets.push_back(d);

        EvalScene fused = base;
        fused.dets = fuse_scene(cands, probs[si], ensemble, cfg.fusion, cfg.grid);

        out.radar[si] = std::move(radar);
        out.camera[si] = std::move(camera);
        out.camera_all[si] = std::move(camera_all);
        out.fused[si] = std::move(fused);
    }
    return out;
}

void cmd_gen_data(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    RngStream root(cfg.seed);

    struct Split {
        const char* name;
        int n_scenes;
        double night_fraction;  // -1 means flat night
        bool night;
    };
    const Split splits[] = {
        {"train", cfg.train_scenes, cfg.train_night_fraction, false},
        {"val", cfg.val_scenes, cfg.train_night_fraction, false},
        {"test", cfg.test_scenes, -1.0, true},  // night-only test split
    };

    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["created_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();
    for (const Split& split : splits) {
        if (split.n_scenes <= 0) throw ConfigError(std::string("empty split: ") + split.name);
        WorldConfig w = cfg.world;
        w.n_scenes = split.n_scenes;
        w.night = split.night;
        w.night_fraction = split.night_fraction;
        w.seed = root.child(split.name).next_u64();
        std::vector<Scene> scenes =
            generate_world(w, cfg.camera_sim, cfg.radar_sim, cfg.cam, cfg.grid, cfg.net.n_t);
        std::string path = out_dir + "/world_" + split.name + ".jsonl";
        save_world(scenes, path, run_config_fingerprint(cfg, split.name));
        long night_count = 0;
        for (const Scene& s : scenes) night_count += s.night ? 1 : 0;
        manifest["splits"][split.name] = {
            {"path", std::string("world_") + split.name + ".jsonl"},
            {"scenes", split.n_scenes},
            {"world_seed", w.seed},
            {"night_fraction", static_cast<double>(night_count) / split.n_scenes}};
    }
    write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

void cmd_train_radar(const std::string& world_path, const RunConfig& cfg,
                     const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    std::vector<Scene> scenes = load_world(world_path);
    std::vector<std::pair<RadarTensor, std::vector<std::uint8_t>>> dataset;
    dataset.reserve(scenes.size());
    for (const Scene& s : scenes) {
        RadarTensor x = build_input_tensor(s.radar_frames, cfg.grid, cfg.net.n_t, cfg.net.n_f);
        // occupancy target restricted to radar-visible vehicles, mirroring the
        // removal of boxes without valid radar returns from the training labels
        std::vector<Box2D> observed;
        for (const GroundTruthVehicle& v : s.gt)
            if (v.radar_observed) observed.push_back(v.box);
        dataset.emplace_back(std::move(x), occupancy_from_gt(observed, cfg.grid));
    }
    RadarNet net(cfg.net);
    TrainSchedule sched = cfg.radar_train;
    sched.seed = RngStream(cfg.seed).child("radar_train").next_u64();
    TrainResult result = train(net, dataset, sched);
    save_weights(net, out_dir + "/radar_weights.json", run_config_fingerprint(cfg, "weights"));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
        rows.push_back({std::to_string(e + 1), format_double(result.epoch_loss[e])});
    write_csv(out_dir + "/radar_loss.csv", {"epoch", "train_loss"}, rows);
}

void cmd_train_fusion(const std::string& world_path, const std::string& weights_path,
                      const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    std::vector<Scene> scenes = load_world(world_path);
    RadarNet net = load_weights(weights_path);
    std::vector<LabeledExample> rows = build_training_set(scenes, net, cfg.fusion, cfg.grid);

    std::vector<std::vector<std::string>> csv_rows;
    std::vector<std::vector<double>> features;
    std::vector<std::uint8_t> labels;
    for (const LabeledExample& ex : rows) {
        std::vector<std::string> r{std::to_string(ex.scene_id), std::to_string(ex.box_id)};
        for (double f : ex.features) r.push_back(format_double(f));
        r.push_back(ex.is_tp ? "1" : "0");
        csv_rows.push_back(std::move(r));
        features.push_back(ex.features);
        labels.push_back(ex.is_tp ? 1 : 0);
    }
    write_csv(out_dir + "/fusion_train.csv",
              {"scene_id", "box_id", "z", "p_vehicle", "cx", "cy", "w", "h", "area", "mu", "sigma",
               "label"},
              csv_rows);

    BoostConfig bc = cfg.boost;
    bc.seed = RngStream(cfg.seed).child("boost").next_u64();
    Ensemble e = fit(features, labels, bc);
    save_ensemble(e, out_dir + "/ensemble.json", run_config_fingerprint(cfg, "ensemble"));
}

EvalOutput cmd_eval(const std::string& world_path, const std::string& weights_path,
                    const std::string& ensemble_path, const RunConfig& cfg,
                    const std::string& out_dir) {
    cfg.validate();
    std::string report_dir = out_dir + "/report";
    fs::create_directories(report_dir);
    std::vector<Scene> scenes = load_world(world_path);
    RadarNet net = load_weights(weights_path);
    Ensemble ensemble = load_ensemble(ensemble_path);
    if (net.config().n_s != cfg.grid.n_slices)
        throw DataError("eval: weights n_s does not match the configured grid");
    if (ensemble.n_features != kNumFusionFeatures)
        throw DataError("eval: ensemble feature arity mismatch");

    DetectorSet det = build_detectors(scenes, net, ensemble, cfg);

    EvalOutput out;
    auto summarize = [&](const std::string& name, const std::vector<EvalScene>& es) {
        DetectorSummary s;
        s.name = name;
        s.map = average_precision(es, cfg.eval_iou);
        for (const EvalScene& sc : es) {
            MatchResult m = match_detections(sc.dets, sc.gt_boxes, cfg.eval_iou);
            s.tp += m.tp();
            s.fp += m.fp();
            s.fn += m.fn();
        }
        s.accuracy = detection_accuracy(s.tp, s.fp, s.fn);
        return s;
    };
    out.detectors.push_back(summarize("radar", det.radar));
    out.detectors.push_back(summarize("camera", det.camera));
    out.detectors.push_back(summarize("fused", det.fused));
    out.bins_radar = distance_binned_recall(det.radar, cfg.eval_iou, cfg.bin_width_m);
    out.bins_camera = distance_binned_recall(det.camera, cfg.eval_iou, cfg.bin_width_m);
    out.bins_fused = distance_binned_recall(det.fused, cfg.eval_iou, cfg.bin_width_m);
    out.fp_study =
        fp_at_matched_tp(det.camera_all, det.fused, cfg.camera_default_thresh, cfg.eval_iou);

    // summary.csv -- accuracy column is named for its formula since the
    // metric has no canonical definition
    {
        std::vector<std::vector<std::string>> rows;
        for (const DetectorSummary& s : out.detectors)
            rows.push_back({s.name, format_double(s.map), format_double(s.accuracy),
                            std::to_string(s.tp), std::to_string(s.fp), std::to_string(s.fn)});
        write_csv(report_dir + "/summary.csv",
                  {"detector", "map", "accuracy_tp_over_tp_fp_fn", "tp", "fp", "fn"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        auto emit = [&](const std::string& name, const BinCounts& bc) {
            for (std::size_t b = 0; b < bc.gt_count.size(); ++b)
                rows.push_back({name, format_double(static_cast<double>(b) * bc.bin_width_m),
                                format_double(static_cast<double>(b + 1) * bc.bin_width_m),
                                std::to_string(bc.gt_count[b]), std::to_string(bc.tp_matched[b]),
                                std::to_string(bc.tp_perbox[b])});
        };
        emit("radar", out.bins_radar);
        emit("camera", out.bins_camera);
        emit("fused", out.bins_fused);
        write_csv(report_dir + "/distance_recall.csv",
                  {"detector", "bin_lo_m", "bin_hi_m", "gt", "tp_matched", "tp_perbox"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const FpStudyRow& r : out.fp_study)
            rows.push_back({r.detector, format_double(r.threshold), std::to_string(r.tp),
                            std::to_string(r.fp), r.matched ? "1" : "0"});
        write_csv(report_dir + "/fp_matched_tp.csv",
                  {"detector", "threshold", "tp", "fp", "matched"}, rows);
    }

    Heatmap hm_gt = heatmap_gt_counts(det.camera, cfg.grid, cfg.bin_width_m);
    Heatmap hm_cam = heatmap_detected_counts(det.camera, cfg.eval_iou, cfg.grid, cfg.bin_width_m);
    Heatmap hm_fused = heatmap_detected_counts(det.fused, cfg.eval_iou, cfg.grid, cfg.bin_width_m);
    Heatmap hm_radar = heatmap_detected_counts(det.radar, cfg.eval_iou, cfg.grid, cfg.bin_width_m);
    Heatmap hm_diff = hm_fused;
    for (std::size_t i = 0; i < hm_diff.cells.size(); ++i) hm_diff.cells[i] -= hm_cam.cells[i];

    auto write_heatmap_csv = [&](const std::string& name, const Heatmap& h) {
        std::vector<std::string> header{"dist_bin_lo_m"};
        for (int c = 0; c < h.n_col_bins; ++c) header.push_back("col_" + std::to_string((c + 1) * 100));
        std::vector<std::vector<std::string>> rows;
        for (int d = 0; d < h.n_dist_bins; ++d) {
            std::vector<std::string> row{format_double(d * cfg.bin_width_m)};
            for (int c = 0; c < h.n_col_bins; ++c) {
                double v = h.at(d, c);
                row.push_back(std::isfinite(v) ? format_double(v) : "");
            }
            rows.push_back(std::move(row));
        }
        write_csv(report_dir + "/" + name + ".csv", header, rows);
    };
    write_heatmap_csv("heatmap_gt", hm_gt);
    write_heatmap_csv("heatmap_recall_camera", heatmap_recall(hm_cam, hm_gt));
    write_heatmap_csv("heatmap_recall_fused", heatmap_recall(hm_fused, hm_gt));
    write_heatmap_csv("heatmap_recall_radar", heatmap_recall(hm_radar, hm_gt));
    write_heatmap_csv("heatmap_diff_fused_minus_camera", hm_diff);

    // SVG figures
    {
        std::vector<std::string> labels;
        for (std::size_t b = 0; b < out.bins_camera.gt_count.size(); ++b)
            labels.push_back(std::to_string(static_cast<long>(b * cfg.bin_width_m)) + "-" +
                             std::to_string(static_cast<long>((b + 1) * cfg.bin_width_m)) + "m");
        auto to_d = [](const std::vector<long>& v) {
            return std::vector<double>(v.begin(), v.end());
        };
        write_text_file(
            report_dir + "/distance_bars.svg",
            svg_grouped_bars({"ground truth", "radar", "camera", "fused"},
                             {to_d(out.bins_camera.gt_count), to_d(out.bins_radar.tp_matched),
                              to_d(out.bins_camera.tp_matched), to_d(out.bins_fused.tp_matched)},
                             labels, "Vehicles recognized by distance (night test split)"));
    }
    write_text_file(report_dir + "/heatmap_gt.svg",
                    svg_heatmap(hm_gt, "Ground-truth spatial distribution"));
    write_text_file(report_dir + "/heatmap_recall_camera.svg",
                    svg_heatmap(heatmap_recall(hm_cam, hm_gt), "Camera recall per cell"));
    write_text_file(report_dir + "/heatmap_diff.svg",
                    svg_heatmap(hm_diff, "Fused minus camera detections per cell", true));
    return out;
}

void cmd_report(const std::string& run_dir) {
    std::string report_dir = run_dir + "/report";
    if (!fs::exists(report_dir + "/summary.csv"))
        throw DataError("report: no evaluation artifacts in " + run_dir);
    std::ostringstream md;
    md << "# Run report\n\n## Detector summary\n\n";
    md << "Accuracy is TP / (TP + FP + FN); the radar-only detector lifts slice bundles to\n"
          "full-height boxes and is evaluated with the same 2D matching rule as the others.\n\n";
    md << "```\n" << read_text_file(report_dir + "/summary.csv") << "```\n\n## Artifacts\n\n";
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(run_dir))
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    for (const auto& entry : fs::directory_iterator(report_dir))
        if (entry.is_regular_file()) names.push_back("report/" + entry.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const std::string& n : names)
        if (n != "report/index.md") md << "- " << n << "\n";
    write_text_file(report_dir + "/index.md", md.str());
}

}  // namespace yodar
