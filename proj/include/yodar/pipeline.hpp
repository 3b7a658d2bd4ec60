#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "yodar/evaluate.hpp"
#include "yodar/fusion.hpp"
#include "yodar/gbm.hpp"
#include "yodar/geometry.hpp"
#include "yodar/radarnet.hpp"
#include "yodar/synth.hpp"

namespace yodar {

// Union of every stage's knobs; parsed from a single JSON document with
// strict unknown-key rejection.
struct RunConfig {
    std::uint64_t seed = 1;
    ImageGrid grid;
    CameraModel cam;

    int train_scenes = 600;
    int val_scenes = 100;
    int test_scenes = 200;
    double train_night_fraction = 0.09;
    WorldConfig world;  // template; n_scenes / night / seed set per split

    CameraSimConfig camera_sim;
    RadarSimConfig radar_sim;
    TrainSchedule radar_train;
    NetConfig net;
    BoostConfig boost;
    FusionConfig fusion;

    double t_g = 0.5;                    // radar slice threshold
    double camera_default_thresh = 0.5;  // camera-only operating point
    double eval_iou = 0.5;
    double bin_width_m = 10.0;

    void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Candidates at or above the low threshold t_f on z * p_vehicle.
std::vector<CandidateBox> prefilter_candidates(const std::vector<CandidateBox>& cands, double t_f);

// One row per surviving candidate, scene order then candidate order.
std::vector<LabeledExample> build_training_set(const std::vector<Scene>& scenes,
                                               const RadarNet& net, const FusionConfig& cfg,
                                               const ImageGrid& grid);

// The three detectors of the comparison, per scene. camera_all carries every
// prefiltered candidate post-NMS with raw scores (input to the FP study);
// camera is camera_all cut at the default threshold.
struct DetectorSet {
    std::vector<EvalScene> radar;
    std::vector<EvalScene> camera;
    std::vector<EvalScene> camera_all;
    std::vector<EvalScene> fused;
};

DetectorSet build_detectors(const std::vector<Scene>& scenes, const RadarNet& net,
                            const Ensemble& ensemble, const RunConfig& cfg);

struct DetectorSummary {
    std::string name;
    double map = 0.0;
    double accuracy = 0.0;
    long tp = 0, fp = 0, fn = 0;
};

struct EvalOutput {
    std::vector<DetectorSummary> detectors;  // radar, camera, fused
    BinCounts bins_radar, bins_camera, bins_fused;
    std::vector<FpStudyRow> fp_study;
};

void cmd_gen_data(const RunConfig& cfg, const std::string& out_dir);
void cmd_train_radar(const std::string& world_path, const RunConfig& cfg,
                     const std::string& out_dir);
void cmd_train_fusion(const std::string& world_path, const std::string& weights_path,
                      const RunConfig& cfg, const std::string& out_dir);
EvalOutput cmd_eval(const std::string& world_path, const std::string& weights_path,
                    const std::string& ensemble_path, const RunConfig& cfg,
                    const std::string& out_dir);
void cmd_report(const std::string& run_dir);

}  // namespace yodar
