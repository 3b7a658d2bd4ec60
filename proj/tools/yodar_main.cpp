#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "yodar/errors.hpp"
#include "yodar/pipeline.hpp"
#include "yodar/store.hpp"

namespace {

yodar::RunConfig load_config(const std::string& config_path, long long seed_override) {
    yodar::RunConfig cfg =
        config_path.empty() ? yodar::RunConfig{} : yodar::load_run_config(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vehicle detection pipeline: synthetic data, radar segmentation, "
                 "camera/radar fusion, evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "run";
    long long seed_override = -1;
    app.add_option("--config", config_path, "JSON run configuration")->capture_default_str();
    app.add_option("--out", out_dir, "run directory for artifacts")->capture_default_str();
    app.add_option("--seed", seed_override, "override the config seed")->capture_default_str();

    CLI::App* gen = app.add_subcommand("gen-data", "generate the train/val/test worlds");
    CLI::App* train_radar =
        app.add_subcommand("train-radar", "train the radar slice segmentation network");
    CLI::App* train_fusion =
        app.add_subcommand("train-fusion", "fit the TP/FP meta-classifier on the val split");
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate all detectors on the test split");
    CLI::App* report = app.add_subcommand("report", "assemble report/index.md from artifacts");
    // lets --config/--out/--seed appear after the subcommand name
    for (CLI::App* sub : {gen, train_radar, train_fusion, eval_cmd, report}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            yodar::cmd_gen_data(load_config(config_path, seed_override), out_dir);
        } else if (train_radar->parsed()) {
            yodar::cmd_train_radar(out_dir + "/world_train.jsonl",
                                   load_config(config_path, seed_override), out_dir);
        } else if (train_fusion->parsed()) {
            yodar::cmd_train_fusion(out_dir + "/world_val.jsonl", out_dir + "/radar_weights.json",
                                    load_config(config_path, seed_override), out_dir);
        } else if (eval_cmd->parsed()) {
            yodar::cmd_eval(out_dir + "/world_test.jsonl", out_dir + "/radar_weights.json",
                            out_dir + "/ensemble.json", load_config(config_path, seed_override),
                            out_dir);
        } else if (report->parsed()) {
            yodar::cmd_report(out_dir);
        }
    } catch (const yodar::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const yodar::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const yodar::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
