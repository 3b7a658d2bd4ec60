#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "yodar/errors.hpp"
#include "yodar/gbm.hpp"
#include "yodar/rng.hpp"
#include "yodar/store.hpp"
#include "yodar/synth.hpp"

using namespace yodar;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        auto nonce = static_cast<std::uint64_t>(
            std::chrono::steady_clock::now().time_since_epoch().count());
        path = fs::temp_directory_path() /
               ("yodar_store_test_" + std::to_string(RngStream(nonce).next_u64() % 1000000));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

void corrupt_header_version(const std::string& path, int version) {
    std::ifstream in(path, std::ios::binary);
    std::string first, rest, line;
    std::getline(in, first);
    while (std::getline(in, line)) rest += line + "\n";
    in.close();
    auto pos = first.find("\"version\":");
    REQUIRE(pos != std::string::npos);
    auto end = first.find_first_of(",}", pos + 10);
    first = first.substr(0, pos + 10) + std::to_string(version) + first.substr(end);
    std::ofstream out(path, std::ios::binary);
    out << first << "\n" << rest;
}

}  // namespace

TEST_CASE("world round-trips bit-exactly") {
    TempDir dir;
    WorldConfig w;
    w.n_scenes = 6;
    w.seed = 9;
    auto scenes = generate_world(w, CameraSimConfig{}, RadarSimConfig{}, CameraModel{}, ImageGrid{});
    std::string p = dir.file("world.jsonl");
    save_world(scenes, p, config_digest("test"));
    auto loaded = load_world(p);
    REQUIRE(loaded.size() == scenes.size());
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        CHECK(loaded[i].id == scenes[i].id);
        CHECK(loaded[i].night == scenes[i].night);
        REQUIRE(loaded[i].gt.size() == scenes[i].gt.size());
        for (std::size_t g = 0; g < scenes[i].gt.size(); ++g) {
            CHECK(loaded[i].gt[g].range_m == scenes[i].gt[g].range_m);  // bit-exact
            CHECK(loaded[i].gt[g].box.cx == scenes[i].gt[g].box.cx);
            CHECK(loaded[i].gt[g].radar_observed == scenes[i].gt[g].radar_observed);
        }
        REQUIRE(loaded[i].cands.size() == scenes[i].cands.size());
        for (std::size_t c = 0; c < scenes[i].cands.size(); ++c) {
            CHECK(loaded[i].cands[c].z == scenes[i].cands[c].z);
            CHECK(loaded[i].cands[c].p_vehicle == scenes[i].cands[c].p_vehicle);
        }
        REQUIRE(loaded[i].radar_frames.size() == scenes[i].radar_frames.size());
        for (std::size_t f = 0; f < scenes[i].radar_frames.size(); ++f)
            for (std::size_t pt = 0; pt < scenes[i].radar_frames[f].size(); ++pt)
                CHECK(loaded[i].radar_frames[f][pt].range_m ==
                      scenes[i].radar_frames[f][pt].range_m);
    }
    // saving the loaded world reproduces the file byte for byte
    std::string p2 = dir.file("world2.jsonl");
    save_world(loaded, p2, config_digest("test"));
    CHECK(read_text_file(p) == read_text_file(p2));
}

TEST_CASE("weights round-trip bit-exactly and rebuild the same function") {
    TempDir dir;
    NetConfig cfg;
    cfg.n_s = 8;
    cfg.base_channels = 4;
    RadarNet net(cfg);
    net.init_weights(4);
    net.feat_mean = {1.0, 2.0, 3.0, 4.0};
    net.feat_std = {0.5, 1.5, 2.5, 3.5};
    std::string p = dir.file("w.json");
    save_weights(net, p, config_digest("w"));
    RadarNet back = load_weights(p);
    CHECK(back.config().n_s == 8);
    CHECK(back.feat_mean == net.feat_mean);
    RadarTensor x(8, 3, 4);
    RngStream s(2);
    for (double& v : x.data) v = s.uniform(-1.0, 1.0);
    CHECK(back.infer(x) == net.infer(x));  // bit-identical outputs
    std::string p2 = dir.file("w2.json");
    save_weights(back, p2, config_digest("w"));
    CHECK(read_text_file(p) == read_text_file(p2));
}

TEST_CASE("ensemble round-trips bit-exactly") {
    TempDir dir;
    RngStream s(6);
    std::vector<std::vector<double>> xs;
    std::vector<std::uint8_t> ys;
    for (int i = 0; i < 120; ++i) {
        std::vector<double> row;
        for (int f = 0; f < 9; ++f) row.push_back(s.uniform());
        ys.push_back(row[0] + row[7] > 1.0 ? 1 : 0);
        xs.push_back(std::move(row));
    }
    BoostConfig cfg;
    cfg.n_rounds = 25;
    Ensemble e = fit(xs, ys, cfg);
    std::string p = dir.file("e.json");
    save_ensemble(e, p, config_digest("e"));
    Ensemble back = load_ensemble(p);
    CHECK(back.base_score == e.base_score);
    CHECK(back.trees.size() == e.trees.size());
    for (const auto& row : xs)
        CHECK(predict_proba(back, row) == predict_proba(e, row));
    std::string p2 = dir.file("e2.json");
    save_ensemble(back, p2, config_digest("e"));
    CHECK(read_text_file(p) == read_text_file(p2));
}

TEST_CASE("loaders reject wrong schemas and newer versions") {
    TempDir dir;
    WorldConfig w;
    w.n_scenes = 1;
    auto scenes = generate_world(w, CameraSimConfig{}, RadarSimConfig{}, CameraModel{}, ImageGrid{});
    std::string p = dir.file("world.jsonl");
    save_world(scenes, p, "d");

    CHECK_THROWS_AS(load_weights(p), DataError);  // wrong schema name
    corrupt_header_version(p, kWorldSchemaVersion + 1);
    CHECK_THROWS_AS(load_world(p), DataError);  // version from the future

    std::string garbled = dir.file("bad.jsonl");
    write_text_file(garbled, "{\"schema\":\"yodar.world\",\"version\":1,\"digest\":\"x\"}\n{oops\n");
    CHECK_THROWS_AS(load_world(garbled), DataError);
    CHECK_THROWS_AS(load_world(dir.file("missing.jsonl")), DataError);
}

TEST_CASE("format_double survives a parse round-trip") {
    RngStream s(14);
    for (int i = 0; i < 200; ++i) {
        double v = (s.uniform() - 0.5) * std::pow(10.0, s.uniform_int(-12, 12));
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("config_digest is a stable pure function") {
    CHECK(config_digest("abc") == config_digest("abc"));
    CHECK(config_digest("abc") != config_digest("abd"));
    CHECK(config_digest("").size() == 16);
}
