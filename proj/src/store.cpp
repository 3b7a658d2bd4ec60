#include "yodar/store.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "yodar/errors.hpp"
#include "yodar/rng.hpp"

using nlohmann::json;

namespace yodar {

namespace {

json header_json(const std::string& schema, int version, const std::string& digest) {
    return json{{"schema", schema}, {"version", version}, {"digest", digest}};
}

ArtifactHeader parse_header(const std::string& line, const std::string& expected_schema,
                            int max_version, const std::string& path) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& ex) {
        throw DataError(path + ":1: malformed header: " + ex.what());
    }
    ArtifactHeader h;
    h.schema_name = j.value("schema", "");
    h.schema_version = j.value("version", -1);
    h.digest = j.value("digest", "");
    if (h.schema_name != expected_schema)
        throw DataError(path + ": unknown schema '" + h.schema_name + "' (expected '" +
                        expected_schema + "')");
    if (h.schema_version < 1 || h.schema_version > max_version)
        throw DataError(path + ": schema version " + std::to_string(h.schema_version) +
                        " is newer than supported version " + std::to_string(max_version));
    return h;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path);
    return in;
}

json scene_to_json(const Scene& s) {
    json jg = json::array();
    for (const GroundTruthVehicle& v : s.gt)
        jg.push_back({{"lat", v.lateral_m},
                      {"range", v.range_m},
                      {"wm", v.width_m},
                      {"hm", v.height_m},
                      {"vlong", v.speed_long},
                      {"vlat", v.speed_lat},
                      {"radar_obs", v.radar_observed},
                      {"box", {v.box.cx, v.box.cy, v.box.w, v.box.h}}});
    json jc = json::array();
    for (const CandidateBox& c : s.cands)
        jc.push_back({{"box", {c.box.cx, c.box.cy, c.box.w, c.box.h}},
                      {"z", c.z},
                      {"p", c.p_vehicle}});
    json jf = json::array();
    for (const auto& frame : s.radar_frames) {
        json pts = json::array();
        for (const RadarPoint& p : frame)
            pts.push_back({p.range_m, p.proj_height_px, p.v_lat, p.v_long, p.column_px});
        jf.push_back(pts);
    }
    return json{{"id", s.id}, {"night", s.night}, {"gt", jg}, {"cands", jc}, {"radar", jf}};
}

Scene scene_from_json(const json& j) {
    Scene s;
    s.id = j.at("id").get<int>();
    s.night = j.at("night").get<bool>();
    for (const json& v : j.at("gt")) {
        GroundTruthVehicle g;
        g.lateral_m = v.at("lat").get<double>();
        g.range_m = v.at("range").get<double>();
        g.width_m = v.at("wm").get<double>();
        g.height_m = v.at("hm").get<double>();
        g.speed_long = v.at("vlong").get<double>();
        g.speed_lat = v.at("vlat").get<double>();
        g.radar_observed = v.at("radar_obs").get<bool>();
        const json& b = v.at("box");
        g.box = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        if (g.range_m <= 0.0) throw DataError("world: invariant range_m > 0 violated");
        s.gt.push_back(g);
    }
    for (const json& c : j.at("cands")) {
        CandidateBox cb;
        const json& b = c.at("box");
        cb.box = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        cb.z = c.at("z").get<double>();
        cb.p_vehicle = c.at("p").get<double>();
        if (cb.z < 0.0 || cb.z > 1.0 || cb.p_vehicle < 0.0 || cb.p_vehicle > 1.0)
            throw DataError("world: invariant z, p_vehicle in [0,1] violated");
        s.cands.push_back(cb);
    }
    for (const json& frame : j.at("radar")) {
        std::vector<RadarPoint> pts;
        for (const json& p : frame)
            pts.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>(),
                           p[3].get<double>(), p[4].get<double>()});
        s.radar_frames.push_back(std::move(pts));
    }
    return s;
}

}  // namespace

std::string config_digest(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(RngStream::fnv1a(text)));
    return buf;
}

void save_world(const std::vector<Scene>& scenes, const std::string& path,
                const std::string& digest) {
    std::ofstream out = open_out(path);
    out << header_json("yodar.world", kWorldSchemaVersion, digest).dump() << "\n";
    for (const Scene& s : scenes) out << scene_to_json(s).dump() << "\n";
}

std::vector<Scene> load_world(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    parse_header(line, "yodar.world", kWorldSchemaVersion, path);
    std::vector<Scene> scenes;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            scenes.push_back(scene_from_json(json::parse(line)));
        } catch (const json::exception& ex) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return scenes;
}

void save_weights(const RadarNet& net, const std::string& path, const std::string& digest) {
    const NetConfig& c = net.config();
    json payload;
    payload["config"] = {{"n_s", c.n_s},
                         {"n_t", c.n_t},
                         {"n_f", c.n_f},
                         {"base_channels", c.base_channels},
                         {"conv_kernel", c.conv_kernel},
                         {"deconv_kernel", c.deconv_kernel},
                         {"leaky_slope", c.leaky_slope},
                         {"bn_momentum", c.bn_momentum},
                         {"bn_eps", c.bn_eps}};
    payload["feat_mean"] = net.feat_mean;
    payload["feat_std"] = net.feat_std;
    json params = json::array();
    for (const ParamRef& p : const_cast<RadarNet&>(net).params())
        params.push_back({{"name", p.name}, {"shape", p.shape}, {"values", *p.values}});
    payload["params"] = params;
    std::ofstream out = open_out(path);
    out << header_json("yodar.radar_weights", kWeightsSchemaVersion, digest).dump() << "\n";
    out << payload.dump() << "\n";
}

RadarNet load_weights(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    parse_header(line, "yodar.radar_weights", kWeightsSchemaVersion, path);
    std::string body;
    if (!std::getline(in, body)) throw DataError(path + ":2: missing payload");
    json payload;
    try {
        payload = json::parse(body);
    } catch (const json::exception& ex) {
        throw DataError(path + ":2: " + ex.what());
    }
    const json& jc = payload.at("config");
    NetConfig cfg;
    cfg.n_s = jc.at("n_s").get<int>();
    cfg.n_t = jc.at("n_t").get<int>();
    cfg.n_f = jc.at("n_f").get<int>();
    cfg.base_channels = jc.at("base_channels").get<int>();
    cfg.conv_kernel = jc.at("conv_kernel").get<int>();
    cfg.deconv_kernel = jc.at("deconv_kernel").get<int>();
    cfg.leaky_slope = jc.at("leaky_slope").get<double>();
    cfg.bn_momentum = jc.at("bn_momentum").get<double>();
    cfg.bn_eps = jc.at("bn_eps").get<double>();
    RadarNet net(cfg);
    net.feat_mean = payload.at("feat_mean").get<std::array<double, 4>>();
    net.feat_std = payload.at("feat_std").get<std::array<double, 4>>();
    auto refs = net.params();
    const json& params = payload.at("params");
    if (params.size() != refs.size())
        throw DataError(path + ": invariant violated: expected " + std::to_string(refs.size()) +
                        " parameter tensors, file has " + std::to_string(params.size()));
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const json& p = params[i];
        if (p.at("name").get<std::string>() != refs[i].name)
            throw DataError(path + ": invariant violated: parameter '" +
                            p.at("name").get<std::string>() + "' where '" + refs[i].name +
                            "' expected");
        auto values = p.at("values").get<std::vector<double>>();
        if (values.size() != refs[i].values->size())
            throw DataError(path + ": invariant violated: size mismatch for " + refs[i].name);
        for (double v : values)
            if (!std::isfinite(v))
                throw DataError(path + ": invariant violated: non-finite value in " + refs[i].name);
        *refs[i].values = std::move(values);
    }
    return net;
}

namespace {

void tree_to_preorder(const TreeNode& n, json& out) {
    if (n.is_leaf) {
        out.push_back({{"leaf", n.leaf_value}});
    } else {
        out.push_back({{"f", n.feature_index}, {"t", n.threshold}});
        tree_to_preorder(*n.left, out);
        tree_to_preorder(*n.right, out);
    }
}

std::unique_ptr<TreeNode> tree_from_preorder(const json& nodes, std::size_t& pos, int n_features,
                                             const std::string& path) {
    if (pos >= nodes.size()) throw DataError(path + ": truncated tree node list");
    const json& j = nodes[pos++];
    auto node = std::make_unique<TreeNode>();
    if (j.contains("leaf")) {
        node->leaf_value = j.at("leaf").get<double>();
        if (!std::isfinite(node->leaf_value))
            throw DataError(path + ": invariant violated: non-finite leaf value");
    } else {
        node->is_leaf = false;
        node->feature_index = j.at("f").get<int>();
        node->threshold = j.at("t").get<double>();
        if (node->feature_index < 0 || node->feature_index >= n_features)
            throw DataError(path + ": invariant violated: feature_index out of range");
        node->left = tree_from_preorder(nodes, pos, n_features, path);
        node->right = tree_from_preorder(nodes, pos, n_features, path);
    }
    return node;
}

}  // namespace

void save_ensemble(const Ensemble& e, const std::string& path, const std::string& digest) {
    json payload;
    payload["base_score"] = e.base_score;
    payload["shrinkage"] = e.shrinkage;
    payload["n_features"] = e.n_features;
    json trees = json::array();
    for (const auto& t : e.trees) {
        json nodes = json::array();
        tree_to_preorder(*t, nodes);
        trees.push_back(nodes);
    }
    payload["trees"] = trees;
    std::ofstream out = open_out(path);
    out << header_json("yodar.ensemble", kEnsembleSchemaVersion, digest).dump() << "\n";
    out << payload.dump() << "\n";
}

Ensemble load_ensemble(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    parse_header(line, "yodar.ensemble", kEnsembleSchemaVersion, path);
    std::string body;
    if (!std::getline(in, body)) throw DataError(path + ":2: missing payload");
    json payload;
    try {
        payload = json::parse(body);
    } catch (const json::exception& ex) {
        throw DataError(path + ":2: " + ex.what());
    }
    Ensemble e;
    e.base_score = payload.at("base_score").get<double>();
    e.shrinkage = payload.at("shrinkage").get<double>();
    e.n_features = payload.at("n_features").get<int>();
    for (const json& nodes : payload.at("trees")) {
        std::size_t pos = 0;
        e.trees.push_back(tree_from_preorder(nodes, pos, e.n_features, path));
        if (pos != nodes.size()) throw DataError(path + ": trailing tree nodes");
    }
    return e;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out = open_out(path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out = open_out(path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace yodar
