#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <utility>
#include <vector>

#include "yodar/errors.hpp"
#include "yodar/evaluate.hpp"
#include "yodar/fusion.hpp"
#include "yodar/gbm.hpp"
#include "yodar/geometry.hpp"
#include "yodar/pipeline.hpp"
#include "yodar/radarnet.hpp"
#include "yodar/store.hpp"

namespace py = pybind11;
using namespace yodar;

namespace {

RadarTensor tensor_from_nested(const std::vector<std::vector<std::vector<double>>>& data) {
    if (data.empty() || data[0].empty() || data[0][0].empty())
        throw ShapeError("radar tensor: empty dimension");
    int n_s = static_cast<int>(data.size());
    int n_t = static_cast<int>(data[0].size());
    int n_f = static_cast<int>(data[0][0].size());
    RadarTensor x(n_s, n_t, n_f);
    for (int s = 0; s < n_s; ++s) {
        if (static_cast<int>(data[s].size()) != n_t)
            throw ShapeError("radar tensor: ragged time dimension");
        for (int t = 0; t < n_t; ++t) {
            if (static_cast<int>(data[s][t].size()) != n_f)
                throw ShapeError("radar tensor: ragged feature dimension");
            for (int f = 0; f < n_f; ++f) x.at(s, t, f) = data[s][t][f];
        }
    }
    return x;
}

}  // namespace

PYBIND11_MODULE(_yodar, m) {
    m.doc() = "Camera/radar fusion core: geometry, radar segmentation net, "
              "gradient boosting, fusion features, evaluation.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<Box2D>(m, "Box2D")
        .def(py::init<double, double, double, double>(), py::arg("cx"), py::arg("cy"),
             py::arg("w"), py::arg("h"))
        .def_readwrite("cx", &Box2D::cx)
        .def_readwrite("cy", &Box2D::cy)
        .def_readwrite("w", &Box2D::w)
        .def_readwrite("h", &Box2D::h)
        .def("__repr__", [](const Box2D& b) {
            return "Box2D(cx=" + format_double(b.cx) + ", cy=" + format_double(b.cy) +
                   ", w=" + format_double(b.w) + ", h=" + format_double(b.h) + ")";
        });

    py::class_<ScoredBox>(m, "ScoredBox")
        .def(py::init([](const Box2D& b, double score) { return ScoredBox{b, score}; }),
             py::arg("box"), py::arg("score"))
        .def_readwrite("box", &ScoredBox::box)
        .def_readwrite("score", &ScoredBox::score);

    m.def("iou_2d", &iou_2d, py::arg("a"), py::arg("b"),
          "Intersection over union of two center-format boxes.");
    m.def(
        "iou_1d",
        [](double a_lo, double a_hi, double b_lo, double b_hi) {
            return iou_1d({a_lo, a_hi}, {b_lo, b_hi});
        },
        py::arg("a_lo"), py::arg("a_hi"), py::arg("b_lo"), py::arg("b_hi"));
    m.def("nms", &nms, py::arg("boxes"), py::arg("iou_threshold"),
          "Greedy non-maximum suppression; keeps the highest-scoring box of "
          "each overlapping group.");

    m.def("slice_bce", &slice_bce, py::arg("targets"), py::arg("probs"), py::arg("alpha"),
          "Weighted binary cross-entropy summed over slices; alpha scales the "
          "positive-class term.");
    m.def(
        "extract_bundles",
        [](const SliceProbs& y, double t_g) {
            std::vector<std::pair<int, int>> out;
            for (const SliceBundle& b : extract_bundles(y, t_g)) out.emplace_back(b.first, b.last);
            return out;
        },
        py::arg("probs"), py::arg("threshold"),
        "Maximal runs of slices at or above the threshold, 1-indexed inclusive "
        "(first, last) pairs.");

    py::class_<RadarNet>(m, "RadarNet")
        .def(py::init([](int n_slices, int base_channels, std::uint64_t seed) {
                 NetConfig cfg;
                 cfg.n_s = n_slices;
                 cfg.base_channels = base_channels;
                 RadarNet net(cfg);
                 net.init_weights(seed);
                 return net;
             }),
             py::arg("n_slices") = 160, py::arg("base_channels") = 16, py::arg("seed") = 1)
        .def_property_readonly("n_slices",
                               [](const RadarNet& n) { return n.config().n_s; })
        .def(
            "infer",
            [](const RadarNet& net, const std::vector<std::vector<std::vector<double>>>& x) {
                return net.infer(tensor_from_nested(x));
            },
            py::arg("tensor"),
            "Per-slice occupancy probabilities for one (slices, time, features) "
            "tensor given as nested lists.");
    m.def("load_radar_weights", &load_weights, py::arg("path"));

    py::class_<Ensemble>(m, "Ensemble")
        .def_readonly("base_score", &Ensemble::base_score)
        .def_property_readonly("n_trees",
                               [](const Ensemble& e) { return e.trees.size(); })
        .def("predict_proba",
             [](const Ensemble& e, const FeatureVector& row) { return predict_proba(e, row); },
             py::arg("features"));
    m.def(
        "fit_boost",
        [](const std::vector<std::vector<double>>& features,
           const std::vector<std::uint8_t>& labels, int n_rounds, int max_depth,
           double shrinkage, double subsample, int min_leaf, std::uint64_t seed) {
            BoostConfig cfg;
            cfg.n_rounds = n_rounds;
            cfg.max_depth = max_depth;
            cfg.shrinkage = shrinkage;
            cfg.subsample = subsample;
            cfg.min_leaf = min_leaf;
            cfg.seed = seed;
            return std::make_unique<Ensemble>(fit(features, labels, cfg));
        },
        py::arg("features"), py::arg("labels"), py::arg("n_rounds") = 200,
        py::arg("max_depth") = 3, py::arg("shrinkage") = 0.1, py::arg("subsample") = 0.5,
        py::arg("min_leaf") = 5, py::arg("seed") = 0,
        "Gradient-boosted trees under logistic loss; returns an Ensemble.");
    m.def(
        "load_ensemble",
        [](const std::string& path) { return std::make_unique<Ensemble>(load_ensemble(path)); },
        py::arg("path"));

    m.def(
        "build_features",
        [](const Box2D& box, double z, double p_vehicle, const SliceProbs& probs) {
            return build_features(CandidateBox{box, z, p_vehicle}, probs, ImageGrid{});
        },
        py::arg("box"), py::arg("z"), py::arg("p_vehicle"), py::arg("slice_probs"),
        "The nine fusion metrics (z, p, cx, cy, w, h, area, mu, sigma) for one "
        "candidate on the default 1600x900 grid.");

    m.def("ap_from_flags", &ap_from_flags, py::arg("tp_flags"), py::arg("n_gt"),
          "Average precision from ranked TP/FP flags (lower-step integration).");

    m.def(
        "validate_config",
        [](const std::string& json_text) {
            RunConfig cfg = parse_run_config(json_text);
            return cfg.seed;
        },
        py::arg("json_text"),
        "Parses and validates a pipeline config document; returns its seed, "
        "raises ConfigError on unknown keys or bad values.");
}
