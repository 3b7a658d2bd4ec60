"""Camera/radar fusion core.

Thin re-export of the compiled extension: geometry (IoU, NMS), the 1D radar
segmentation network, gradient-boosted meta-classifier, fusion features, and
the average-precision evaluator.
"""

from ._yodar import (
    Box2D,
    ConfigError,
    DataError,
    DomainError,
    Ensemble,
    NumericError,
    RadarNet,
    ScoredBox,
    ShapeError,
    ap_from_flags,
    build_features,
    extract_bundles,
    fit_boost,
    iou_1d,
    iou_2d,
    load_ensemble,
    load_radar_weights,
    nms,
    slice_bce,
    validate_config,
)

__all__ = [
    "Box2D",
    "ConfigError",
    "DataError",
    "DomainError",
    "Ensemble",
    "NumericError",
    "RadarNet",
    "ScoredBox",
    "ShapeError",
    "ap_from_flags",
    "build_features",
    "extract_bundles",
    "fit_boost",
    "iou_1d",
    "iou_2d",
    "load_ensemble",
    "load_radar_weights",
    "nms",
    "slice_bce",
    "validate_config",
]
