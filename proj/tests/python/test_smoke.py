"""Smoke tests for the compiled extension.

Run by ctest with YODAR_EXT_DIR pointing at the directory holding the built
_yodar module; falls back to an installed yodar_py package otherwise.
"""

import math
import os
import sys

import pytest

_ext_dir = os.environ.get("YODAR_EXT_DIR")
if _ext_dir:
    sys.path.insert(0, _ext_dir)
    import _yodar as y
else:
    import yodar_py as y


def test_iou_2d_quarter_overlap():
    a = y.Box2D(5.0, 5.0, 10.0, 10.0)
    b = y.Box2D(10.0, 10.0, 10.0, 10.0)
    assert y.iou_2d(a, b) == pytest.approx(25.0 / 175.0, abs=1e-12)
    assert y.iou_2d(a, a) == pytest.approx(1.0)


def test_iou_1d():
    assert y.iou_1d(0.0, 10.0, 5.0, 15.0) == pytest.approx(5.0 / 15.0)
    assert y.iou_1d(0.0, 10.0, 10.0, 20.0) == 0.0


def test_nms_keeps_disjoint_boxes():
    boxes = [
        y.ScoredBox(y.Box2D(10.0, 10.0, 10.0, 10.0), 0.9),
        y.ScoredBox(y.Box2D(16.0, 10.0, 10.0, 10.0), 0.8),
        y.ScoredBox(y.Box2D(22.0, 10.0, 10.0, 10.0), 0.7),
    ]
    kept = y.nms(boxes, 0.2)
    assert [b.score for b in kept] == [0.9, 0.7]


def test_slice_bce_examples():
    assert y.slice_bce([1, 0], [0.5, 0.5], 1.0) == pytest.approx(2 * math.log(2), abs=1e-12)
    assert y.slice_bce([1, 0], [0.5, 0.5], 3.0) == pytest.approx(4 * math.log(2), abs=1e-12)
    with pytest.raises(ValueError):
        y.slice_bce([1], [0.5, 0.5], 1.0)


def test_extract_bundles():
    assert y.extract_bundles([0.1, 0.7, 0.9, 0.2], 0.5) == [(2, 3)]


def test_ap_from_flags():
    assert y.ap_from_flags([1, 0, 1], 2) == 0.75


def test_radar_net_fresh_init_is_uninformative():
    net = y.RadarNet(n_slices=8, base_channels=4, seed=1)
    zero = [[[0.0] * 4 for _ in range(3)] for _ in range(8)]
    probs = net.infer(zero)
    assert len(probs) == 8
    assert all(abs(p - 0.5) < 1e-9 for p in probs)
    with pytest.raises(ValueError):
        net.infer([[[0.0] * 4 for _ in range(3)] for _ in range(4)])  # wrong slice count


def test_boosting_learns_separable_data():
    rows = [[(i * 37 % 100) / 100.0] * 9 for i in range(200)]
    labels = [1 if r[0] > 0.5 else 0 for r in rows]
    e = y.fit_boost(rows, labels, n_rounds=50, subsample=1.0)
    assert e.n_trees == 50
    acc = sum((e.predict_proba(r) >= 0.5) == bool(l) for r, l in zip(rows, labels)) / len(rows)
    assert acc == 1.0


def test_build_features_contract():
    f = y.build_features(y.Box2D(100.0, 450.0, 40.0, 30.0), 0.8, 0.9, [0.5] * 160)
    assert len(f) == 9
    assert f[6] == pytest.approx(40.0 * 30.0, abs=1e-9)  # area = w * h
    assert 0.0 <= f[7] <= 1.0  # mu
    assert 0.0 <= f[8] <= 0.5  # sigma


def test_validate_config():
    assert y.validate_config('{"seed": 7}') == 7
    with pytest.raises(ValueError):
        y.validate_config('{"sead": 7}')
