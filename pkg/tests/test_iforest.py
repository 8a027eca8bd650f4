import math

import numpy as np
import pytest

from gesnorm.anomaly import DetectorConfig, IForestParams, IsolationForest, c_factor, iforest_detect


def test_c_factor():
    assert c_factor(256) == pytest.approx(2 * (math.log(255) + np.euler_gamma) - 2 * 255 / 256)
    assert round(c_factor(256), 4) == 10.2448
    assert c_factor(1) == 0.0 and c_factor(2) == 1.0


def test_average_path_gives_half():
    f = IsolationForest(5, 64, np.random.default_rng(0)).fit(np.full(100, 3.0))
    assert f.score(3.0) == 0.5


def test_far_point_scores_higher():
    rng = np.random.default_rng(7)
    x = rng.normal(size=300)
    f = IsolationForest(100, 256, np.random.default_rng(1)).fit(x)
    assert f.score(10.0) > f.score(float(np.median(x)))
    assert 0.0 < f.score(float(np.median(x))) < 1.0


def test_depth_limit():
    x = np.random.default_rng(3).normal(size=64)
    f = IsolationForest(10, 64, np.random.default_rng(0)).fit(x)
    for t in range(10):
        h = f.path_length(100.0, t)
        assert h <= f.depth_limit + c_factor(64)


def test_subsample_validation():
    with pytest.raises(ValueError):
        IsolationForest(10, 1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        IsolationForest(10, 50, np.random.default_rng(0)).fit(np.zeros(10))
    with pytest.raises(RuntimeError):
        IsolationForest(10, 5, np.random.default_rng(0)).score(1.0)


def test_detect_flags_spike_and_is_reproducible():
    rng = np.random.default_rng(5)
    r = rng.normal(0, 0.01, size=120)
    r[100] = 0.3
    cfg = DetectorConfig("iforest", 60, iforest=IForestParams(trees=50, seed=9))
    a = iforest_detect(r, cfg)
    assert a.flags[100]
    assert np.all((a.statistic[60:] > 0) & (a.statistic[60:] < 1))
    b = iforest_detect(r, cfg)
    assert np.array_equal(a.statistic, b.statistic, equal_nan=True)


def test_degenerate_window_scores_half():
    det = iforest_detect(np.full(40, 0.02), DetectorConfig("iforest", 20, iforest=IForestParams(trees=5)))
    assert np.all(det.statistic[20:] == 0.5)
    assert det.count == 0


def test_subsample_default_and_bounds():
    with pytest.raises(ValueError):
        iforest_detect(np.zeros(30), DetectorConfig("iforest", 10, iforest=IForestParams(subsample=10)))
