"""Rolling-window GES-norm detector and the modified Z-score baseline.

Both judge r_t against the previous ``window - 1`` returns only; time points
before ``window`` are never flagged.
"""

from __future__ import annotations

import numpy as np

from gesnorm.anomaly.config import DetectionSeries, DetectorConfig, Method, check_series
from gesnorm.norms import scaled_from_sorted, weights

MAD_SCALE = 0.6745


def ges_detect(r, cfg: DetectorConfig) -> DetectionSeries:
    """Flag r_t when ``|r_t|`` exceeds the scaled GES norm of the previous window."""
    W = cfg.window
    r = check_series(r, W)
    g = cfg.distortion
    if not g.is_continuous:
        raise ValueError("GES detector needs a continuous distortion")
    nw = weights(g, W - 1)
    stat = np.full(r.size, np.nan)
    flags = np.zeros(r.size, dtype=bool)
    for t in range(W, r.size):
        a = np.sort(np.abs(r[t - W + 1:t]))
        stat[t] = scaled_from_sorted(a, nw, cfg.alpha)
        flags[t] = abs(r[t]) > stat[t]
    return DetectionSeries(f"ges[{g.label},alpha={cfg.alpha:g}]", stat, flags)


def modified_zscore(value: float, reference) -> float:
    """``0.6745 (value - median) / MAD`` of ``reference``.

    A zero MAD gives ``inf`` (signed) unless the value equals the median.
    """
    ref = np.asarray(reference, dtype=float)
    med = float(np.median(ref))
    mad = float(np.median(np.abs(ref - med)))
    dev = value - med
    if mad == 0.0:
        return 0.0 if dev == 0.0 else float(np.copysign(np.inf, dev))
    return MAD_SCALE * dev / mad


def mad_zscore_detect(r, cfg: DetectorConfig) -> DetectionSeries:
    W = cfg.window
    if W < 3:
        raise ValueError(f"modified Z-score needs window >= 3, got {W}")
    r = check_series(r, W)
    stat = np.full(r.size, np.nan)
    flags = np.zeros(r.size, dtype=bool)
    for t in range(W, r.size):
        stat[t] = modified_zscore(r[t], r[t - W + 1:t])
        flags[t] = abs(stat[t]) > cfg.z_threshold
    return DetectionSeries("mad", stat, flags)


def detect(r, cfg: DetectorConfig) -> DetectionSeries:
    """Dispatch on ``cfg.method``."""
    from gesnorm.anomaly.iforest import iforest_detect
    from gesnorm.anomaly.pot import pot_detect

    fn = {
        Method.GES: ges_detect,
        Method.MAD: mad_zscore_detect,
        Method.POT: pot_detect,
        Method.IFOREST: iforest_detect,
    }[cfg.method]
    return fn(r, cfg)
