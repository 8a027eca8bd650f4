"""Detector configuration and per-time-point detection output."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from gesnorm.distortion import DistortionFunction, make_distortion


class Method(str, enum.Enum):
    GES = "ges"
    MAD = "mad"
    POT = "pot"
    IFOREST = "iforest"


@dataclass(frozen=True)
class IForestParams:
    trees: int = 100
    subsample: int | None = None  # None means min(256, window - 1)
    score_threshold: float = 0.7
    seed: int = 0


@dataclass(frozen=True)
class DetectorConfig:
    """Settings for one rolling-window detector.

    ``window`` counts the current point: each time t is judged against the
    ``window - 1`` observations before it.
    """

    method: Method
    window: int
    alpha: float = 0.95
    distortion: DistortionFunction = field(default_factory=lambda: make_distortion("power", p=2))
    z_threshold: float = 3.0
    pot_threshold_quantile: float = 0.90
    pot_outlier_quantile: float = 0.99
    pot_rule: str = "gpd"  # or "empirical"
    iforest: IForestParams = field(default_factory=IForestParams)

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.window < 2:
            raise ValueError(f"window must be >= 2, got {self.window}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        uq, v = self.pot_threshold_quantile, self.pot_outlier_quantile
        if not (0.0 < uq < 1.0 and 0.0 < v < 1.0 and v > uq):
            raise ValueError(f"need 0 < threshold quantile < outlier quantile < 1, got {uq}, {v}")
        if self.pot_rule not in ("gpd", "empirical"):
            raise ValueError(f"pot_rule must be 'gpd' or 'empirical', got {self.pot_rule!r}")
        if not 0.0 < self.iforest.score_threshold < 1.0:
            raise ValueError("isolation score threshold must lie in (0, 1)")
        if self.iforest.trees < 1:
            raise ValueError("need at least one isolation tree")

    def to_dict(self) -> dict:
        out = {"method": self.method.value, "window": self.window}
        if self.method is Method.GES:
            out.update(alpha=self.alpha, distortion=self.distortion.label)
        elif self.method is Method.MAD:
            out.update(z_threshold=self.z_threshold)
        elif self.method is Method.POT:
            out.update(threshold_quantile=self.pot_threshold_quantile,
                       outlier_quantile=self.pot_outlier_quantile, rule=self.pot_rule)
        else:
            p = self.iforest
            out.update(trees=p.trees, subsample=p.subsample,
                       score_threshold=p.score_threshold, seed=p.seed)
        return out


@dataclass
class DetectionSeries:
    """Output of a detector over a return series.

    Attributes:
        method: Label of the detector.
        statistic: Reference statistic per time point, NaN during warm-up.
            GES: the norm threshold I_t; MAD: the modified Z-score; POT: the
            upper (right-tail) outlier threshold; isolation forest: the score.
        flags: True where the point is flagged.
        aux: Method-specific extra series (for example the POT lower threshold).
    """

    method: str
    statistic: np.ndarray
    flags: np.ndarray
    aux: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return int(self.flags.sum())

    @property
    def flagged_indices(self) -> np.ndarray:
        return np.flatnonzero(self.flags)


def returns_from_prices(prices) -> np.ndarray:
    """Simple returns ``p_t / p_{t-1} - 1``."""
    p = np.asarray(prices, dtype=float).ravel()
    if p.size < 2:
        raise ValueError("need at least two prices")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise ValueError("prices must be positive and finite")
    return p[1:] / p[:-1] - 1.0


def log_returns_from_prices(prices) -> np.ndarray:
    p = np.asarray(prices, dtype=float).ravel()
    if p.size < 2:
        raise ValueError("need at least two prices")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise ValueError("prices must be positive and finite")
    return np.diff(np.log(p))


def check_series(r, window: int) -> np.ndarray:
    r = np.asarray(r, dtype=float).ravel()
    if r.size < window:
        raise ValueError(f"window {window} is longer than the series ({r.size})")
    if not np.all(np.isfinite(r)):
        raise ValueError("series has non-finite values")
    return r
