"""Peaks over threshold with a generalized Pareto (GPD) tail.

The fit maximizes the GPD likelihood of the excesses ``y = x - u > 0``,

    log L(xi, beta) = -k log beta - (1 + 1/xi) sum log(1 + xi y / beta),

by profiling: for each shape xi the scale solves its score equation,
and the profile is maximized over xi in [-0.5, 2] (coarse grid, then Brent).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, fminbound

from gesnorm.anomaly.config import DetectionSeries, DetectorConfig, check_series

XI_RANGE = (-0.5, 2.0)
XI_ZERO = 1e-6
MIN_EXCEEDANCES = 10
MIN_POT_WINDOW = 50


class Tail(str, enum.Enum):
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True)
class GpdFit:
    xi: float
    beta: float
    threshold: float = 0.0
    n_exceed: int = 0
    tail: Tail = Tail.RIGHT

    def cdf(self, x):
        """GPD distribution function of the raw value ``x`` (0 below the threshold)."""
        y = np.maximum(np.asarray(x, dtype=float) - self.threshold, 0.0) / self.beta
        if self.xi == 0.0:
            out = -np.expm1(-y)
        else:
            base = np.maximum(1.0 + self.xi * y, 0.0)
            with np.errstate(divide="ignore"):
                out = 1.0 - np.power(base, -1.0 / self.xi)
        out = np.clip(out, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    @property
    def upper_bound(self) -> float:
        """Right end of the support (``inf`` unless xi < 0)."""
        return self.threshold - self.beta / self.xi if self.xi < 0 else math.inf


def gpd_loglik(xi: float, beta: float, y: np.ndarray) -> float:
    if beta <= 0:
        return -math.inf
    k = y.size
    if abs(xi) < 1e-12:
        return -k * math.log(beta) - float(y.sum()) / beta
    z = xi * y / beta
    if np.any(z <= -1.0):
        return -math.inf
    return -k * math.log(beta) - (1.0 + 1.0 / xi) * float(np.log1p(z).sum())


def _profile(xi: float, y: np.ndarray, ymean: float, ymax: float) -> tuple[float, float]:
    """Best (log-likelihood, beta) for fixed ``xi``.

    The scale score ``(1 + xi) sum (y/beta) / (1 + xi y/beta) = k`` has a single
    root on the feasible range, so a bracketing root finder suffices.
    """
    k = y.size
    if xi == 0.0:
        return gpd_loglik(0.0, ymean, y), ymean

    def score(s: float) -> float:
        w = y / math.exp(s)
        den = 1.0 + xi * w
        if np.any(den <= 0.0):
            return math.inf  # at the support edge the score blows up
        return (1.0 + xi) * float(np.sum(w / den)) - k

    if xi < 0:
        lo = math.log(-xi * ymax) + 1e-12
    else:
        lo = math.log(ymean) - 2.0
        while score(lo) <= 0:
            lo -= 2.0
    hi = math.log(ymean * (1.0 + abs(xi))) + 1.0
    while score(hi) >= 0:
        hi += 2.0
    if not score(lo) > 0:
        return -math.inf, math.nan
    beta = math.exp(brentq(score, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps))
    return gpd_loglik(xi, beta, y), beta


def gpd_fit_mle(exceedances, threshold: float = 0.0, tail: Tail = Tail.RIGHT) -> GpdFit:
    """Maximum-likelihood GPD fit to positive excesses over ``threshold``.

    Raises:
        ValueError: On fewer than 10 excesses or a non-positive excess.
    """
    y = np.asarray(exceedances, dtype=float).ravel()
    if y.size < MIN_EXCEEDANCES:
        raise ValueError(f"need at least {MIN_EXCEEDANCES} exceedances, got {y.size}")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise ValueError("exceedances must be positive and finite")
    ymean, ymax = float(y.mean()), float(y.max())

    grid = np.linspace(XI_RANGE[0], XI_RANGE[1], 11)
    prof = [_profile(float(xi), y, ymean, ymax)[0] for xi in grid]
    i = int(np.argmax(prof))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    xi = float(fminbound(lambda v: -_profile(v, y, ymean, ymax)[0], lo, hi, xtol=1e-8))
    if prof[i] > _profile(xi, y, ymean, ymax)[0]:
        xi = float(grid[i])
    if abs(xi) < XI_ZERO:
        return GpdFit(0.0, ymean, threshold, y.size, Tail(tail))
    ll, beta = _profile(xi, y, ymean, ymax)
    if not (math.isfinite(ll) and math.isfinite(beta) and beta > 0):
        raise ValueError("GPD fit failed to converge")
    return GpdFit(xi, beta, threshold, y.size, Tail(tail))


def gpd_tail_quantile(fit: GpdFit, level: float, exceed_rate: float) -> float:
    """Value exceeded with probability ``1 - level`` when the threshold is
    exceeded with probability ``exceed_rate``."""
    ratio = (1.0 - level) / exceed_rate
    if fit.xi == 0.0:
        return fit.threshold + fit.beta * math.log(1.0 / ratio)
    return fit.threshold + fit.beta / fit.xi * (ratio ** (-fit.xi) - 1.0)


def _tail_threshold(window: np.ndarray, cfg: DetectorConfig, tail: Tail) -> tuple[float, bool]:
    """Outlier threshold for one tail of a window; second item marks a fallback."""
    v = cfg.pot_outlier_quantile
    empirical = float(np.quantile(window, v))
    if cfg.pot_rule == "empirical":
        return empirical, False
    u = float(np.quantile(window, cfg.pot_threshold_quantile))
    exc = window[window > u] - u
    try:
        fit = gpd_fit_mle(exc, u, tail)
    except ValueError:
        return empirical, True
    q = gpd_tail_quantile(fit, v, exc.size / window.size)
    if not math.isfinite(q):
        return empirical, True
    return q, False


def pot_detect(r, cfg: DetectorConfig) -> DetectionSeries:
    """Flag r_t beyond the GPD-implied v-quantile of either tail of the previous window."""
    W = cfg.window
    if W < MIN_POT_WINDOW:
        raise ValueError(f"POT needs window >= {MIN_POT_WINDOW}, got {W}")
    r = check_series(r, W)
    upper = np.full(r.size, np.nan)
    lower = np.full(r.size, np.nan)
    fallback = np.zeros(r.size, dtype=bool)
    flags = np.zeros(r.size, dtype=bool)
    for t in range(W, r.size):
        window = r[t - W + 1:t]
        hi, fb_hi = _tail_threshold(window, cfg, Tail.RIGHT)
        lo, fb_lo = _tail_threshold(-window, cfg, Tail.LEFT)
        upper[t], lower[t] = hi, -lo
        fallback[t] = fb_hi or fb_lo
        flags[t] = r[t] > hi or -r[t] > lo
    return DetectionSeries("pot", upper, flags, {"lower": lower, "fallback": fallback})
