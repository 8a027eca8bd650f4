"""Scaled and non-scaled generalized expected-shortfall (GES) norms.

For a vector x in R^n with sorted magnitudes a_1 <= ... <= a_n and a
distortion g, the weights are c_i = g(i/n) - g((i-1)/n) and the breakpoints
are alpha_j = g(j/n). The scaled norm at level alpha in [0, 1) is

    min_t  t + 1/(1 - alpha) * sum_i c_i (a_i - t)_+

and equals max_i a_i at alpha = 1. Between breakpoints the value is a
weighted average of the two neighbouring breakpoint values, which is what
:func:`scaled_ges_norm` evaluates; :func:`scaled_ges_norm_oracle` minimizes
over t directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gesnorm.distortion import DistortionFunction

BREAKPOINT_TOL = 1e-12


@dataclass(frozen=True)
class NormWeights:
    """Discretization of a distortion at dimension ``n``.

    Attributes:
        n: Dimension.
        c: Length-n increments ``g(i/n) - g((i-1)/n)``.
        breakpoints: Length-(n+1) levels ``g(j/n)``, j = 0..n.
    """

    n: int
    c: np.ndarray
    breakpoints: np.ndarray


def weights(g: DistortionFunction, n: int) -> NormWeights:
    """Per-dimension increments and breakpoints of ``g``."""
    if int(n) != n or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n}")
    n = int(n)
    bp = np.asarray(g(np.arange(n + 1) / n), dtype=float)
    bp[0], bp[-1] = 0.0, 1.0
    c = np.diff(bp)
    bp.setflags(write=False)
    c.setflags(write=False)
    return NormWeights(n, c, bp)


def sorted_magnitudes(x) -> np.ndarray:
    a = np.abs(np.asarray(x, dtype=float).ravel())
    if a.size == 0:
        raise ValueError("empty vector")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite entries")
    return np.sort(a, kind="stable")


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def _at_breakpoint(a: np.ndarray, w: NormWeights, j: int) -> float:
    tail = 1.0 - w.breakpoints[j]
    if tail <= 0.0:
        return float(a[-1])
    return float(np.dot(w.c[j:], a[j:]) / tail)


def scaled_from_sorted(a: np.ndarray, w: NormWeights, alpha: float) -> float:
    """Scaled norm of already-sorted magnitudes ``a`` using precomputed weights."""
    n = w.n
    bp = w.breakpoints
    if alpha >= 1.0 or alpha > bp[n - 1] + BREAKPOINT_TOL:
        return float(a[-1])
    # largest k <= n-1 with bp[k] <= alpha
    k = int(np.searchsorted(bp[:n], alpha, side="right")) - 1
    k = max(k, 0)
    if abs(alpha - bp[k]) <= BREAKPOINT_TOL:
        return _at_breakpoint(a, w, k)
    if k + 1 <= n - 1 and abs(bp[k + 1] - alpha) <= BREAKPOINT_TOL:
        return _at_breakpoint(a, w, k + 1)
    lo, hi = bp[k], bp[k + 1]
    mu = (hi - alpha) * (1.0 - lo) / ((hi - lo) * (1.0 - alpha))
    return float(mu * _at_breakpoint(a, w, k) + (1.0 - mu) * _at_breakpoint(a, w, k + 1))


def scaled_ges_norm(x, alpha: float, g: DistortionFunction) -> float:
    """Scaled GES norm of ``x`` at level ``alpha`` via the breakpoint representation.

    Args:
        x: Real vector.
        alpha: Level in [0, 1].
        g: Continuous distortion.

    Returns:
        The norm value; ``max|x_i|`` for alpha above the last interior breakpoint.
    """
    if not g.is_continuous:
        raise ValueError("breakpoint representation needs a continuous distortion")
    alpha = _check_alpha(alpha)
    a = sorted_magnitudes(x)
    return scaled_from_sorted(a, weights(g, a.size), alpha)


def scaled_ges_norm_oracle(x, alpha: float, g: DistortionFunction) -> float:
    """Scaled GES norm by minimizing the threshold objective over its kinks.

    The objective is convex and piecewise linear in t with kinks only at the
    magnitudes, so evaluating it at 0 and at every ``|x_i|`` is exact.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"oracle needs alpha in [0, 1), got {alpha}")
    a = sorted_magnitudes(x)
    c = weights(g, a.size).c
    t = np.concatenate([[0.0], a])
    excess = np.maximum(a[None, :] - t[:, None], 0.0)
    obj = t + (excess @ c) / (1.0 - alpha)
    return float(obj.min())


def nonscaled_ges_norm(x, alpha: float, g: DistortionFunction) -> float:
    """Non-scaled GES norm, ``n (1 - alpha)`` times the scaled one.

    At alpha = 1 this is the limit value 0.
    """
    alpha = _check_alpha(alpha)
    a = sorted_magnitudes(x)
    if alpha == 1.0:
        return 0.0
    if not g.is_continuous:
        raise ValueError("breakpoint representation needs a continuous distortion")
    return a.size * (1.0 - alpha) * scaled_from_sorted(a, weights(g, a.size), alpha)


def alpha_profile(x, g: DistortionFunction, grid) -> np.ndarray:
    """Rows of ``(alpha, scaled, non-scaled)`` over an alpha grid."""
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty alpha grid")
    a = sorted_magnitudes(x)
    w = weights(g, a.size)
    out = np.empty((grid.size, 3))
    for row, alpha in enumerate(grid):
        alpha = _check_alpha(alpha)
        s = scaled_from_sorted(a, w, alpha)
        out[row] = (alpha, s, a.size * (1.0 - alpha) * s)
    return out


def unit_disk_boundary(g: DistortionFunction, alpha: float, samples: int = 360,
                       scaled: bool = True) -> np.ndarray:
    """Boundary of the 2-D unit disk, as rows ``(theta, x, y)``.

    Directions are uniform on [0, 2*pi); each point is the direction rescaled
    to norm one. The polyline closes from the last row back to the first.
    """
    if samples < 8:
        raise ValueError(f"need at least 8 samples, got {samples}")
    alpha = _check_alpha(alpha)
    if not scaled and alpha == 1.0:
        raise ValueError("non-scaled norm is identically zero at alpha = 1")
    w = weights(g, 2)
    factor = 1.0 if scaled else 2.0 * (1.0 - alpha)
    theta = 2.0 * math.pi * np.arange(samples) / samples
    out = np.empty((samples, 3))
    for i, th in enumerate(theta):
        d = np.array([math.cos(th), math.sin(th)])
        val = factor * scaled_from_sorted(np.sort(np.abs(d)), w, alpha)
        if val <= 0.0:
            raise ValueError(f"direction {th:.6g} has zero norm; the disk is unbounded")
        out[i] = (th, d[0] / val, d[1] / val)
    return out
