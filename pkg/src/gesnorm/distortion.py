"""Distortion functions g: [0, 1] -> [0, 1] with g(0) = 0 and g(1) = 1.

A distortion reweights probability levels. The norms in :mod:`gesnorm.norms`
only ever evaluate g on the grid j/n, but the functions here are vectorized
over arbitrary arrays of levels.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

_CHECK_GRID = np.linspace(0.0, 1.0, 1001)
_CONVEXITY_TOL = 1e-12


class DistortionKind(str, enum.Enum):
    POWER = "power"
    IDENTITY = "identity"
    SQRT = "sqrt"
    TABULATED = "table"
    DUAL = "dual"


@dataclass(frozen=True)
class DistortionFunction:
    """A validated distortion function.

    Use :func:`make_distortion` rather than constructing this directly; the
    constructor does not re-check the shape flags.

    Attributes:
        kind: Family of the function.
        p: Exponent for ``POWER`` (``None`` otherwise).
        knots: ``(k, 2)`` array of ``(u, g(u))`` pairs for ``TABULATED``.
        base: The wrapped function for ``DUAL``.
        is_convex: g is convex on [0, 1].
        is_concave: g is concave on [0, 1].
        is_strictly_increasing: g(u) < g(v) whenever u < v.
        is_continuous: g is continuous on [0, 1].
    """

    kind: DistortionKind
    p: float | None = None
    knots: np.ndarray | None = field(default=None, compare=False, repr=False)
    base: DistortionFunction | None = None
    is_convex: bool = False
    is_concave: bool = False
    is_strictly_increasing: bool = True
    is_continuous: bool = True

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind is DistortionKind.IDENTITY:
            out = u.copy()
        elif self.kind is DistortionKind.SQRT:
            out = np.sqrt(u)
        elif self.kind is DistortionKind.POWER:
            out = np.power(u, self.p)
        elif self.kind is DistortionKind.TABULATED:
            out = np.interp(u, self.knots[:, 0], self.knots[:, 1])
        else:
            out = 1.0 - self.base(1.0 - u)
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def label(self) -> str:
        """Short spec string, the inverse of :func:`parse_distortion` for built-ins."""
        if self.kind is DistortionKind.POWER:
            return f"power:{self.p:g}"
        if self.kind is DistortionKind.DUAL:
            return f"dual({self.base.label})"
        return self.kind.value


def _shape_flags(values: np.ndarray, grid: np.ndarray) -> tuple[bool, bool, bool]:
    """Numerical (convex, concave, strictly increasing) flags from samples."""
    slopes = np.diff(values) / np.diff(grid)
    dslope = np.diff(slopes)
    scale = max(1.0, float(np.max(np.abs(slopes))))
    convex = bool(np.all(dslope >= -_CONVEXITY_TOL * scale))
    concave = bool(np.all(dslope <= _CONVEXITY_TOL * scale))
    strict = bool(np.all(np.diff(values) > 0))
    return convex, concave, strict


def make_distortion(kind: str | DistortionKind, *, p: float | None = None,
                    knots: Sequence[Sequence[float]] | np.ndarray | None = None
                    ) -> DistortionFunction:
    """Build and validate a distortion function.

    Args:
        kind: One of ``"power"``, ``"identity"``, ``"sqrt"``, ``"table"``.
        p: Exponent for ``"power"``; must be positive.
        knots: ``(u, g(u))`` pairs for ``"table"``; u strictly increasing from
            0 to 1, g nondecreasing from 0 to 1. Linear interpolation between.

    Raises:
        ValueError: On a nonpositive exponent, malformed knots, or endpoints
            other than (0, 0) and (1, 1).
    """
    kind = DistortionKind(kind)
    if kind is DistortionKind.IDENTITY:
        return DistortionFunction(kind, is_convex=True, is_concave=True)
    if kind is DistortionKind.SQRT:
        return DistortionFunction(kind, is_convex=False, is_concave=True)
    if kind is DistortionKind.POWER:
        if p is None or not np.isfinite(p) or p <= 0:
            raise ValueError(f"power distortion needs p > 0, got {p}")
        p = float(p)
        if p == 1.0:
            return make_distortion(DistortionKind.IDENTITY)
        return DistortionFunction(kind, p=p, is_convex=p >= 1.0, is_concave=p <= 1.0)
    if kind is DistortionKind.TABULATED:
        return _tabulated(knots)
    raise ValueError("use dual_distortion() to build a dual distortion")


def _tabulated(knots) -> DistortionFunction:
    if knots is None:
        raise ValueError("tabulated distortion needs knots")
    k = np.asarray(knots, dtype=float)
    if k.ndim != 2 or k.shape[1] != 2 or k.shape[0] < 2:
        raise ValueError("knots must be a sequence of at least two (u, g) pairs")
    if not np.all(np.isfinite(k)):
        raise ValueError("knots must be finite")
    u, g = k[:, 0], k[:, 1]
    if not np.all(np.diff(u) > 0):
        raise ValueError("knot u-values must be strictly increasing")
    if u[0] != 0.0 or g[0] != 0.0:
        raise ValueError(f"first knot must be (0, 0), got ({u[0]}, {g[0]})")
    if u[-1] != 1.0 or g[-1] != 1.0:
        raise ValueError(f"last knot must be (1, 1), got ({u[-1]}, {g[-1]})")
    if np.any(np.diff(g) < 0):
        raise ValueError("knot g-values must be nondecreasing")
    # slopes change only at knots, so checking the knots is exact for
    # convexity; the fine grid guards the monotonicity claim
    convex, concave, _ = _shape_flags(g, u)
    grid_vals = np.interp(_CHECK_GRID, u, g)
    strict = bool(np.all(np.diff(grid_vals) > 0))
    k.setflags(write=False)
    return DistortionFunction(DistortionKind.TABULATED, knots=k, is_convex=convex,
                              is_concave=concave, is_strictly_increasing=strict)


def dual_distortion(g: DistortionFunction) -> DistortionFunction:
    """Return the dual distortion t -> 1 - g(1 - t).

    Identity is its own dual, and the dual of a dual is the original object.
    """
    if g.kind is DistortionKind.IDENTITY:
        return g
    if g.kind is DistortionKind.DUAL:
        return g.base
    return DistortionFunction(
        DistortionKind.DUAL,
        base=g,
        is_convex=g.is_concave,
        is_concave=g.is_convex,
        is_strictly_increasing=g.is_strictly_increasing,
        is_continuous=g.is_continuous,
    )


def check_distortion(g: DistortionFunction, grid: np.ndarray = _CHECK_GRID) -> None:
    """Assert the distortion invariants numerically on ``grid``.

    Raises:
        ValueError: If an endpoint, monotonicity or declared-convexity check fails.
    """
    if g(0.0) != 0.0 or g(1.0) != 1.0:
        raise ValueError(f"{g.label}: endpoints are ({g(0.0)}, {g(1.0)})")
    vals = g(grid)
    if np.any(np.diff(vals) < 0):
        raise ValueError(f"{g.label}: not nondecreasing")
    if g.is_convex:
        mid = g((grid[:-1] + grid[1:]) / 2)
        if np.any(mid > (vals[:-1] + vals[1:]) / 2 + _CONVEXITY_TOL):
            raise ValueError(f"{g.label}: flagged convex but fails midpoint convexity")


def parse_distortion(spec: str) -> DistortionFunction:
    """Parse a spec string: ``identity``, ``sqrt``, ``power:<p>`` or ``table:<csv path>``.

    The table file holds ``u,g`` rows, optionally under a header line.
    """
    spec = spec.strip()
    name, _, arg = spec.partition(":")
    name = name.lower()
    if name in ("identity", "linear") and not arg:
        return make_distortion("identity")
    if name == "sqrt" and not arg:
        return make_distortion("sqrt")
    if name in ("power", "square") and (arg or name == "square"):
        try:
            p = float(arg) if arg else 2.0
        except ValueError:
            raise ValueError(f"bad exponent in distortion spec {spec!r}") from None
        return make_distortion("power", p=p)
    if name == "table" and arg:
        return make_distortion("table", knots=_read_knots(Path(arg)))
    raise ValueError(f"unknown distortion spec {spec!r}")


def _read_knots(path: Path) -> list[tuple[float, float]]:
    rows = []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if lineno == 1:
                    continue  # header
                raise ValueError(f"{path}:{lineno}: expected 'u,g' numbers, got {row}") from None
    return rows
