"""Projection of a point onto ``{x : A x <= b, x >= 0}`` under the scaled GES norm.

Two exact routes live here:

* :func:`project_lp` writes the norm as an OWL norm (convex distortions only)
  and solves a single LP.
* :func:`project_enumerate` fixes the sort order of the deviations, solves
  one LP per permutation using the threshold form of the norm, and keeps the
  best. Valid for any continuous distortion but costs n! LPs.

The MILP route is in :mod:`gesnorm.optimize.milp`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from gesnorm.distortion import DistortionFunction
from gesnorm.dual import ges_owl_weights, owl_epigraph
from gesnorm.norms import scaled_ges_norm, weights
from gesnorm.optimize.simplex import LpProblem, LpStatus, lp_solve

FEAS_TOL = 1e-8


@dataclass(frozen=True)
class Polyhedron:
    """The set ``{x : A x <= b, x >= 0}``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape[0] < 1 or A.shape[1] < 1:
            raise ValueError("polyhedron needs at least one row and one column")
        if A.shape[0] != b.size:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.size} entries")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("polyhedron data must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def contains(self, x, tol: float = FEAS_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -tol) and np.all(self.A @ x <= self.b + tol))


@dataclass
class ProjectionResult:
    """Optimal value and one minimizer.

    ``nodes`` and ``proven_optimal`` are only meaningful for the MILP route;
    ``lp_count`` counts LP solves.
    """

    value: float
    x: np.ndarray = field(repr=False)
    method: str
    lp_count: int = 1
    nodes: int = 0
    proven_optimal: bool = True


class _RowBuilder:
    """Accumulates sparse ``<=`` / ``==`` rows over a growing set of columns."""

    def __init__(self):
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.ub_rows: list[tuple[dict[int, float], float]] = []
        self.eq_rows: list[tuple[dict[int, float], float]] = []

    def add_vars(self, count: int, lb: float = 0.0, ub: float = np.inf) -> range:
        start = len(self.lb)
        self.lb.extend([lb] * count)
        self.ub.extend([ub] * count)
        return range(start, start + count)

    @property
    def ncols(self) -> int:
        return len(self.lb)

    def le(self, coefs: dict[int, float], rhs: float) -> None:
        self.ub_rows.append((coefs, rhs))

    def eq(self, coefs: dict[int, float], rhs: float) -> None:
        self.eq_rows.append((coefs, rhs))

    @staticmethod
    def _dense(rows, ncols):
        if not rows:
            return None, None
        A = np.zeros((len(rows), ncols))
        b = np.empty(len(rows))
        for r, (coefs, rhs) in enumerate(rows):
            for j, v in coefs.items():
                A[r, j] += v
            b[r] = rhs
        return A, b

    def problem(self, objective: dict[int, float]) -> LpProblem:
        n = self.ncols
        c = np.zeros(n)
        for j, v in objective.items():
            c[j] += v
        A_ub, b_ub = self._dense(self.ub_rows, n)
        A_eq, b_eq = self._dense(self.eq_rows, n)
        return LpProblem(c, A_ub, b_ub, A_eq, b_eq, np.array(self.lb), np.array(self.ub))


def _polyhedron_rows(rb: _RowBuilder, P: Polyhedron, xcols: range) -> None:
    for j in range(P.m):
        rb.le({xcols[i]: P.A[j, i] for i in range(P.n) if P.A[j, i] != 0.0}, P.b[j])


def _abs_dev_rows(rb: _RowBuilder, q: np.ndarray, xcols: range, ecols: range) -> None:
    """``e_i >= |x_i - q_i|``."""
    for i in range(q.size):
        rb.le({xcols[i]: 1.0, ecols[i]: -1.0}, q[i])
        rb.le({xcols[i]: -1.0, ecols[i]: -1.0}, -q[i])


def _validate(q, P: Polyhedron, alpha: float) -> np.ndarray:
    q = np.asarray(q, dtype=float).ravel()
    if q.size != P.n:
        raise ValueError(f"query has {q.size} entries, polyhedron has {P.n} columns")
    if not np.all(np.isfinite(q)):
        raise ValueError("query point must be finite")
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    return q


def check_feasible(P: Polyhedron) -> np.ndarray:
    """Return some point of ``P``.

    Raises:
        ValueError: If ``P`` is empty.
    """
    sol = lp_solve(LpProblem(np.zeros(P.n), P.A, P.b))
    if sol.status is LpStatus.INFEASIBLE:
        raise ValueError("polyhedron is empty")
    return sol.x


def project_lp(q, P: Polyhedron, alpha: float, g: DistortionFunction) -> ProjectionResult:
    """Project ``q`` onto ``P`` with a single LP (convex ``g`` only)."""
    alpha = float(alpha)
    q = _validate(q, P, alpha)
    if not g.is_convex:
        raise ValueError(f"distortion {g.label} is not convex; use project_enumerate or project_milp")
    if P.contains(q):
        return ProjectionResult(0.0, q.copy(), "lp", lp_count=0)
    n = P.n
    w = ges_owl_weights(alpha, g, n)
    rb = _RowBuilder()
    xcols = rb.add_vars(n)
    ecols = rb.add_vars(n)
    _polyhedron_rows(rb, P, xcols)
    _abs_dev_rows(rb, q, xcols, ecols)
    n_new, lb_new, rows, expr = owl_epigraph(n, w, ecols.start, rb.ncols)
    rb.lb.extend(lb_new)
    rb.ub.extend([np.inf] * n_new)
    for coefs, rhs in rows:
        rb.le(coefs, rhs)
    sol = lp_solve(rb.problem(expr))
    if sol.status is LpStatus.INFEASIBLE:
        raise ValueError("polyhedron is empty")
    if not sol.optimal:
        raise RuntimeError(f"projection LP ended with status {sol.status.value}")
    x = np.maximum(sol.x[:n], 0.0)
    return ProjectionResult(max(sol.value, 0.0), x, "lp")


def _threshold_objective(rb: _RowBuilder, scols: list[int], alpha: float, c: np.ndarray):
    """Columns and objective for ``t + sum_i c_i z_i / (1 - alpha)`` with
    ``z_i >= s_i - t``, where ``s_i`` is column ``scols[i]``."""
    n = len(scols)
    t = rb.add_vars(1, lb=-np.inf)[0]
    zcols = rb.add_vars(n)
    for i in range(n):
        rb.le({scols[i]: 1.0, t: -1.0, zcols[i]: -1.0}, 0.0)
    obj = {t: 1.0}
    for i in range(n):
        if c[i] != 0.0:
            obj[zcols[i]] = c[i] / (1.0 - alpha)
    return t, zcols, obj


def project_enumerate(q, P: Polyhedron, alpha: float, g: DistortionFunction,
                      max_n: int = 8) -> ProjectionResult:
    """Exact projection by solving one LP per sort order of the deviations."""
    alpha = float(alpha)
    q = _validate(q, P, alpha)
    n = P.n
    if n > max_n:
        raise ValueError(f"enumeration needs n <= {max_n}, got {n}")
    if not g.is_continuous:
        raise ValueError("distortion must be continuous")
    if P.contains(q):
        return ProjectionResult(0.0, q.copy(), "enumerate", lp_count=0)
    check_feasible(P)
    c = weights(g, n).c
    best_val, best_x, count = np.inf, None, 0
    for perm in itertools.permutations(range(n)):
        rb = _RowBuilder()
        xcols = rb.add_vars(n)
        ecols = rb.add_vars(n)
        _polyhedron_rows(rb, P, xcols)
        _abs_dev_rows(rb, q, xcols, ecols)
        for i in range(n - 1):
            rb.le({ecols[perm[i]]: 1.0, ecols[perm[i + 1]]: -1.0}, 0.0)
        _, _, obj = _threshold_objective(rb, [ecols[k] for k in perm], alpha, c)
        sol = lp_solve(rb.problem(obj))
        count += 1
        if sol.optimal and sol.value < best_val:
            best_val, best_x = sol.value, sol.x[:n]
    if best_x is None:
        raise ValueError("polyhedron is empty")
    x = np.maximum(best_x, 0.0)
    return ProjectionResult(max(best_val, 0.0), x, "enumerate", lp_count=count)


def projection_value(q, x, alpha: float, g: DistortionFunction) -> float:
    """The objective ``||q - x||`` at a candidate point."""
    return scaled_ges_norm(np.asarray(q, dtype=float) - np.asarray(x, dtype=float), alpha, g)
