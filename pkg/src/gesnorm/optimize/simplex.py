"""Dense two-phase primal simplex.

Solves

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                lb <= x <= ub

on a full tableau. Pivoting uses the largest-reduced-cost rule and drops to
Bland's smallest-index rule after a run of degenerate pivots, so the method
cannot cycle. Every choice is a deterministic function of the input.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-8
OPT_TOL = 1e-9
PIVOT_TOL = 1e-10
DEGENERATE_RUN = 20


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LpProblem:
    """A linear program in inequality form. Omitted parts default to empty/zero/inf."""

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "ub")
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "eq")
        self.lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float).ravel().copy()
        self.ub = np.full(n, np.inf) if self.ub is None else np.asarray(self.ub, dtype=float).ravel().copy()
        if self.lb.size != n or self.ub.size != n:
            raise ValueError("bound vectors must match the number of variables")
        for name in ("c", "A_ub", "b_ub", "A_eq", "b_eq"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} has NaN or infinite entries")
        if np.any(np.isnan(self.lb)) or np.any(np.isnan(self.ub)):
            raise ValueError("bounds contain NaN")
        if np.any(self.lb == np.inf) or np.any(self.ub == -np.inf):
            raise ValueError("bounds are infeasible by construction")

    @property
    def n(self) -> int:
        return self.c.size

    def violation(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation at ``x``."""
        v = [0.0]
        if self.A_ub.shape[0]:
            v.append(float(np.max(self.A_ub @ x - self.b_ub)))
        if self.A_eq.shape[0]:
            v.append(float(np.max(np.abs(self.A_eq @ x - self.b_eq))))
        v.append(float(np.max(self.lb - x)))
        v.append(float(np.max(x - self.ub)))
        return max(v)


def _rows(A, b, n, what):
    if A is None:
        if b is not None and np.size(b):
            raise ValueError(f"b_{what} given without A_{what}")
        return np.zeros((0, n)), np.zeros(0)
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else np.zeros((0, n))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape[1] != n or A.shape[0] != b.size:
        raise ValueError(f"A_{what} has shape {A.shape}, expected ({b.size}, {n})")
    return A, b


@dataclass
class LpSolution:
    status: LpStatus
    value: float = float("nan")
    x: np.ndarray | None = field(default=None, repr=False)
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Rows ``T[:m]`` are constraints with rhs in the last column; ``T[m]`` is the cost row."""

    def __init__(self, T: np.ndarray, basis: np.ndarray):
        self.T = T
        self.basis = basis
        self.iterations = 0
        self.pivots: list[tuple[int, int]] = []

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j
        self.iterations += 1
        self.pivots.append((r, j))

    def run(self, allowed: np.ndarray, max_iter: int) -> LpStatus:
        """Minimize the cost row over columns where ``allowed`` is True."""
        T = self.T
        degenerate = 0
        while True:
            if self.iterations >= max_iter:
                raise RuntimeError(f"simplex exceeded {max_iter} iterations")
            red = T[-1, :-1]
            cand = np.flatnonzero(allowed & (red < -OPT_TOL))
            if cand.size == 0:
                return LpStatus.OPTIMAL
            bland = degenerate >= DEGENERATE_RUN
            j = int(cand[0]) if bland else int(cand[np.argmin(red[cand])])
            col = T[:-1, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return LpStatus.UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            # smallest basic index among the tied rows
            r = int(ties[np.argmin(self.basis[ties])])
            degenerate = degenerate + 1 if T[r, -1] <= FEAS_TOL else 0
            self.pivot(r, j)


def lp_solve(p: LpProblem, max_iter: int = 50_000) -> LpSolution:
    """Solve ``p`` and return status, optimal value, point and pivot count.

    Raises:
        RuntimeError: If the iteration cap is hit.
    """
    n = p.n
    lb, ub = p.lb, p.ub
    # x = shift + M @ z with z >= 0
    shift = np.zeros(n)
    cols: list[tuple[int, float]] = []   # (original var, sign) per z column
    extra_ub: list[tuple[int, float]] = []  # (z column, bound)
    for i in range(n):
        lo, hi = lb[i], ub[i]
        if lo > hi + FEAS_TOL:
            return LpSolution(LpStatus.INFEASIBLE)
        if np.isfinite(lo) and np.isfinite(hi) and hi - lo <= FEAS_TOL:
            shift[i] = lo
        elif np.isfinite(lo):
            shift[i] = lo
            cols.append((i, 1.0))
            if np.isfinite(hi):
                extra_ub.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            shift[i] = hi
            cols.append((i, -1.0))
        else:
            cols.append((i, 1.0))
            cols.append((i, -1.0))
    nz = len(cols)
    M = np.zeros((n, nz))
    for k, (i, s) in enumerate(cols):
        M[i, k] = s

    A_ub = p.A_ub @ M
    b_ub = p.b_ub - p.A_ub @ shift
    if extra_ub:
        E = np.zeros((len(extra_ub), nz))
        for r, (k, bound) in enumerate(extra_ub):
            E[r, k] = 1.0
        A_ub = np.vstack([A_ub, E])
        b_ub = np.concatenate([b_ub, [bd for _, bd in extra_ub]])
    A_eq = p.A_eq @ M
    b_eq = p.b_eq - p.A_eq @ shift
    cz = p.c @ M
    const = float(p.c @ shift)

    sol = _solve_standard(cz, A_ub, b_ub, A_eq, b_eq, max_iter)
    if sol.status is not LpStatus.OPTIMAL:
        return sol
    x = shift + M @ sol.x
    return LpSolution(LpStatus.OPTIMAL, float(p.c @ x), x, sol.iterations)


def _solve_standard(c, A_ub, b_ub, A_eq, b_eq, max_iter) -> LpSolution:
    """min c@z, A_ub z <= b_ub, A_eq z == b_eq, z >= 0."""
    nz = c.size
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    if m == 0:
        if np.any(c < -OPT_TOL):
            return LpSolution(LpStatus.UNBOUNDED)
        return LpSolution(LpStatus.OPTIMAL, 0.0, np.zeros(nz), 0)

    # columns: z | slacks (one per ub row) | artificials (one per row needing it)
    neg_ub = b_ub < 0
    A = np.vstack([A_ub, A_eq])
    b = np.concatenate([b_ub, b_eq])
    slack = np.zeros((m, m_ub))
    slack[np.arange(m_ub), np.arange(m_ub)] = 1.0
    flip = np.concatenate([neg_ub, b_eq < 0])
    A[flip] *= -1.0
    b[flip] *= -1.0
    slack[flip] *= -1.0
    need_art = np.concatenate([neg_ub, np.ones(m_eq, dtype=bool)])
    art_rows = np.flatnonzero(need_art)
    n_art = art_rows.size
    art = np.zeros((m, n_art))
    art[art_rows, np.arange(n_art)] = 1.0

    ncol = nz + m_ub + n_art
    T = np.zeros((m + 1, ncol + 1))
    T[:m, :nz] = A
    T[:m, nz:nz + m_ub] = slack
    T[:m, nz + m_ub:ncol] = art
    T[:m, -1] = b
    basis = np.empty(m, dtype=int)
    ub_rows = np.flatnonzero(~need_art)
    basis[ub_rows] = nz + ub_rows
    basis[art_rows] = nz + m_ub + np.arange(n_art)
    tab = _Tableau(T, basis)

    art_start = nz + m_ub
    if n_art:
        T[-1, :] = 0.0
        T[-1, art_start:ncol] = 1.0
        T[-1] -= T[art_rows].sum(axis=0)
        allowed = np.ones(ncol, dtype=bool)
        tab.run(allowed, max_iter)
        scale = max(1.0, float(np.max(np.abs(b))))
        if -T[-1, -1] > FEAS_TOL * scale:
            return LpSolution(LpStatus.INFEASIBLE, iterations=tab.iterations)
        # pivot remaining (zero-level) artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if tab.basis[r] >= art_start:
                row = T[r, :art_start]
                nzc = np.flatnonzero(np.abs(row) > 1e-9)
                if nzc.size:
                    tab.pivot(r, int(nzc[0]))
                else:
                    keep[r] = False
        if not keep.all():
            tab.T = np.vstack([T[:-1][keep], T[-1:]])
            tab.basis = tab.basis[keep]
            T = tab.T
        T = np.delete(T, np.s_[art_start:ncol], axis=1)
        tab.T = T

    ncol = nz + m_ub
    T[-1, :] = 0.0
    T[-1, :nz] = c
    for r, j in enumerate(tab.basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    status = tab.run(np.ones(ncol, dtype=bool), max_iter)
    if status is LpStatus.UNBOUNDED:
        return LpSolution(status, iterations=tab.iterations)
    full = np.zeros(ncol)
    full[tab.basis] = T[:-1, -1]
    z = np.maximum(full[:nz], 0.0)
    return LpSolution(LpStatus.OPTIMAL, float(c @ z), z, tab.iterations)
