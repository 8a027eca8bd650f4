"""Projection as a mixed-integer LP solved by depth-first branch and bound.

Variables per dimension n:

    x   point in the polyhedron
    y   y_i >= |x_i - q_i|
    s   y sorted ascending, chosen through the assignment matrix U
    z   z_i >= s_i - t, z_i >= 0
    t   free threshold
    U   n x n binaries, rows and columns summing to one

The objective is ``t + sum_i c_i z_i / (1 - alpha)``. The coupling
``s_i = sum_k u_ik y_k`` is linearized with a big-M pair of inequalities.
Two families of valid inequalities tighten the relaxation without cutting off
any integer point: ``sum(s) == sum(y)`` and, separated on demand, "the j
largest s_i sum to at least any j of the y_k". With a convex distortion these
make the root relaxation exact, so the search usually closes at the root.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from gesnorm.distortion import DistortionFunction
from gesnorm.norms import weights
from gesnorm.optimize.projection import (
    Polyhedron,
    ProjectionResult,
    _abs_dev_rows,
    _polyhedron_rows,
    _RowBuilder,
    _threshold_objective,
    _validate,
    projection_value,
)
from gesnorm.optimize.simplex import LpProblem, LpStatus, lp_solve

logger = logging.getLogger(__name__)

INT_TOL = 1e-6
CUT_TOL = 1e-9
MAX_CUT_ROUNDS = 100


class NodeLimitExceeded(RuntimeError):
    """Raised when branch and bound runs out of nodes; carries the incumbent."""

    def __init__(self, message: str, incumbent: ProjectionResult | None):
        super().__init__(message)
        self.incumbent = incumbent


@dataclass(frozen=True)
class MilpModel:
    """Column layout and big-M constant of the projection MILP."""

    n: int
    big_m: float

    @property
    def x(self) -> range:
        return range(0, self.n)

    @property
    def y(self) -> range:
        return range(self.n, 2 * self.n)

    @property
    def s(self) -> range:
        return range(2 * self.n, 3 * self.n)

    def u(self, i: int, k: int) -> int:
        # x, y, s, then t and z from the objective builder, then U
        return 4 * self.n + 1 + i * self.n + k

    @property
    def ncols(self) -> int:
        return 4 * self.n + 1 + self.n * self.n


def big_m_bound(q: np.ndarray, P: Polyhedron) -> float:
    """``max_i (|q_i| + max_{x in P} x_i)``; bounds every deviation |x_k - q_k|.

    Raises:
        ValueError: If P is empty or unbounded in some coordinate.
    """
    ub = np.empty(P.n)
    for i in range(P.n):
        c = np.zeros(P.n)
        c[i] = -1.0
        sol = lp_solve(LpProblem(c, P.A, P.b))
        if sol.status is LpStatus.INFEASIBLE:
            raise ValueError("polyhedron is empty")
        if sol.status is LpStatus.UNBOUNDED:
            raise ValueError(f"polyhedron is unbounded in coordinate {i}; pass big_m explicitly")
        ub[i] = -sol.value
    return float(np.max(np.abs(q) + ub))


def _build(model: MilpModel, q, P, alpha, c, fixed: dict[int, int], cuts) -> LpProblem:
    n, M = model.n, model.big_m
    rb = _RowBuilder()
    rb.add_vars(n)           # x
    rb.add_vars(n)           # y
    rb.add_vars(n)           # s
    _polyhedron_rows(rb, P, model.x)
    _abs_dev_rows(rb, q, model.x, model.y)
    _, _, obj = _threshold_objective(rb, list(model.s), alpha, c)
    rb.add_vars(n * n)  # u <= 1 follows from the assignment rows
    for col, val in fixed.items():
        rb.lb[col] = rb.ub[col] = float(val)
    for i in range(n):
        rb.eq({model.u(i, k): 1.0 for k in range(n)}, 1.0)
        rb.eq({model.u(k, i): 1.0 for k in range(n)}, 1.0)
    for i in range(n):
        si = model.s[i]
        for k in range(n):
            yk, uik = model.y[k], model.u(i, k)
            rb.le({yk: 1.0, si: -1.0, uik: M}, M)
            rb.le({si: 1.0, yk: -1.0, uik: M}, M)
    for i in range(n - 1):
        rb.le({model.s[i]: 1.0, model.s[i + 1]: -1.0}, 0.0)
    coefs = {col: 1.0 for col in model.s}
    for col in model.y:
        coefs[col] = -1.0
    rb.eq(coefs, 0.0)
    for j, subset in cuts:
        coefs = {model.s[i]: -1.0 for i in range(n - j, n)}
        for k in subset:
            coefs[model.y[k]] = coefs.get(model.y[k], 0.0) + 1.0
        rb.le(coefs, 0.0)
    return rb.problem(obj)


def _separate(model: MilpModel, sol_x: np.ndarray, cuts: set) -> list:
    n = model.n
    y = sol_x[model.y.start:model.y.stop]
    s = sol_x[model.s.start:model.s.stop]
    order = np.argsort(-y, kind="stable")
    new = []
    for j in range(1, n):
        subset = tuple(sorted(int(k) for k in order[:j]))
        if (j, subset) in cuts:
            continue
        lhs = float(s[n - j:].sum())
        rhs = float(y[list(subset)].sum())
        if lhs < rhs - CUT_TOL * max(1.0, abs(rhs)):
            new.append((j, subset))
    return new


def project_milp(q, P: Polyhedron, alpha: float, g: DistortionFunction,
                 node_limit: int = 1_000_000, big_m: float | None = None,
                 raise_on_limit: bool = False) -> ProjectionResult:
    """Exact projection through the assignment MILP.

    Args:
        node_limit: Maximum number of branch-and-bound nodes. When reached,
            the best incumbent is returned with ``proven_optimal=False`` (or
            :class:`NodeLimitExceeded` is raised if ``raise_on_limit``).
        big_m: Override for the linearization constant.
    """
    alpha = float(alpha)
    q = _validate(q, P, alpha)
    if not g.is_continuous:
        raise ValueError("distortion must be continuous")
    n = P.n
    if P.contains(q):
        return ProjectionResult(0.0, q.copy(), "milp", lp_count=0, nodes=0)
    M = big_m_bound(q, P) if big_m is None else float(big_m)
    model = MilpModel(n, M)
    c = weights(g, n).c

    # s_n >= y_k for every k is the j = 1 family; seed it for all k
    cuts: set = {(1, (k,)) for k in range(n)}
    inc_val, inc_x = np.inf, None
    stack: list[dict[int, int]] = [{}]
    nodes = lps = 0

    while stack:
        if nodes >= node_limit:
            msg = f"branch and bound hit the node limit ({node_limit})"
            res = None if inc_x is None else ProjectionResult(
                inc_val, inc_x, "milp", lps, nodes, proven_optimal=False)
            if raise_on_limit:
                raise NodeLimitExceeded(msg, res)
            logger.warning(msg)
            if res is None:
                raise NodeLimitExceeded(msg, None)
            return res
        fixed = stack.pop()
        nodes += 1
        sol = None
        for _ in range(MAX_CUT_ROUNDS):
            sol = lp_solve(_build(model, q, P, alpha, c, fixed, sorted(cuts)))
            lps += 1
            if not sol.optimal:
                break
            new = _separate(model, sol.x, cuts)
            if not new:
                break
            cuts.update(new)
        if sol.status is LpStatus.INFEASIBLE:
            if not fixed:
                raise ValueError("polyhedron is empty")
            continue
        if not sol.optimal:
            raise RuntimeError(f"MILP relaxation ended with status {sol.status.value}")
        bound = sol.value
        if bound >= inc_val - 1e-9 * max(1.0, abs(inc_val)):
            continue
        x = np.maximum(sol.x[:n], 0.0)
        val = projection_value(q, x, alpha, g)
        if val < inc_val:
            inc_val, inc_x = val, x
        if bound >= inc_val - 1e-9 * max(1.0, abs(inc_val)):
            continue
        u = sol.x[model.u(0, 0):model.u(0, 0) + n * n]
        frac = np.abs(u - np.round(u))
        if frac.max() <= INT_TOL:
            # integral assignment: the relaxation point is MILP-feasible
            if bound < inc_val:
                inc_val, inc_x = bound, x
            continue
        idx = int(np.argmin(np.abs(u - 0.5)))
        col = model.u(0, 0) + idx
        stack.append({**fixed, col: 0})
        stack.append({**fixed, col: 1})

    return ProjectionResult(max(inc_val, 0.0), inc_x, "milp", lp_count=lps, nodes=nodes)
