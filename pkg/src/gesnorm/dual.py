"""Ordered weighted L1 (OWL) norms and dual norms of the scaled GES norm.

For a convex distortion the scaled GES norm at any level is an OWL norm
``sum_i w_i |x|_(i)`` with nondecreasing weights, so its dual follows from
the OWL dual ``max_i tau_i * sum_{k>=i} |y|_(k)`` with
``tau_i = 1 / sum_{k>=i} w_k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gesnorm.distortion import DistortionFunction
from gesnorm.norms import BREAKPOINT_TOL, sorted_magnitudes, weights


@dataclass(frozen=True)
class OwlWeights:
    """Nondecreasing nonnegative OWL weights.

    Attributes:
        w: Weights applied to ascending magnitudes.
        degenerate: Set when the weights stand in for the max norm because
            alpha lies above the last interior breakpoint.
    """

    w: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).ravel()
        if w.size == 0:
            raise ValueError("empty weight vector")
        if np.any(w < 0):
            raise ValueError("OWL weights must be nonnegative")
        if np.any(np.diff(w) < -1e-12 * max(1.0, float(w.max()))):
            raise ValueError("OWL weights must be nondecreasing")
        if w.sum() <= 0:
            raise ValueError("OWL weights must not all be zero")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.w.size

    @property
    def tau(self) -> np.ndarray:
        return 1.0 / np.cumsum(self.w[::-1])[::-1]


def _check_dim(v, w: OwlWeights) -> np.ndarray:
    a = sorted_magnitudes(v)
    if a.size != w.n:
        raise ValueError(f"dimension mismatch: vector has {a.size} entries, weights {w.n}")
    return a


def owl_norm(x, w: OwlWeights) -> float:
    return float(np.dot(w.w, _check_dim(x, w)))


def owl_dual(y, w: OwlWeights) -> float:
    """Dual OWL norm, ``max_i tau_i * (sum of the n-i+1 largest |y_k|)``."""
    a = _check_dim(y, w)
    tails = np.cumsum(a[::-1])[::-1]
    return float(np.max(w.tau * tails))


def _require_convex(g: DistortionFunction) -> None:
    if not g.is_convex:
        raise ValueError(f"distortion {g.label} is not convex; the norm is not an OWL norm")
    if not g.is_continuous:
        raise ValueError(f"distortion {g.label} is not continuous")


def _left_interval(bp: np.ndarray, n: int, alpha: float) -> int:
    """Index j in 0..n-2 with bp[j] <= alpha <= bp[j+1], the left one on ties."""
    j = int(np.searchsorted(bp[1:n], alpha - BREAKPOINT_TOL, side="left"))
    return min(j, n - 2)


def ges_owl_weights(alpha: float, g: DistortionFunction, n: int) -> OwlWeights:
    """OWL weights reproducing the scaled GES norm of dimension ``n`` at ``alpha``.

    Above the last interior breakpoint the norm is the max norm and the
    weights ``(0, ..., 0, 1)`` are returned flagged as degenerate.
    """
    _require_convex(g)
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    nw = weights(g, n)
    bp = nw.breakpoints
    w = np.zeros(n)
    if n == 1 or alpha >= 1.0 or alpha > bp[n - 1] + BREAKPOINT_TOL:
        w[-1] = 1.0
        return OwlWeights(w, degenerate=n > 1)
    j = _left_interval(bp, n, alpha)
    gap = bp[j + 1] - alpha
    w[j] = gap / (1.0 - alpha) if gap > BREAKPOINT_TOL else 0.0
    w[j + 1:] = nw.c[j + 1:] / (1.0 - alpha)
    return OwlWeights(w)


def ges_dual_norm(y, alpha: float, g: DistortionFunction) -> float:
    """Dual norm of the scaled GES norm for a convex distortion.

    With alpha in the breakpoint interval [g(j/n), g((j+1)/n)], the dual is the
    largest of ``||y||_1`` and ``(1 - alpha) / (1 - g((i-1)/n))`` times the sum
    of the ``n - i + 1`` largest magnitudes, for i = j+2..n. Above the last
    interior breakpoint it is ``||y||_1``.
    """
    _require_convex(g)
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    a = sorted_magnitudes(y)
    n = a.size
    tails = np.cumsum(a[::-1])[::-1]  # tails[i-1] = sum_{k>=i} a_k
    l1 = float(tails[0])
    if n == 1:
        return l1
    bp = weights(g, n).breakpoints
    if alpha > bp[n - 1] + BREAKPOINT_TOL:
        return l1
    j = _left_interval(bp, n, alpha)
    best = l1
    for i in range(j + 2, n + 1):
        denom = 1.0 - bp[i - 1]
        if denom > 0.0:
            best = max(best, (1.0 - alpha) / denom * float(tails[i - 1]))
    return best


def topk_coefficients(w: OwlWeights) -> np.ndarray:
    """Nonnegative ``d`` with ``owl(x) = sum_k d[k-1] * (sum of k largest |x_i|)``."""
    v = np.append(w.w[::-1], 0.0)  # nonincreasing
    d = v[:-1] - v[1:]
    return np.maximum(d, 0.0)


def owl_epigraph(n: int, w: OwlWeights, first: int, total: int):
    """Linear pieces bounding ``owl(e)`` for a nonnegative block of variables.

    The block ``e`` occupies columns ``range(first, first + n)`` of an LP with
    ``total`` columns before this call. New columns are one free threshold
    ``t_k`` plus ``n`` nonnegative excess variables ``u_k`` per active k, with
    ``u_ki >= e_i - t_k``, and ``k t_k + sum_i u_ki`` bounds the sum of the k
    largest entries of ``e``.

    Returns:
        ``(n_new, lb_new, rows, expr)`` where ``rows`` is a list of (coef dict,
        rhs) ``<=`` constraints and ``expr`` maps column index to coefficient
        in the linear expression that upper-bounds ``owl(e)``.
    """
    d = topk_coefficients(w)
    col = total
    lb_new: list[float] = []
    rows: list[tuple[dict[int, float], float]] = []
    expr: dict[int, float] = {}
    for k in range(1, n + 1):
        dk = d[k - 1]
        if dk <= 0.0:
            continue
        t = col
        col += 1
        lb_new.append(-np.inf)
        expr[t] = dk * k
        for i in range(n):
            u = col
            col += 1
            lb_new.append(0.0)
            expr[u] = dk
            rows.append(({first + i: 1.0, t: -1.0, u: -1.0}, 0.0))
    return col - total, lb_new, rows, expr


def dual_via_lp_oracle(y, alpha: float, g: DistortionFunction) -> float:
    """Dual norm as ``max y @ x`` over the GES unit ball, solved as an LP.

    The ball is written through its OWL form, with ``e >= |x|`` and the top-k
    epigraph of :func:`owl_epigraph`.
    """
    from gesnorm.optimize.simplex import LpProblem, lp_solve

    y = np.asarray(y, dtype=float).ravel()
    n = y.size
    if n == 0:
        raise ValueError("empty vector")
    if n > 8:
        raise ValueError(f"LP oracle is meant for n <= 8, got {n}")
    if not np.any(y):
        return 0.0
    w = ges_owl_weights(alpha, g, n)
    # columns: x (free) | e (>= 0) | epigraph
    n_epi, lb_epi, epi_rows, expr = owl_epigraph(n, w, n, 2 * n)
    total = 2 * n + n_epi
    lb = np.concatenate([np.full(n, -np.inf), np.zeros(n), lb_epi])
    rows = []
    for i in range(n):
        rows.append(({i: 1.0, n + i: -1.0}, 0.0))
        rows.append(({i: -1.0, n + i: -1.0}, 0.0))
    rows.extend(epi_rows)
    rows.append((expr, 1.0))
    A = np.zeros((len(rows), total))
    b = np.zeros(len(rows))
    for r, (coefs, rhs) in enumerate(rows):
        for j, v in coefs.items():
            A[r, j] = v
        b[r] = rhs
    c = np.zeros(total)
    c[:n] = -y
    sol = lp_solve(LpProblem(c, A, b, lb=lb))
    if not sol.optimal:
        raise RuntimeError(f"dual LP oracle failed: {sol.status.value}")
    return -sol.value
