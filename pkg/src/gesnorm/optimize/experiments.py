"""Random projection instances and the alpha sweep over distortions.

Instances draw ``A`` (m x n), a reference point ``x_star`` and a perturbation
``d`` uniformly on [0, 1], in that order, from a PCG64 generator seeded with
the instance seed; uniforms come from 53-bit mantissa division. Then
``b = A x_star + 0.1`` and the query is ``q = x_star + d / 2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from gesnorm.distortion import DistortionFunction
from gesnorm.optimize.projection import Polyhedron, project_lp

SLACK = 0.1


def make_rng(seed: int) -> np.random.Generator:
    """Repository-wide generator: PCG64 (64-bit state, 53-bit uniform doubles)."""
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass
class ProjectionInstance:
    q: np.ndarray
    polyhedron: Polyhedron
    x_star: np.ndarray
    d: np.ndarray
    seed: int
    q_infeasible: bool = field(init=False)

    def __post_init__(self):
        self.q_infeasible = not self.polyhedron.contains(self.q, tol=0.0)

    @property
    def n(self) -> int:
        return self.polyhedron.n

    @property
    def m(self) -> int:
        return self.polyhedron.m

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "seed": int(self.seed),
            "A": self.polyhedron.A.tolist(),
            "b": self.polyhedron.b.tolist(),
            "x_star": self.x_star.tolist(),
            "d": self.d.tolist(),
            "q": self.q.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> ProjectionInstance:
        n, m = int(data["n"]), int(data["m"])
        A = np.asarray(data["A"], dtype=float).reshape(m, n)
        inst = cls(
            q=np.asarray(data["q"], dtype=float),
            polyhedron=Polyhedron(A, np.asarray(data["b"], dtype=float)),
            x_star=np.asarray(data["x_star"], dtype=float),
            d=np.asarray(data["d"], dtype=float),
            seed=int(data["seed"]),
        )
        if inst.q.size != n or inst.x_star.size != n or inst.d.size != n:
            raise ValueError("instance vectors must have length n")
        return inst


def generate_instance(n: int, m: int, seed: int) -> ProjectionInstance:
    if n < 1 or m < 1:
        raise ValueError(f"need n, m >= 1, got n={n}, m={m}")
    rng = make_rng(seed)
    A = rng.random((m, n))
    x_star = rng.random(n)
    d = rng.random(n)
    b = A @ x_star + SLACK
    return ProjectionInstance(x_star + d / 2.0, Polyhedron(A, b), x_star, d, int(seed))


DEFAULT_ALPHA_GRID = tuple(np.round(np.arange(0.0, 0.951, 0.05), 2))


def alpha_sweep(inst: ProjectionInstance, alphas: Iterable[float] = DEFAULT_ALPHA_GRID,
                distortions: Sequence[DistortionFunction] = ()) -> list[tuple[str, float, float]]:
    """Projection value for every (distortion, alpha) pair, in input order.

    Returns:
        Rows ``(distortion label, alpha, value)``.
    """
    alphas = [float(a) for a in alphas]
    rows = []
    for g in distortions:
        if not g.is_convex:
            raise ValueError(f"sweep needs convex distortions, got {g.label}")
        for alpha in alphas:
            res = project_lp(inst.q, inst.polyhedron, alpha, g)
            rows.append((g.label, alpha, res.value))
    return rows


def infeasible_fraction(n: int, m: int, seeds: Iterable[int]) -> float:
    """Share of generated instances whose query point lies outside the polyhedron."""
    flags = [generate_instance(n, m, s).q_infeasible for s in seeds]
    if not flags:
        raise ValueError("no seeds given")
    return sum(flags) / len(flags)
