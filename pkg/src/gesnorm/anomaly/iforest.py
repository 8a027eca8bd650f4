"""Isolation forest on scalar data.

In one dimension every tree node holds a contiguous run of the sorted
subsample, so a tree is fully described by that sorted subsample and one
uniform draw per node (heap numbering: root 1, children 2i and 2i + 1). Paths
are walked on demand instead of materializing the nodes.
"""

from __future__ import annotations

import math
from bisect import bisect_left

import numpy as np

from gesnorm.anomaly.config import DetectionSeries, DetectorConfig, check_series

EULER_GAMMA = 0.5772156649015329
MAX_SUBSAMPLE = 256


def c_factor(n: int) -> float:
    """Average unsuccessful-search path length in a binary search tree of n keys."""
    if n <= 1:
        return 0.0
    if n == 2:
        return 1.0
    return 2.0 * (math.log(n - 1) + EULER_GAMMA) - 2.0 * (n - 1) / n


class IsolationForest:
    """Forest of ``trees`` isolation trees, each grown on ``subsample`` points.

    Args:
        trees: Number of trees.
        subsample: Points per tree (psi); trees stop at depth ceil(log2 psi).
        rng: Source of the subsamples and split draws.
    """

    def __init__(self, trees: int, subsample: int, rng: np.random.Generator):
        if trees < 1:
            raise ValueError("need at least one tree")
        if subsample < 2:
            raise ValueError(f"subsample must be >= 2, got {subsample}")
        self.trees = trees
        self.psi = subsample
        self.depth_limit = math.ceil(math.log2(subsample))
        self.c_psi = c_factor(subsample)
        self.rng = rng
        self._samples: list[list[float]] = []
        self._splits: np.ndarray | None = None

    def fit(self, data) -> IsolationForest:
        x = np.asarray(data, dtype=float).ravel()
        if x.size < self.psi:
            raise ValueError(f"need at least {self.psi} points, got {x.size}")
        self._samples = [
            sorted(x[self.rng.choice(x.size, self.psi, replace=False)].tolist())
            for _ in range(self.trees)
        ]
        self._splits = self.rng.random((self.trees, 2 ** (self.depth_limit + 1)))
        return self

    def path_length(self, value: float, tree: int) -> float:
        a = self._samples[tree]
        u = self._splits[tree]
        lo, hi, node, depth = 0, len(a), 1, 0
        while hi - lo > 1 and depth < self.depth_limit and a[lo] < a[hi - 1]:
            p = a[lo] + u[node] * (a[hi - 1] - a[lo])
            cut = bisect_left(a, p, lo, hi)
            if value < p:
                hi, node = cut, 2 * node
            else:
                lo, node = cut, 2 * node + 1
            depth += 1
        return depth + c_factor(hi - lo)

    def score(self, value: float) -> float:
        """Anomaly score ``2 ** (-E[h(value)] / c(psi))`` in (0, 1]."""
        if self._splits is None:
            raise RuntimeError("forest is not fitted")
        mean_h = sum(self.path_length(value, i) for i in range(self.trees)) / self.trees
        if abs(mean_h - self.c_psi) <= 1e-12 * self.c_psi:
            return 0.5  # E[h] = c(psi) up to summation rounding
        return 2.0 ** (-mean_h / self.c_psi)


def iforest_detect(r, cfg: DetectorConfig) -> DetectionSeries:
    """Score r_t with a forest grown on the previous window; flag scores above the threshold.

    Each time point uses its own generator seeded with ``(seed, t)``, so any
    single score can be reproduced without replaying the series.
    """
    W = cfg.window
    if W < 3:
        raise ValueError(f"isolation forest needs window >= 3, got {W}")
    r = check_series(r, W)
    p = cfg.iforest
    psi = min(MAX_SUBSAMPLE, W - 1) if p.subsample is None else p.subsample
    if not 2 <= psi <= W - 1:
        raise ValueError(f"subsample must lie in [2, {W - 1}], got {psi}")
    stat = np.full(r.size, np.nan)
    flags = np.zeros(r.size, dtype=bool)
    for t in range(W, r.size):
        rng = np.random.default_rng([p.seed, t])
        forest = IsolationForest(p.trees, psi, rng).fit(r[t - W + 1:t])
        stat[t] = forest.score(float(r[t]))
        flags[t] = stat[t] > p.score_threshold
    return DetectionSeries("iforest", stat, flags)
