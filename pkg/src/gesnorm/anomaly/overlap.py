"""Pairwise overlap of flag sets across detectors.

Cell (i, j) counts the time points flagged by both method i and method j, and
its percentage is taken relative to the column method's total.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping

import numpy as np


@dataclass(frozen=True)
class OverlapMatrix:
    names: tuple[str, ...]
    counts: np.ndarray  # (k, k) integers, symmetric

    @property
    def totals(self) -> np.ndarray:
        return np.diag(self.counts).copy()

    @property
    def percentages(self) -> np.ndarray:
        """``100 * counts[i, j] / counts[j, j]``; 0 where the column total is 0."""
        tot = self.totals.astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            pct = 100.0 * self.counts / tot[None, :]
        return np.where(tot[None, :] > 0, pct, 0.0)

    def cell(self, i: int, j: int) -> str:
        """Table text: the bare total on the diagonal, ``"58 (84.06%)"`` elsewhere."""
        if i == j:
            return str(int(self.counts[i, i]))
        return f"{int(self.counts[i, j])} ({self.percentages[i, j]:.2f}%)"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", *self.names])
        for i, name in enumerate(self.names):
            w.writerow([name, *(self.cell(i, j) for j in range(len(self.names)))])
        return buf.getvalue()


def overlap_matrix(flag_sets: Mapping[str, np.ndarray]) -> OverlapMatrix:
    """Build the overlap matrix from named boolean flag series of equal length."""
    if not flag_sets:
        raise ValueError("need at least one flag series")
    names = tuple(flag_sets)
    F = [np.asarray(flag_sets[k], dtype=bool).ravel() for k in names]
    if len({f.size for f in F}) != 1:
        sizes = ", ".join(f"{k}={f.size}" for k, f in zip(names, F))
        raise ValueError(f"flag series have different lengths: {sizes}")
    M = np.stack(F).astype(np.int64)
    return OverlapMatrix(names, M @ M.T)
