"""Synthetic return series with injected spikes.

A spike at t is scaled to exceed the largest absolute return among the
previous ``window - 1`` points by a factor, so the GES detector must flag it
at every alpha. Spikes are spaced at least ``window`` apart so that no spike
sits in another spike's reference window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gesnorm.optimize.experiments import make_rng


@dataclass
class SyntheticSeries:
    returns: np.ndarray
    spikes: np.ndarray  # sorted indices of injected points
    window: int
    seed: int


def synthetic_returns(n: int = 1000, window: int = 30, n_spikes: int = 10, *,
                      scale: float = 0.01, df: float = 5.0, factor: float = 3.0,
                      seed: int = 0) -> SyntheticSeries:
    """Student-t returns with ``n_spikes`` injected anomalies of random sign.

    Each spike has magnitude ``factor * max |previous window|`` (factor > 1).
    """
    if factor <= 1.0:
        raise ValueError("factor must exceed 1 so that spikes beat the window maximum")
    usable = n - window
    if n_spikes < 0 or usable < 1 or n_spikes * window > usable:
        raise ValueError(f"cannot place {n_spikes} spikes {window} apart in {n} points")
    rng = make_rng(seed)
    r = scale * rng.standard_t(df, size=n)
    # gaps of at least `window` between spikes, the rest spread at random
    slack = usable - n_spikes * window
    cuts = np.sort(rng.integers(0, slack + 1, size=n_spikes))
    spikes = window + cuts + window * np.arange(n_spikes)
    signs = rng.choice([-1.0, 1.0], size=n_spikes)
    for t, sgn in zip(spikes, signs):
        ref = np.abs(r[t - window + 1:t]).max()
        r[t] = sgn * factor * max(ref, scale)
    return SyntheticSeries(r, spikes.astype(int), window, int(seed))


def recall(flags, spikes) -> float:
    spikes = np.asarray(spikes, dtype=int)
    if spikes.size == 0:
        return 1.0
    return float(np.asarray(flags, dtype=bool)[spikes].mean())
