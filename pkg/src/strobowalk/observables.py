"""Position distribution, spread statistics and power-law growth fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .walk import WalkerState

__all__ = [
    "Distribution",
    "SpreadRecord",
    "GrowthFit",
    "distribution",
    "spread",
    "classical_reference",
    "growth_exponent",
    "default_fit_range",
]


@dataclass(frozen=True)
class Distribution:
    """Probability per displacement ``n - n0`` after ``step`` steps."""

    offsets: NDArray[np.int64]
    probabilities: NDArray[np.float64]
    step: int

    def as_dict(self, occupied_only: bool = True) -> dict[int, float]:
        keep = self.parity_mask() if occupied_only else np.ones(len(self.offsets), bool)
        return {int(o): float(p) for o, p in zip(self.offsets[keep], self.probabilities[keep])}

    def parity_mask(self) -> NDArray[np.bool_]:
        """Offsets reachable after ``step`` steps: same parity as ``step``."""
        return (self.offsets - self.step) % 2 == 0

    def total(self) -> float:
        return float(np.sum(self.probabilities))


@dataclass(frozen=True)
class SpreadRecord:
    step: int
    mean: float
    stddev: float
    rms_displacement: float
    norm_error: float


def distribution(state: WalkerState) -> Distribution:
    """P(n, t) over the light cone ``|n - n0| <= t``."""
    t = state.step_count
    c = state.capacity
    amps = state.amplitudes[:, c - t:c + t + 1]
    probs = np.abs(amps[0]) ** 2 + np.abs(amps[1]) ** 2
    return Distribution(np.arange(-t, t + 1), probs, t)


def spread(dist: Distribution, step: Optional[int] = None) -> SpreadRecord:
    """
    First and second moments of a distribution, measured from the start site.

    ``stddev`` is the central standard deviation and ``rms_displacement`` the
    root-mean-square distance from the start site; ``rms**2 = stddev**2 + mean**2``.
    """
    n = dist.offsets.astype(np.float64)
    p = dist.probabilities
    total = float(np.sum(p))
    mean = float(np.sum(n * p))
    second = float(np.sum(n * n * p))
    var = max(second - mean * mean, 0.0)
    return SpreadRecord(
        step=dist.step if step is None else int(step),
        mean=mean,
        stddev=math.sqrt(var),
        rms_displacement=math.sqrt(max(second, 0.0)),
        norm_error=abs(1.0 - total),
    )


def classical_reference(step: int) -> Distribution:
    """Exact binomial distribution of ``step`` fair ±1 moves."""
    if step < 1:
        raise ValueError(f"classical reference needs step >= 1 (got {step})")
    offsets = np.arange(-step, step + 1)
    probs = np.zeros(2 * step + 1)
    scale = 2.0**-step
    for k in range(step + 1):
        # k moves to the right: offset 2k - step
        probs[2 * k] = math.comb(step, k) * scale
    return Distribution(offsets, probs, step)


@dataclass(frozen=True)
class GrowthFit:
    alpha: float
    prefactor: float
    residual: float
    n_points: int


def default_fit_range(steps: int) -> tuple[int, int]:
    """Second half of a trajectory, where early oscillations have died out."""
    return steps // 2, steps


def growth_exponent(records: Sequence[SpreadRecord], fit_range: Optional[tuple[int, int]] = None,
                    min_points: int = 10) -> GrowthFit:
    """
    Fit ``stddev ~ C * t**alpha`` by least squares in log-log space.

    Parameters
    ----------
    records : sequence of SpreadRecord
    fit_range : (int, int), optional
        Inclusive step interval. Defaults to the last half of the records.
    min_points : int
        Minimum number of records required inside the range.

    Returns
    -------
    GrowthFit
        Exponent, prefactor ``C`` and root-mean-square residual of the log fit.

    Raises
    ------
    ValueError
        Too few records in range, or a zero spread (log undefined).
    """
    if fit_range is None:
        fit_range = default_fit_range(max(r.step for r in records))
    a, b = fit_range
    sel = [r for r in records if a <= r.step <= b]
    if len(sel) < min_points:
        raise ValueError(f"need >= {min_points} records in steps [{a}, {b}], got {len(sel)}")
    t = np.array([r.step for r in sel], dtype=np.float64)
    s = np.array([r.stddev for r in sel], dtype=np.float64)
    if np.any(t <= 0) or np.any(s <= 0):
        raise ValueError("growth fit needs strictly positive steps and spreads")
    x, y = np.log(t), np.log(s)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return GrowthFit(float(slope), float(np.exp(intercept)), float(np.sqrt(np.mean(resid**2))), len(sel))
