"""
Sweeps of the inter-step interval, regime classification and jittered schedules.

Every scan cell is an independent walk; cells may run on a thread pool but
results are always merged in grid order, so output does not depend on the
number of workers.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .observables import (
    SpreadRecord,
    default_fit_range,
    distribution,
    growth_exponent,
    spread,
)
from .spectra import RationalOfTalbot
from .walk import ScheduleJitter, WalkConfig, evolve

__all__ = [
    "BALLISTIC",
    "SUPERCLASSICAL",
    "CLASSICAL",
    "LOCALIZED",
    "ScheduleJitter",
    "ScanCell",
    "ScanResult",
    "RandomizedResult",
    "spread_series",
    "tau_scan",
    "symmetry_check",
    "classify",
    "label_for",
    "randomized_walk",
]

log = logging.getLogger(__name__)

BALLISTIC = "ballistic"
SUPERCLASSICAL = "superclassical"
CLASSICAL = "classical"
LOCALIZED = "subclassical/localized"


def label_for(alpha: float) -> str:
    if alpha >= 0.9:
        return BALLISTIC
    if alpha >= 0.6:
        return SUPERCLASSICAL
    if alpha >= 0.4:
        return CLASSICAL
    return LOCALIZED


def classify(records: Sequence[SpreadRecord], fit_range: Optional[tuple[int, int]] = None) -> tuple[str, float]:
    """Label a trajectory by its fitted spread exponent; returns ``(label, alpha)``."""
    fit = growth_exponent(records, fit_range)
    return label_for(fit.alpha), fit.alpha


def spread_series(config: WalkConfig) -> list[SpreadRecord]:
    """Spread statistics after every step ``0..config.steps``."""
    states = evolve(config, record=range(config.steps + 1))
    return [spread(distribution(s)) for s in states]


@dataclass
class ScanCell:
    k: int
    tau_over_T: float
    final: Optional[SpreadRecord] = None
    records: Optional[list[SpreadRecord]] = None
    alpha: Optional[float] = None
    label: Optional[str] = None
    error: Optional[str] = None


@dataclass
class ScanResult:
    grid: int
    steps: int
    model: object
    cells: list[ScanCell] = field(default_factory=list)

    @property
    def tau_grid(self) -> list[tuple[int, float]]:
        return [(c.k, c.tau_over_T) for c in self.cells]

    def stddevs(self) -> np.ndarray:
        return np.array([np.nan if c.final is None else c.final.stddev for c in self.cells])


def _run_cell(config: WalkConfig, k: int, grid: int, keep_records: bool) -> ScanCell:
    tau = RationalOfTalbot(k, grid)
    cell = ScanCell(k, k / grid)
    try:
        records = spread_series(config.with_tau(tau))
    except Exception as exc:  # reported per cell, scan continues
        log.warning("scan cell k=%d failed: %s", k, exc)
        cell.error = f"{type(exc).__name__}: {exc}"
        return cell
    cell.final = records[-1]
    try:
        cell.label, cell.alpha = classify(records, default_fit_range(config.steps))
    except ValueError:
        pass  # too few steps or zero spread in range
    if keep_records:
        cell.records = records
    return cell


def tau_scan(config: WalkConfig, grid: int = 100, record_per_step: bool = False,
             workers: int = 1) -> ScanResult:
    """
    Run one walk per interval ``tau_k = (k/grid) * T`` for ``k = 0..grid-1``.

    Parameters
    ----------
    config : WalkConfig
        Base configuration; its ``tau`` is ignored.
    grid : int
        Number of equal divisions of the Talbot time, at least 2.
    record_per_step : bool
        Keep the full spread trajectory of every cell.
    workers : int
        Thread count; has no effect on the result.
    """
    if grid < 2:
        raise ValueError(f"grid must be >= 2 (got {grid})")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    base = replace(config, jitter=None)
    args = [(base, k, grid, record_per_step) for k in range(grid)]
    if workers == 1:
        cells = [_run_cell(*a) for a in args]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(lambda a: _run_cell(*a), args))
    return ScanResult(grid, config.steps, config.model, cells)


def symmetry_check(result: ScanResult) -> float:
    """Largest ``|sigma(tau_k) - sigma(tau_{grid-k})|`` over interior mirrored pairs."""
    if result.grid % 2:
        raise ValueError(f"symmetry check needs an even grid (got {result.grid})")
    s = result.stddevs()
    worst = 0.0
    for k in range(1, result.grid // 2):
        worst = max(worst, abs(s[k] - s[result.grid - k]))
    return float(worst)


@dataclass
class RandomizedResult:
    seeds: list[int]
    records: list[list[SpreadRecord]]

    @property
    def final_stddevs(self) -> np.ndarray:
        return np.array([r[-1].stddev for r in self.records])

    @property
    def mean_final_stddev(self) -> float:
        return float(np.mean(self.final_stddevs))


def randomized_walk(config: WalkConfig, half_width: float, seeds: Sequence[int]) -> RandomizedResult:
    """Repeat a walk with independently jittered interval schedules, one per seed."""
    if len(seeds) < 1:
        raise ValueError("need at least one seed")
    records = [spread_series(replace(config, jitter=ScheduleJitter(half_width, int(s)))) for s in seeds]
    return RandomizedResult([int(s) for s in seeds], records)
