"""
State vector and step operator of the stroboscopic coined walk on a line.

One step multiplies each site's coin pair by the free-evolution phase of that
site, rotates the pair with the coin, then moves the coin-0 component one site
to the right and the coin-1 component one site to the left. With all phases
equal to one this is the ordinary coined walk.

The state is stored densely on a window ``[origin - capacity, origin + capacity]``
allocated once, where ``capacity`` is the largest step count the state may reach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np
from numpy.typing import NDArray

from .spectra import (
    Harmonic,
    PhaseTable,
    RationalOfTalbot,
    SpectrumModel,
    TauSpec,
    phase_table,
    resolve_tau,
)

__all__ = [
    "NORM_TOL",
    "UNITARY_TOL",
    "NormalizationError",
    "WindowError",
    "CoinOperator",
    "WalkerState",
    "ScheduleJitter",
    "WalkConfig",
    "hadamard_coin",
    "initial_state",
    "step",
    "interval_schedule",
    "evolve",
]

NORM_TOL = 1e-12
UNITARY_TOL = 1e-12
DEFAULT_COIN_AMPLITUDES = (1 / math.sqrt(2), 1j / math.sqrt(2))


class NormalizationError(ValueError):
    pass


class WindowError(RuntimeError):
    """The lattice window is too small for the requested evolution."""


@dataclass(frozen=True)
class CoinOperator:
    entries: NDArray[np.complex128]

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError(f"coin must be 2x2 (got shape {m.shape})")
        if np.max(np.abs(m.conj().T @ m - np.eye(2))) > UNITARY_TOL:
            raise ValueError("coin matrix is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.entries.imag == 0))

    def apply(self, pair):
        """Act on a coin pair, or on a ``(2, N)`` array of pairs."""
        return self.entries @ np.asarray(pair, dtype=np.complex128)


def hadamard_coin() -> CoinOperator:
    """(1/√2) [[1, 1], [1, -1]]"""
    s = 1.0 / math.sqrt(2.0)
    return CoinOperator(np.array([[s, s], [s, -s]], dtype=np.complex128))


@dataclass(frozen=True)
class WalkerState:
    """
    Walker amplitudes on a dense window.

    Attributes
    ----------
    origin : int
        Lattice index where the walk started.
    step_count : int
        Number of steps applied so far.
    amplitudes : ndarray, shape (2, 2*capacity + 1)
        Row 0 holds the coin-0 amplitudes, row 1 the coin-1 amplitudes; column
        ``j`` is lattice index ``origin - capacity + j``.
    """

    origin: int
    step_count: int
    amplitudes: NDArray[np.complex128]

    @property
    def capacity(self) -> int:
        return (self.amplitudes.shape[1] - 1) // 2

    @property
    def lo(self) -> int:
        return self.origin - self.capacity

    @property
    def hi(self) -> int:
        return self.origin + self.capacity

    @property
    def indices(self) -> NDArray[np.int64]:
        return np.arange(self.lo, self.hi + 1)

    @property
    def offsets(self) -> NDArray[np.int64]:
        return np.arange(-self.capacity, self.capacity + 1)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude(self, n: int) -> NDArray[np.complex128]:
        """Coin pair at lattice index ``n``."""
        if not self.lo <= n <= self.hi:
            return np.zeros(2, dtype=np.complex128)
        return self.amplitudes[:, n - self.lo].copy()

    def check(self, tol: float = 1e-10) -> None:
        """Raise ``AssertionError`` if normalization, light cone or parity is violated."""
        off = self.offsets
        forbidden = (np.abs(off) > self.step_count) | ((off - self.step_count) % 2 != 0)
        assert np.all(self.amplitudes[:, forbidden] == 0), "amplitude outside light cone or wrong parity"
        assert abs(1.0 - self.norm()) < tol, f"norm error {abs(1.0 - self.norm()):.3e}"


def initial_state(origin: int = 0, coin_amplitudes=DEFAULT_COIN_AMPLITUDES, capacity: int = 0) -> WalkerState:
    """
    Point-mass state at ``origin`` with the given coin pair.

    ``capacity`` is the largest step count the returned state can be evolved to.
    """
    c = np.asarray(coin_amplitudes, dtype=np.complex128)
    if c.shape != (2,):
        raise ValueError("coin amplitudes must be a pair")
    err = abs(float(np.sum(np.abs(c) ** 2)) - 1.0)
    if err > NORM_TOL:
        raise NormalizationError(f"coin amplitudes not normalized (|norm - 1| = {err:.3e})")
    if capacity < 0:
        raise ValueError("capacity must be >= 0")
    amps = np.zeros((2, 2 * capacity + 1), dtype=np.complex128)
    amps[:, capacity] = c
    return WalkerState(int(origin), 0, amps)


def step(state: WalkerState, coin: CoinOperator, phases: PhaseTable) -> WalkerState:
    """Apply one stroboscopic step: phase, coin, then conditional shift."""
    t1 = state.step_count + 1
    if t1 > state.capacity:
        raise WindowError(
            f"state window of half-width {state.capacity} cannot hold step {t1}"
        )
    lo, hi = state.origin - t1, state.origin + t1
    if not phases.covers(lo, hi):
        raise WindowError(
            f"phase table [{phases.start}, {phases.stop - 1}] does not cover [{lo}, {hi}]"
        )
    if phases.covers(state.lo, state.hi):
        factors = phases.window(state.lo, state.hi)
    else:
        factors = _padded(phases, state.lo, state.hi)
    mixed = coin.entries @ (state.amplitudes * factors)
    out = np.zeros_like(state.amplitudes)
    out[0, 1:] = mixed[0, :-1]
    out[1, :-1] = mixed[1, 1:]
    return WalkerState(state.origin, t1, out)


def _padded(phases: PhaseTable, lo: int, hi: int) -> NDArray[np.complex128]:
    # Sites outside the phase window hold no amplitude (checked by the caller); pad with ones.
    f = np.ones(hi - lo + 1, dtype=np.complex128)
    a, b = max(lo, phases.start), min(hi, phases.stop - 1)
    f[a - lo:b - lo + 1] = phases.factors[a - phases.start:b - phases.start + 1]
    return f


@dataclass(frozen=True)
class ScheduleJitter:
    """
    Uniform random perturbation of every inter-step interval.

    Each interval is ``tau + u`` with ``u`` uniform in ``[-half_width*T, half_width*T]``,
    clamped at zero.
    """

    half_width: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.half_width < 0.5:
            raise ValueError(f"jitter half-width must lie in [0, 0.5) (got {self.half_width})")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class WalkConfig:
    model: SpectrumModel = field(default_factory=Harmonic)
    tau: TauSpec = field(default_factory=lambda: RationalOfTalbot(0, 1))
    steps: int = 200
    coin: CoinOperator = field(default_factory=hadamard_coin)
    coin_amplitudes: tuple = DEFAULT_COIN_AMPLITUDES
    origin: Optional[int] = None
    jitter: Optional[ScheduleJitter] = None

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0 (got {self.steps})")
        if self.origin is None:
            object.__setattr__(self, "origin", default_origin(self.model, self.steps))

    @property
    def window(self) -> tuple[int, int]:
        return self.origin - self.steps, self.origin + self.steps

    def validate(self) -> None:
        lo, hi = self.window
        if isinstance(self.model, Harmonic) and lo <= 0:
            raise WindowError(
                f"harmonic walk from n0={self.origin} over {self.steps} steps reaches the "
                "ground state; start at n0 > steps"
            )
        self.model.domain(lo, hi)

    def with_tau(self, tau: TauSpec) -> "WalkConfig":
        return replace(self, tau=tau)


def default_origin(model: SpectrumModel, steps: int) -> int:
    """Start site used when none is given: ``steps + 100`` for the oscillator, 0 otherwise."""
    if isinstance(model, Harmonic):
        return steps + 100
    return 0


def interval_schedule(config: WalkConfig) -> Optional[NDArray[np.float64]]:
    """
    Per-step absolute intervals for a jittered walk, or ``None`` for a constant interval.

    Draws come from ``numpy.random.default_rng(seed)`` so a seed fixes the schedule.
    """
    j = config.jitter
    if j is None or j.half_width == 0.0:
        return None
    T = config.model.talbot_time()
    base = resolve_tau(config.tau, config.model)
    rng = np.random.default_rng(j.seed)
    u = rng.uniform(-j.half_width * T, j.half_width * T, size=config.steps)
    return np.maximum(base + u, 0.0)


def evolve(config: WalkConfig, record: Optional[Iterable[int]] = None) -> list[WalkerState]:
    """
    Run a walk and return snapshots.

    Parameters
    ----------
    config : WalkConfig
    record : iterable of int, optional
        Step counts at which to keep a snapshot. Defaults to the final step only.

    Returns
    -------
    list of WalkerState
        Snapshots in increasing step order.
    """
    config.validate()
    wanted = {config.steps} if record is None else {int(s) for s in record}
    if any(s < 0 or s > config.steps for s in wanted):
        raise ValueError(f"record steps must lie in [0, {config.steps}]")

    state = initial_state(config.origin, config.coin_amplitudes, capacity=config.steps)
    out = [state] if 0 in wanted else []
    if config.steps == 0:
        return out

    window = config.window
    schedule = interval_schedule(config)
    fixed = phase_table(config.model, config.tau, window) if schedule is None else None
    for k in range(config.steps):
        phases = fixed if schedule is None else phase_table(config.model, float(schedule[k]), window)
        state = step(state, config.coin, phases)
        if state.step_count in wanted:
            out.append(state)
    return out
