"""
Energy spectra for the free evolution between walk steps.

A spectrum model assigns an energy ``E_n`` to every lattice index ``n``. The
free evolution over an interval ``tau`` then multiplies the amplitude at ``n``
by ``exp(-i E_n tau / hbar)``. Three models are provided:

- :class:`Harmonic`: ``E_n = hbar*omega*(n + 1/2)`` for ``n >= 0``.
- :class:`FreeParticle`: ``E_n = (n*dp)**2 / (2*m)`` for all integers ``n``.
- :class:`CustomTable`: energies read from a table over a finite window.

Units use ``hbar = 1``. Phases are tracked in *turns* (fractions of a full
rotation) and reduced modulo one before any trigonometric evaluation. Each
model writes ``E_n tau / (2 pi hbar)`` as an exactly representable weight
``g(n)`` times a scale carried in double-double precision, so the fractional
part stays accurate even when the phase runs to millions of radians. When the
interval is a rational multiple of the Talbot time the reduction is done in
integer arithmetic instead and carries no rounding at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "HBAR",
    "SpectrumError",
    "Harmonic",
    "FreeParticle",
    "CustomTable",
    "SpectrumModel",
    "RationalOfTalbot",
    "RealMultipleOfTalbot",
    "Absolute",
    "TauSpec",
    "PhaseTable",
    "energy",
    "talbot_time",
    "resolve_tau",
    "phase_table",
    "load_custom_table",
]

HBAR = 1.0

# Tolerance on the constancy of E_n - E_{n+2} for tabulated spectra.
GAP_TOL = 1e-12


class SpectrumError(ValueError):
    """Raised for energies requested outside a model's domain or ill-posed Talbot times."""


# --- double-double helpers -------------------------------------------------
# A value is a pair (hi, lo) with |lo| <= ulp(hi)/2.

_INV_2PI = (0.15915494309189535, -9.839338337591243e-18)
_SPLIT = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _renorm(p, e):
    s = p + e
    return s, e - (s - p)


def _dd_mul(a, b):
    p, e = _two_prod(a[0], b[0])
    return _renorm(p, e + (a[0] * b[1] + a[1] * b[0]))


def _dd_div(a, d: float):
    q = a[0] / d
    p, e = _two_prod(q, d)
    return _renorm(q, ((a[0] - p) - e + a[1]) / d)


def _dd(x: float):
    return (float(x), 0.0)


def _reduced_turns(weights: NDArray[np.float64], scale) -> NDArray[np.float64]:
    """Fractional part of ``weights * scale`` in ``[0, 1)``."""
    p, e = _two_prod(weights, scale[0])
    lo = e + weights * scale[1]
    frac = (p - np.floor(p)) + lo
    frac -= np.floor(frac)
    frac[frac >= 1.0] = 0.0
    return frac


# --- models ------------------------------------------------------------------

@dataclass(frozen=True)
class Harmonic:
    omega: float = 1.0
    rephasing_integer: int = 1

    def __post_init__(self):
        if not self.omega > 0:
            raise SpectrumError(f"omega must be positive (got {self.omega})")
        if self.rephasing_integer < 1:
            raise SpectrumError("rephasing integer must be >= 1")

    def energy(self, n):
        n = np.asarray(n)
        if np.any(n < 0):
            raise SpectrumError(f"harmonic energies are defined for n >= 0 only (got min n = {n.min()})")
        return HBAR * self.omega * (n + 0.5)

    def talbot_time(self) -> float:
        # |E_n - E_{n+2}| = 2*hbar*omega
        return math.pi * self.rephasing_integer / self.omega

    def domain(self, lo: int, hi: int) -> None:
        if lo < 0:
            raise SpectrumError(f"harmonic energies are defined for n >= 0 only (window starts at {lo})")

    # turns = (2n + 1) * omega*tau / (4 pi hbar)
    def _weights(self, n):
        return (2 * n + 1).astype(np.float64)

    def _scale_absolute(self, tau: float):
        return _dd_mul(_dd_div(_two_prod(self.omega, tau), 2.0 * HBAR), _INV_2PI)

    def _scale_multiple(self, x: float):
        return _dd_div(_two_prod(x, float(self.rephasing_integer)), 4.0)

    def _turns_rational(self, n, x: Fraction):
        den = 4 * x.denominator
        num = (x.numerator * self.rephasing_integer) % den
        return ((num * ((2 * n + 1) % den)) % den) / den


@dataclass(frozen=True)
class FreeParticle:
    """Free particle receiving momentum kicks ``dp``; the index counts momentum quanta."""

    mass: float = 1.0
    kick: float = 1.0

    def __post_init__(self):
        if not self.mass > 0:
            raise SpectrumError(f"mass must be positive (got {self.mass})")
        if not self.kick > 0:
            raise SpectrumError(f"momentum kick must be positive (got {self.kick})")

    def energy(self, n):
        n = np.asarray(n)
        return (n * self.kick) ** 2 / (2.0 * self.mass)

    def talbot_time(self) -> float:
        # E_n - E_{n+2} depends on n, so the rephasing time is the closed form pi*m*hbar/dp^2
        return math.pi * self.mass * HBAR / self.kick**2

    def domain(self, lo: int, hi: int) -> None:
        return None

    # turns = n^2 * dp^2 tau / (4 pi m hbar)
    def _weights(self, n):
        return n.astype(np.float64) ** 2

    def _scale_absolute(self, tau: float):
        k2 = _two_prod(self.kick, self.kick)
        return _dd_mul(_dd_div(_dd_mul(k2, _dd(tau)), 2.0 * self.mass * HBAR), _INV_2PI)

    def _scale_multiple(self, x: float):
        return (x / 4.0, 0.0)

    def _turns_rational(self, n, x: Fraction):
        den = 4 * x.denominator
        r = n % den
        return (((r * r) % den) * (x.numerator % den) % den) / den


@dataclass(frozen=True)
class CustomTable:
    """
    Tabulated spectrum over a contiguous index window.

    Parameters
    ----------
    start : int
        Lattice index of ``energies[0]``.
    energies : sequence of float
        Energy of each consecutive index starting at ``start``.
    rephasing_integer : int
        Integer multiplying the rephasing period in the Talbot time.
    """

    start: int
    energies: tuple[float, ...] = field(default=())
    rephasing_integer: int = 1

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        if len(self.energies) == 0:
            raise SpectrumError("custom spectrum table is empty")
        if self.rephasing_integer < 1:
            raise SpectrumError("rephasing integer must be >= 1")

    @property
    def stop(self) -> int:
        """One past the last tabulated index."""
        return self.start + len(self.energies)

    def energy(self, n):
        n = np.asarray(n)
        if np.any(n < self.start) or np.any(n >= self.stop):
            raise SpectrumError(
                f"index outside custom table window [{self.start}, {self.stop - 1}]"
            )
        return np.asarray(self.energies)[n - self.start]

    def gap(self) -> float:
        e = np.asarray(self.energies)
        if e.size < 3:
            raise SpectrumError("custom table needs at least 3 entries to define a Talbot time")
        gaps = np.abs(e[:-2] - e[2:])
        if np.max(gaps) - np.min(gaps) > GAP_TOL:
            raise SpectrumError(
                "energy gap E_n - E_{n+2} is not constant across the table; "
                "specify the interval as an absolute time instead"
            )
        g = float(np.mean(gaps))
        if g == 0.0:
            raise SpectrumError("zero energy gap: no finite Talbot time")
        return g

    def talbot_time(self) -> float:
        return 2.0 * math.pi * HBAR * self.rephasing_integer / self.gap()

    def domain(self, lo: int, hi: int) -> None:
        if lo < self.start or hi >= self.stop:
            raise SpectrumError(
                f"window [{lo}, {hi}] not covered by custom table [{self.start}, {self.stop - 1}]"
            )

    # turns = E_n * tau / (2 pi hbar)
    def _weights(self, n):
        return self.energy(n).astype(np.float64)

    def _scale_absolute(self, tau: float):
        return _dd_mul(_dd_div(_dd(tau), HBAR), _INV_2PI)

    def _scale_multiple(self, x: float):
        # E_n * x*T / (2 pi hbar) = E_n * x * lambda / gap
        return _dd_div(_two_prod(x, float(self.rephasing_integer)), self.gap())

    def _turns_rational(self, n, x: Fraction):
        return _reduced_turns(self._weights(n), self._scale_multiple(float(x)))


SpectrumModel = Union[Harmonic, FreeParticle, CustomTable]


# --- interval specifications -------------------------------------------------

@dataclass(frozen=True)
class RationalOfTalbot:
    """Interval ``(p/q) * T``, kept as an exact reduced fraction."""

    p: int
    q: int = 1

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError(f"denominator q must be positive (got {self.q})")
        frac = Fraction(self.p, self.q)
        if not 0 <= frac < 1:
            raise ValueError(f"p/q must lie in [0, 1) (got {self.p}/{self.q})")
        object.__setattr__(self, "p", frac.numerator)
        object.__setattr__(self, "q", frac.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class RealMultipleOfTalbot:
    """Interval ``x * T`` for a real ``x`` in [0, 1)."""

    x: float

    def __post_init__(self):
        if not 0.0 <= self.x < 1.0:
            raise ValueError(f"multiple of T must lie in [0, 1) (got {self.x})")


@dataclass(frozen=True)
class Absolute:
    """Interval given directly in time units."""

    value: float

    def __post_init__(self):
        if not self.value >= 0.0:
            raise ValueError(f"absolute interval must be >= 0 (got {self.value})")


TauSpec = Union[RationalOfTalbot, RealMultipleOfTalbot, Absolute]


@dataclass(frozen=True)
class PhaseTable:
    """Unit-modulus factor ``exp(-i E_n tau / hbar)`` for each index in ``[start, start + len)``."""

    start: int
    factors: NDArray[np.complex128]

    @property
    def stop(self) -> int:
        return self.start + len(self.factors)

    def covers(self, lo: int, hi: int) -> bool:
        return self.start <= lo and hi < self.stop

    def window(self, lo: int, hi: int) -> NDArray[np.complex128]:
        """Factors for indices ``lo..hi`` inclusive."""
        if not self.covers(lo, hi):
            raise ValueError(
                f"phase table [{self.start}, {self.stop - 1}] does not cover [{lo}, {hi}]"
            )
        return self.factors[lo - self.start:hi - self.start + 1]

    @classmethod
    def unity(cls, lo: int, hi: int) -> "PhaseTable":
        """All-ones table, i.e. no free evolution between steps."""
        return cls(lo, np.ones(hi - lo + 1, dtype=np.complex128))


def energy(model: SpectrumModel, n):
    """Return ``E_n`` for a single index or an array of indices."""
    e = model.energy(n)
    return float(e) if np.ndim(e) == 0 else e


def talbot_time(model: SpectrumModel) -> float:
    """Smallest interval after which occupied sites rephase completely."""
    return model.talbot_time()


def resolve_tau(spec: TauSpec, model: SpectrumModel) -> float:
    """Convert an interval specification to an absolute time in ``[0, T)``."""
    T = model.talbot_time()
    if isinstance(spec, RationalOfTalbot):
        return float(spec.fraction * Fraction(T))
    if isinstance(spec, RealMultipleOfTalbot):
        return spec.x * T
    if isinstance(spec, Absolute):
        return spec.value - math.floor(spec.value / T) * T
    raise TypeError(f"unknown interval specification {spec!r}")


def _turns(model: SpectrumModel, n: NDArray[np.int64], tau) -> NDArray[np.float64]:
    if isinstance(tau, RationalOfTalbot):
        return model._turns_rational(n, tau.fraction)
    if isinstance(tau, RealMultipleOfTalbot):
        return _reduced_turns(model._weights(n), model._scale_multiple(tau.x))
    if isinstance(tau, Absolute):
        tau = resolve_tau(tau, model)
    tau = float(tau)
    if not tau >= 0:
        raise ValueError(f"interval must be >= 0 (got {tau})")
    return _reduced_turns(model._weights(n), model._scale_absolute(tau))


def phase_table(model: SpectrumModel, tau, window: tuple[int, int]) -> PhaseTable:
    """
    Build the free-evolution factors over a window of lattice indices.

    Parameters
    ----------
    model : SpectrumModel
        Energy spectrum.
    tau : float or TauSpec
        Interval between steps. A bare float is an absolute time and is *not*
        folded into ``[0, T)``; a :class:`RationalOfTalbot` is evaluated exactly.
    window : (int, int)
        Inclusive index range ``(lo, hi)``.

    Returns
    -------
    PhaseTable
    """
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise ValueError(f"empty window [{lo}, {hi}]")
    model.domain(lo, hi)
    n = np.arange(lo, hi + 1, dtype=np.int64)
    turns = _turns(model, n, tau)
    factors = np.exp(-2j * np.pi * turns)
    factors[turns == 0.0] = 1.0
    return PhaseTable(lo, factors)


def load_custom_table(path, rephasing_integer: int = 1) -> CustomTable:
    """
    Read a two-column ``index energy`` file into a :class:`CustomTable`.

    Lines starting with ``#`` are ignored. Indices must be contiguous once sorted.
    """
    data = np.loadtxt(Path(path), comments="#", ndmin=2, dtype=float)
    if data.shape[1] != 2:
        raise SpectrumError(f"expected 2 columns in {path}, found {data.shape[1]}")
    idx = data[:, 0]
    if np.any(idx != np.round(idx)):
        raise SpectrumError(f"non-integer index in {path}")
    order = np.argsort(idx, kind="stable")
    idx = idx[order].astype(np.int64)
    if np.any(np.diff(idx) != 1):
        raise SpectrumError(f"indices in {path} are not contiguous")
    return CustomTable(int(idx[0]), tuple(data[order, 1]), rephasing_integer)
