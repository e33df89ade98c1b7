"""Stroboscopic coined quantum walks: coin steps interleaved with free evolution."""

__version__ = "0.1.0"

from .observables import (
    Distribution,
    SpreadRecord,
    classical_reference,
    distribution,
    growth_exponent,
    spread,
)
from .scan import classify, randomized_walk, symmetry_check, tau_scan
from .spectra import (
    Absolute,
    CustomTable,
    FreeParticle,
    Harmonic,
    PhaseTable,
    RationalOfTalbot,
    RealMultipleOfTalbot,
    energy,
    phase_table,
    resolve_tau,
    talbot_time,
)
from .walk import (
    CoinOperator,
    ScheduleJitter,
    WalkConfig,
    WalkerState,
    evolve,
    hadamard_coin,
    initial_state,
    step,
)
