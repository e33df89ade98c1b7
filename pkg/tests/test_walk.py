import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dense_oracle import dense_evolve, path_sum_distribution
from strobowalk.spectra import (
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
from strobowalk.walk import (
    CoinOperator,
    NormalizationError,
    ScheduleJitter,
    WalkConfig,
    WindowError,
    evolve,
    hadamard_coin,
    initial_state,
    interval_schedule,
    step,
)

S = 1 / math.sqrt(2)


def probs(state):
    return np.sum(np.abs(state.amplitudes) ** 2, axis=0)


def test_hadamard_coin():
    h = hadamard_coin()
    assert np.allclose(h.apply([1, 0]), [S, S], atol=0, rtol=1e-15)
    for pair in ([1, 0], [0.6, 0.8j], [S, 1j * S]):
        assert np.allclose(h.apply(h.apply(pair)), pair, atol=1e-15)
    m = h.entries
    assert np.max(np.abs(m.conj().T @ m - np.eye(2))) < 1e-15
    assert h.is_real


def test_coin_must_be_unitary():
    with pytest.raises(ValueError, match="unitary"):
        CoinOperator(np.ones((2, 2)))
    with pytest.raises(ValueError):
        CoinOperator(np.eye(3))


def test_initial_state():
    st0 = initial_state(300, capacity=5)
    assert st0.step_count == 0 and st0.origin == 300
    p = probs(st0)
    assert p[st0.capacity] == pytest.approx(1.0, abs=1e-15) and p.sum() == pytest.approx(1.0, abs=1e-15)
    st1 = initial_state(0, (1, 0))
    assert st1.amplitude(0)[0] == 1 and st1.amplitude(0)[1] == 0
    st2 = initial_state(0, (0.6, 0.8j))
    assert st2.norm() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(NormalizationError):
        initial_state(0, (1, 1))


def unity(lo, hi):
    return PhaseTable.unity(lo, hi)


def test_one_step_symmetric_start():
    s = initial_state(50, capacity=1)
    s = step(s, hadamard_coin(), unity(49, 51))
    assert s.step_count == 1
    assert probs(s)[0] == pytest.approx(0.5, abs=1e-15)
    assert probs(s)[2] == pytest.approx(0.5, abs=1e-15)
    assert probs(s)[1] == 0.0


def test_three_steps_from_coin_zero():
    s = initial_state(0, (1, 0), capacity=3)
    for _ in range(3):
        s = step(s, hadamard_coin(), unity(-3, 3))
    p = probs(s)
    expected = path_sum_distribution(hadamard_coin().entries, (1, 0), 3)
    for off, val in {3: 1 / 8, 1: 5 / 8, -1: 1 / 8, -3: 1 / 8}.items():
        assert expected[off] == pytest.approx(val, abs=1e-15)
        assert p[off + 3] == pytest.approx(val, abs=1e-12)


def test_window_too_small_is_an_error():
    s = initial_state(0, capacity=1)
    s = step(s, hadamard_coin(), unity(-1, 1))
    with pytest.raises(WindowError):
        step(s, hadamard_coin(), unity(-2, 2))
    s = initial_state(0, capacity=3)
    with pytest.raises(WindowError):
        step(s, hadamard_coin(), unity(0, 1))


@pytest.mark.parametrize("model,origin", [(Harmonic(), 8), (Harmonic(2.3), 40), (FreeParticle(), 0),
                                          (FreeParticle(1.7, 0.6), 3)])
@pytest.mark.parametrize("tau_frac", [0.0, 0.2, 1 / (2 * math.pi), 0.37])
def test_dense_oracle_equivalence(model, origin, tau_frac):
    T = talbot_time(model)
    tau = tau_frac * T
    window = (origin - 8, origin + 8)
    coin = hadamard_coin()
    s = initial_state(origin, capacity=8)
    phases = phase_table(model, tau, window)
    energies = energy(model, np.arange(window[0], window[1] + 1))
    for t in range(1, 9):
        s = step(s, coin, phases)
        ref = dense_evolve(coin.entries, energies, tau, (S, 1j * S), 8, t)
        assert np.max(np.abs(s.amplitudes - ref)) < 1e-12


def test_unity_phases_equal_zero_tau():
    cfg = WalkConfig(model=Harmonic(), steps=30)
    s0 = initial_state(cfg.origin, capacity=30)
    s1 = s0
    zero = phase_table(Harmonic(), RationalOfTalbot(0, 1), cfg.window)
    for _ in range(30):
        s0 = step(s0, hadamard_coin(), unity(*cfg.window))
        s1 = step(s1, hadamard_coin(), zero)
    assert np.array_equal(s0.amplitudes, s1.amplitudes)
    assert np.array_equal(evolve(cfg)[-1].amplitudes, s0.amplitudes)


def test_evolve_zero_steps_returns_initial():
    cfg = WalkConfig(steps=0)
    (s,) = evolve(cfg)
    assert s.step_count == 0
    assert np.array_equal(s.amplitudes, initial_state(cfg.origin).amplitudes)


def test_evolve_records_requested_steps():
    cfg = WalkConfig(steps=12)
    snaps = evolve(cfg, record=[0, 5, 12])
    assert [s.step_count for s in snaps] == [0, 5, 12]
    with pytest.raises(ValueError):
        evolve(cfg, record=[13])


def test_harmonic_window_may_not_reach_ground_state():
    with pytest.raises(WindowError, match="ground state"):
        evolve(WalkConfig(model=Harmonic(), steps=10, origin=10))
    assert WalkConfig(model=Harmonic(), steps=200).origin == 300
    assert WalkConfig(model=FreeParticle(), steps=200).origin == 0


@pytest.mark.parametrize("model", [Harmonic(), FreeParticle()])
@pytest.mark.parametrize("tau", [RationalOfTalbot(0, 1), RationalOfTalbot(1, 5), RationalOfTalbot(37, 100),
                                 RealMultipleOfTalbot(1 / (2 * math.pi))])
def test_invariants_after_200_steps(model, tau):
    cfg = WalkConfig(model=model, tau=tau, steps=200)
    for s in evolve(cfg, record=range(0, 201, 17)):
        s.check(tol=1e-10)


@pytest.mark.parametrize("model", [Harmonic(), FreeParticle()])
def test_talbot_rephasing(model):
    steps = 200
    base = WalkConfig(model=model, steps=steps)
    zero = evolve(base, record=range(steps + 1))
    T = talbot_time(model)
    phases = phase_table(model, T, base.window)
    s = initial_state(base.origin, capacity=steps)
    for ref in zero[1:]:
        s = step(s, hadamard_coin(), phases)
        assert np.max(np.abs(probs(s) - probs(ref))) < 1e-10


@settings(max_examples=25, deadline=None)
@given(p=st.integers(0, 99), steps=st.integers(1, 60),
       theta=st.floats(0, math.pi), phi=st.floats(0, 2 * math.pi),
       model=st.sampled_from([Harmonic(), FreeParticle()]))
def test_light_cone_and_norm_property(p, steps, theta, phi, model):
    amps = (math.cos(theta / 2), complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2))
    cfg = WalkConfig(model=model, tau=RationalOfTalbot(p, 100), steps=steps, coin_amplitudes=amps)
    evolve(cfg)[-1].check(tol=1e-12)


def test_jitter_schedule():
    cfg = WalkConfig(steps=50, jitter=ScheduleJitter(0.1, seed=7))
    a, b = interval_schedule(cfg), interval_schedule(cfg)
    assert np.array_equal(a, b)
    T = talbot_time(cfg.model)
    assert np.all(a >= 0) and np.all(a <= 0.1 * T)
    assert interval_schedule(WalkConfig(steps=5, jitter=ScheduleJitter(0.0, 3))) is None
    base = resolve_tau(RationalOfTalbot(1, 4), cfg.model)
    c = interval_schedule(WalkConfig(steps=50, tau=RationalOfTalbot(1, 4), jitter=ScheduleJitter(0.1, 7)))
    assert np.all(np.abs(c - base) <= 0.1 * T + 1e-15)
    with pytest.raises(ValueError):
        ScheduleJitter(0.5)
