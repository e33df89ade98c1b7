import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dense_oracle import path_sum_distribution
from strobowalk.observables import (
    Distribution,
    SpreadRecord,
    classical_reference,
    distribution,
    growth_exponent,
    spread,
)
from strobowalk.spectra import FreeParticle, Harmonic, RationalOfTalbot
from strobowalk.walk import WalkConfig, evolve, hadamard_coin, initial_state


def test_distribution_of_initial_state():
    d = distribution(initial_state(300)).as_dict()
    assert d.keys() == {0} and d[0] == pytest.approx(1.0, abs=1e-15)
    assert distribution(initial_state(0, (1, 0))).as_dict() == {0: 1.0}


def test_distribution_after_one_step():
    (s,) = evolve(WalkConfig(steps=1))
    d = distribution(s).as_dict()
    assert d.keys() == {-1, 1}
    assert d[1] == pytest.approx(0.5, abs=1e-15) and d[-1] == pytest.approx(0.5, abs=1e-15)


def test_distribution_three_steps_matches_path_sum():
    (s,) = evolve(WalkConfig(model=FreeParticle(), steps=3, coin_amplitudes=(1, 0)))
    d = distribution(s).as_dict()
    ref = path_sum_distribution(hadamard_coin().entries, (1, 0), 3)
    assert d.keys() == ref.keys()
    for k in ref:
        assert d[k] == pytest.approx(ref[k], abs=1e-14)


def test_spread_examples():
    r = spread(Distribution(np.array([0]), np.array([1.0]), 0))
    assert (r.mean, r.stddev, r.rms_displacement) == (0.0, 0.0, 0.0)
    r = spread(Distribution(np.array([-1, 0, 1]), np.array([0.5, 0.0, 0.5]), 1))
    assert r.mean == 0.0 and r.stddev == pytest.approx(1.0) and r.rms_displacement == pytest.approx(1.0)
    # exact 3-step distribution {3: 1/8, 1: 5/8, -1: 1/8, -3: 1/8}:
    # sum n P = (3 + 5 - 1 - 3)/8 = 1/2, sum n^2 P = (9 + 5 + 1 + 9)/8 = 3
    d = Distribution(np.arange(-3, 4), np.array([1, 0, 1, 0, 5, 0, 1]) / 8, 3)
    r = spread(d)
    assert r.mean == pytest.approx(0.5, abs=1e-15)
    assert r.stddev == pytest.approx(math.sqrt(11) / 2, abs=1e-15)
    assert r.rms_displacement == pytest.approx(math.sqrt(3), abs=1e-15)
    assert r.norm_error < 1e-15


def test_classical_reference():
    assert classical_reference(1).as_dict() == {-1: 0.5, 1: 0.5}
    assert classical_reference(2).as_dict() == {-2: 0.25, 0: 0.5, 2: 0.25}
    r = spread(classical_reference(100))
    assert r.stddev == pytest.approx(10.0, abs=1e-10)
    for t in (7, 64, 200, 513):
        assert spread(classical_reference(t)).stddev == pytest.approx(math.sqrt(t), abs=1e-9)
    with pytest.raises(ValueError):
        classical_reference(0)


def _series(f, steps):
    return [SpreadRecord(t, 0.0, f(t), f(t), 0.0) for t in range(1, steps + 1)]


def test_growth_exponent_exact_power_laws():
    assert growth_exponent(_series(lambda t: 0.5 * t, 200), (100, 200)).alpha == pytest.approx(1.0, abs=1e-10)
    assert growth_exponent(_series(math.sqrt, 200), (100, 200)).alpha == pytest.approx(0.5, abs=1e-10)
    fit = growth_exponent(_series(lambda t: 3.0 * t**0.25, 80))
    assert fit.alpha == pytest.approx(0.25, abs=1e-10) and fit.prefactor == pytest.approx(3.0)
    assert fit.residual < 1e-12 and fit.n_points == 41


def test_growth_exponent_errors():
    with pytest.raises(ValueError, match="records"):
        growth_exponent(_series(math.sqrt, 200), (100, 105))
    zero = _series(math.sqrt, 40)
    zero[30] = SpreadRecord(31, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError, match="positive"):
        growth_exponent(zero, (20, 40))


def test_hadamard_walk_exponent():
    states = evolve(WalkConfig(steps=200), record=range(201))
    fit = growth_exponent([spread(distribution(s)) for s in states], (100, 200))
    assert 0.95 <= fit.alpha <= 1.05


def test_symmetric_start_has_zero_mean():
    for s in evolve(WalkConfig(steps=200), record=range(201)):
        assert abs(spread(distribution(s)).mean) < 1e-9


@settings(max_examples=20, deadline=None)
@given(p=st.integers(0, 49), steps=st.integers(0, 80), model=st.sampled_from([Harmonic(), FreeParticle()]))
def test_distribution_invariants(p, steps, model):
    for s in evolve(WalkConfig(model=model, tau=RationalOfTalbot(p, 50), steps=steps), record=range(steps + 1)):
        d = distribution(s)
        assert np.all(d.probabilities >= 0)
        assert abs(d.total() - 1.0) < 1e-10
        assert np.all(d.probabilities[~d.parity_mask()] == 0.0)
        r = spread(d)
        assert abs(r.rms_displacement**2 - (r.stddev**2 + r.mean**2)) < 1e-10 * max(1.0, r.rms_displacement**2)
        assert 0.0 <= r.stddev <= max(s.step_count, 0) + 1e-12
