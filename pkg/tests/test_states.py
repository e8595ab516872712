import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import poisson

from sechjcm.algebra import make_kerr_jcm, make_mphoton_jcm, make_standard_jcm
from sechjcm.oracle import OdeSettings
from sechjcm.propagator import PulseParams, propagate_subspace
from sechjcm.states import (
    QuantumState,
    TimeSeries,
    coherent_cutoff,
    evolve,
    evolve_many,
    inversion,
    inversion_series_coherent,
    inversion_series_general,
    inversion_series_number,
    make_coherent_state,
    make_number_state,
)


def random_state(rng, n_max):
    u = rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)
    v = rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)
    nrm = np.sqrt(np.sum(abs(u) ** 2 + abs(v) ** 2))
    return QuantumState(u / nrm, v / nrm)


def test_number_state_examples():
    s = make_number_state(3, 1, 0)
    assert s.u[3] == 1 and np.count_nonzero(s.u) == 1 and not s.v.any()
    s = make_number_state(0, 0, 1)
    assert s.v[0] == 1 and s.n_max == 0
    r = 1 / np.sqrt(2)
    s = make_number_state(1, r, r, n_max=4)
    assert s.norm == pytest.approx(1.0, abs=1e-15) and s.n_max == 4


def test_number_state_validation():
    with pytest.raises(ValueError):
        make_number_state(2, 1, 1)
    with pytest.raises(ValueError):
        make_number_state(5, 1, 0, n_max=3)


def test_state_is_immutable():
    s = make_number_state(1, 1, 0)
    with pytest.raises(ValueError):
        s.u[0] = 1


def test_coherent_cutoff_and_tail():
    n_max = coherent_cutoff(10.0, 1e-12)
    # smallest admissible cutoff is 39; the tail bound is the contract
    assert 38 <= n_max <= 45
    assert poisson.sf(n_max, 10.0) < 1e-12
    assert poisson.sf(n_max - 1, 10.0) >= 1e-12
    s = make_coherent_state(10.0)
    assert s.n_max == n_max
    assert s.norm == pytest.approx(1.0, abs=1e-14)
    assert np.all(s.u.real > 0) and not s.v.any()


def test_weak_coherent_state():
    s = make_coherent_state(0.01)
    assert abs(s.u[0]) ** 2 == pytest.approx(np.exp(-0.01), rel=1e-10)
    g = make_coherent_state(0.01, excited=False)
    assert abs(g.v[0]) ** 2 == pytest.approx(np.exp(-0.01), rel=1e-10)
    with pytest.raises(ValueError):
        make_coherent_state(0.0)


def test_time_series_validation():
    with pytest.raises(ValueError):
        TimeSeries([0.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        TimeSeries([0.0, 1.0], [1.0])


def test_inversion_examples():
    assert inversion(make_number_state(2, 1, 0)) == 1
    assert inversion(make_number_state(2, 0, 1)) == -1
    r = 1 / np.sqrt(2)
    assert inversion(make_number_state(1, r, r)) == pytest.approx(0.0, abs=1e-15)


def test_evolve_identity_and_low_state():
    model = make_standard_jcm(1.0, 1.6)
    pulse = PulseParams(5.0, 1.0, -10.0)
    s0 = random_state(np.random.default_rng(1), 4)
    s = evolve(model, pulse, s0, -10.0)
    assert np.allclose(s.u[:5], s0.u, atol=1e-15) and np.allclose(s.v[:5], s0.v, atol=1e-15)
    low = make_number_state(0, 0, 1)
    for t in (-3.0, 4.0, 25.0):
        v0 = evolve(model, pulse, low, t).v[0]
        assert abs(v0) == pytest.approx(1.0, abs=1e-15)
        assert abs(v0 - np.exp(-1j * (model.r(0) - model.s(0)) * (t + 10))) < 1e-12


def test_three_up_full_pulse():
    model = make_standard_jcm(1.0, 1.0)
    pulse = PulseParams(0.3, 1.0, -40.0)
    s = evolve(model, pulse, make_number_state(3, 1, 0), 40.0)
    # remaining tails of the pulse shift the angle by ~2e-9
    assert abs(s.v[4]) ** 2 == pytest.approx(np.sin(2 * np.pi * 0.3 * 2) ** 2, abs=1e-7)


@pytest.mark.parametrize(
    "model",
    [
        make_standard_jcm(1.0, 1.4),
        make_kerr_jcm(1.0, 1.2, 0.15, 1),
        make_mphoton_jcm(1.0, 2.3, 2),
        make_kerr_jcm(1.0, 3.1, 0.05, 3),
    ],
    ids=["standard", "kerr", "two-photon", "kerr-three-photon"],
)
def test_engine_equivalence(model):
    rng = np.random.default_rng(11)
    pulse = PulseParams(3.0, 1.0, -10.0)
    s0 = random_state(rng, 6)
    times = np.array([-4.0, 0.5, 12.0, 30.0])
    a = evolve_many(model, pulse, s0, times, "analytic")
    o = evolve_many(model, pulse, s0, times, "ode", OdeSettings(rel_tol=1e-11, abs_tol=1e-13))
    for sa, so in zip(a, o):
        assert np.max(np.abs(sa.u - so.u)) < 1e-7
        assert np.max(np.abs(sa.v - so.v)) < 1e-7
        assert sa.norm == pytest.approx(1.0, abs=1e-10)


def test_unknown_engine():
    with pytest.raises(ValueError, match="engine"):
        evolve(make_standard_jcm(1, 1), PulseParams(1, 1, 0), make_number_state(0, 1, 0), 1.0, engine="rk4")


def test_analytic_block_conservation():
    model = make_standard_jcm(1.0, 2.0)
    pulse = PulseParams(6.0, 1.0, -10.0)
    s0 = random_state(np.random.default_rng(5), 7).padded(8)
    for s in evolve_many(model, pulse, s0, np.linspace(-10, 30, 9)):
        assert s.norm == pytest.approx(1.0, abs=1e-10)
        for n in range(8):
            before = abs(s0.u[n]) ** 2 + abs(s0.v[n + 1]) ** 2
            assert abs(s.u[n]) ** 2 + abs(s.v[n + 1]) ** 2 == pytest.approx(before, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.floats(-2, 2), st.floats(-10, 0))
def test_general_formula_matches_evolution(seed, lam, dbar, t0):
    rng = np.random.default_rng(seed)
    model = make_standard_jcm(1.0, 1.0 + 2 * dbar)
    pulse = PulseParams(lam, 1.0, t0)
    s0 = random_state(rng, 5)
    times = np.linspace(t0, t0 + 40, 9)
    series = inversion_series_general(model, pulse, s0, times)
    direct = [inversion(s) for s in evolve_many(model, pulse, s0, times)]
    assert np.allclose(series.values, direct, atol=1e-9)


def test_general_formula_examples():
    model = make_standard_jcm(1.0, 1.5)
    times = np.linspace(-5, 5, 11)
    vals = inversion_series_general(model, PulseParams(4, 1, -5), make_number_state(0, 0, 1), times).values
    assert np.all(vals == -1)
    u = np.zeros(4, complex)
    v = np.zeros(4, complex)
    u[2], v[3] = 0.6, 0.8j
    vals = inversion_series_general(model, PulseParams(0, 1, -5), QuantumState(u, v), times).values
    assert np.allclose(vals, 0.36 - 0.64, atol=1e-15)


def test_number_series_examples():
    model = make_standard_jcm(1.0, 1.0)
    times = np.linspace(-10, 10, 21)
    assert np.all(inversion_series_number(model, PulseParams(0, 1, -10), 3, 1.0, times).values == 1)
    assert np.all(inversion_series_number(model, PulseParams(5, 1, -10), 0, 0.0, times).values == -1)
    with pytest.raises(ValueError):
        inversion_series_number(model, PulseParams(5, 1, -10), 0, 1.5, times)


@pytest.mark.parametrize("n", [0, 3, 8])
def test_resonance_number_formula(n):
    model = make_standard_jcm(1.0, 1.0)
    pulse = PulseParams(5.0, 1.0, -10.0)
    times = np.linspace(-10, 20, 301)
    series = inversion_series_number(model, pulse, n, 1.0, times)
    closed = 1 - 2 * np.sin(np.sqrt(n + 1) * pulse.area(times)) ** 2
    assert np.allclose(series.values, closed, atol=1e-9)
    assert series.meta["n"] == n and series.meta["family"] == "standard"


def test_number_series_matches_evolution_with_mixed_atom():
    model = make_standard_jcm(1.0, 1.8)
    pulse = PulseParams(2.0, 1.0, -10.0)
    times = np.linspace(-10, 20, 13)
    p_e = 0.3
    series = inversion_series_number(model, pulse, 4, p_e, times).values
    # incoherent mixture of the two atomic states
    up = [inversion(s) for s in evolve_many(model, pulse, make_number_state(4, 1, 0), times)]
    dn = [inversion(s) for s in evolve_many(model, pulse, make_number_state(4, 0, 1), times)]
    assert np.allclose(series, p_e * np.array(up) + (1 - p_e) * np.array(dn), atol=1e-10)


def test_coherent_series_matches_evolution():
    model = make_standard_jcm(1.0, 1.5)
    pulse = PulseParams(5.0, 1.0, -10.0)
    times = np.linspace(-10, 20, 16)
    series = inversion_series_coherent(model, pulse, 4.0, times).values
    s0 = make_coherent_state(4.0)
    direct = [inversion(s) for s in evolve_many(model, pulse, s0, times)]
    assert np.allclose(series, direct, atol=1e-10)
    assert np.all(inversion_series_coherent(model, PulseParams(0, 1, -10), 4.0, times).values == pytest.approx(1.0))


def test_series_reject_multiphoton():
    model = make_mphoton_jcm(1.0, 2.0, 2)
    pulse = PulseParams(1, 1, 0)
    t = np.linspace(0, 1, 3)
    with pytest.raises(ValueError, match="m = 1"):
        inversion_series_number(model, pulse, 1, 1.0, t)
    with pytest.raises(ValueError, match="m = 1"):
        inversion_series_coherent(model, pulse, 2.0, t)
    with pytest.raises(ValueError, match="m = 1"):
        inversion_series_general(model, pulse, make_number_state(0, 1, 0), t)


def test_detuning_lowers_peak_transfer():
    pulse = PulseParams(5.0, 1.0, -10.0)
    times = np.linspace(-10, 30, 8001)
    peaks = []
    for dbar in (0.0, 0.25, 0.5, 1.0):
        model = make_standard_jcm(1.0, 1.0 + 2 * dbar)
        peaks.append(propagate_subspace(model, pulse, 4, times).transfer.max())
    assert all(a >= b for a, b in zip(peaks, peaks[1:]))
