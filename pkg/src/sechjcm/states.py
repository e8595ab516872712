"""Truncated atom-field states, their evolution, and atomic inversion.

A state is stored as two Fock-indexed amplitude arrays: ``u[n]`` for
``|n, up>`` and ``v[n]`` for ``|n, down>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import poisson

from .algebra import ModelSpec, isolated_energy, subspace_params
from .propagator import PulseParams, propagate_subspace

__all__ = [
    "QuantumState",
    "TimeSeries",
    "make_number_state",
    "make_coherent_state",
    "coherent_cutoff",
    "evolve",
    "evolve_many",
    "inversion",
    "inversion_series_number",
    "inversion_series_coherent",
    "inversion_series_general",
]

DEFAULT_TAIL_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class QuantumState:
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        v = np.asarray(self.v, dtype=complex)
        if u.shape != v.shape or u.ndim != 1:
            raise ValueError("u and v must be 1-D arrays of equal length")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n_max(self) -> int:
        return self.u.size - 1

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.u) ** 2 + np.abs(self.v) ** 2)))

    def padded(self, n_max: int) -> "QuantumState":
        extra = n_max - self.n_max
        if extra <= 0:
            return self
        pad = np.zeros(extra, dtype=complex)
        return QuantumState(np.concatenate([self.u, pad]), np.concatenate([self.v, pad]))


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape:
            raise ValueError("times and values must have equal length")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def make_number_state(n: int, c_e: complex, c_g: complex, n_max: int | None = None) -> QuantumState:
    """Field in ``|n>``, atom in ``c_e |up> + c_g |down>``."""
    n_max = n if n_max is None else n_max
    if n < 0 or n > n_max:
        raise ValueError(f"need 0 <= n <= n_max, got n={n}, n_max={n_max}")
    if abs(abs(c_e) ** 2 + abs(c_g) ** 2 - 1.0) > 1e-10:
        raise ValueError("atomic amplitudes must satisfy |c_e|^2 + |c_g|^2 = 1")
    u = np.zeros(n_max + 1, dtype=complex)
    v = np.zeros(n_max + 1, dtype=complex)
    u[n], v[n] = c_e, c_g
    return QuantumState(u, v)


def coherent_cutoff(n_bar: float, tail_eps: float = DEFAULT_TAIL_EPS) -> int:
    """Smallest ``N`` with Poisson probability beyond ``N`` below ``tail_eps``."""
    n = int(np.floor(n_bar))
    while poisson.sf(n, n_bar) >= tail_eps:
        n += 1
    return n


def _poisson_weights(n_bar, tail_eps):
    n_max = coherent_cutoff(n_bar, tail_eps)
    w = poisson.pmf(np.arange(n_max + 1), n_bar)
    return w / w.sum()


def make_coherent_state(n_bar: float, excited: bool = True, tail_eps: float = DEFAULT_TAIL_EPS) -> QuantumState:
    """Coherent field with real positive amplitudes, atom fully up or down."""
    if n_bar <= 0:
        raise ValueError("n_bar must be positive")
    amp = np.sqrt(_poisson_weights(n_bar, tail_eps)).astype(complex)
    zero = np.zeros_like(amp)
    return QuantumState(amp, zero) if excited else QuantumState(zero, amp)


def inversion(state: QuantumState) -> float:
    return float(np.sum(np.abs(state.u) ** 2 - np.abs(state.v) ** 2))


def _analytic_many(model, pulse, state0, times):
    m = model.m
    state0 = state0.padded(state0.n_max + m)
    n_max = state0.n_max
    u0, v0 = state0.u, state0.v
    dt = times - pulse.t0
    u_t = np.zeros((times.size, n_max + 1), dtype=complex)
    v_t = np.zeros((times.size, n_max + 1), dtype=complex)
    for n in range(n_max + 1):
        if model.chi(n) == 0 and v0[n] != 0:
            v_t[:, n] = np.exp(-1j * isolated_energy(model, n, "down") * dt) * v0[n]
        if model.chi(n + m) == 0 and u0[n] != 0:
            u_t[:, n] = np.exp(-1j * isolated_energy(model, n, "up") * dt) * u0[n]
    for n in range(n_max + 1 - m):
        big = n + m
        if model.chi(big) == 0:
            continue
        un, vb = u0[n], v0[big]
        if un == 0 and vb == 0:
            continue
        sp = subspace_params(model, big)
        prop = propagate_subspace(model, pulse, big, times)
        h, f = prop.h, prop.f
        u_t[:, n] = np.exp(-1j * (sp.omega_phase + sp.delta_eff) * dt) * (np.conj(h) * un + np.conj(f) * vb)
        v_t[:, big] = np.exp(-1j * (sp.omega_phase - sp.delta_eff) * dt) * (-f * un + h * vb)
    return u_t, v_t


def evolve_many(model: ModelSpec, pulse: PulseParams, state0: QuantumState, times, engine: str = "analytic", settings=None):
    """Evolved states on a time grid, one per entry of ``times``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if engine == "analytic":
        u_t, v_t = _analytic_many(model, pulse, state0, times)
        return [QuantumState(u_t[i], v_t[i]) for i in range(times.size)]
    if engine == "ode":
        from .oracle import OdeSettings, full_state_oracle

        order = np.argsort(times, kind="stable")
        states = full_state_oracle(model, pulse, state0, times[order], settings or OdeSettings())
        out = [None] * times.size
        for k, i in enumerate(order):
            out[i] = states[k]
        return out
    raise ValueError(f"unknown engine {engine!r}; use 'analytic' or 'ode'")


def evolve(model: ModelSpec, pulse: PulseParams, state0: QuantumState, t: float, engine: str = "analytic", settings=None) -> QuantumState:
    """State at time ``t`` assembled block by block with the free phases

    ``u_n -> exp[-i(Omega + delta)(t - t0)] (conj(h) u_n + conj(f) v_{n+m})`` and
    ``v_{n+m} -> exp[-i(Omega - delta)(t - t0)] (-f u_n + h v_{n+m})``;
    isolated states only pick up their own phase.
    """
    return evolve_many(model, pulse, state0, [t], engine, settings)[0]


def _require_one_photon(model):
    if model.m != 1:
        raise ValueError(f"closed-form inversion series need m = 1, got m = {model.m}")


def _meta(model, pulse, **initial):
    return {
        "family": model.family,
        "m": model.m,
        **{k: v for k, v in model.params.items()},
        "lambda0": pulse.lambda0,
        "tau": pulse.tau,
        "t0": pulse.t0,
        **initial,
    }


def inversion_series_number(model, pulse, n: int, p_e: float, times) -> TimeSeries:
    """``<sigma3> = p_e (1 - 2|f_{n+1}|^2) - (1 - p_e)(1 - 2|f_n|^2)`` for a Fock field."""
    _require_one_photon(model)
    if not 0.0 <= p_e <= 1.0:
        raise ValueError("p_e must lie in [0, 1]")
    times = np.asarray(times, dtype=float)
    up = 1.0 - 2.0 * propagate_subspace(model, pulse, n + 1, times).transfer
    down = 1.0 - 2.0 * propagate_subspace(model, pulse, n, times).transfer if n >= 1 else np.ones_like(times)
    values = p_e * up - (1.0 - p_e) * down
    return TimeSeries(times, values, _meta(model, pulse, initial="number", n=n, p_e=p_e))


def inversion_series_coherent(model, pulse, n_bar: float, times, tail_eps: float = DEFAULT_TAIL_EPS) -> TimeSeries:
    """Poisson-weighted ``sum_n P(n) (1 - 2|f_{n+1}|^2)`` for an excited atom."""
    _require_one_photon(model)
    times = np.asarray(times, dtype=float)
    weights = _poisson_weights(n_bar, tail_eps)
    values = np.zeros_like(times)
    for n, w in enumerate(weights):
        values += w * (1.0 - 2.0 * propagate_subspace(model, pulse, n + 1, times).transfer)
    return TimeSeries(times, values, _meta(model, pulse, initial="coherent", n_bar=n_bar, tail_eps=tail_eps))


def inversion_series_general(model, pulse, state0: QuantumState, times) -> TimeSeries:
    """Inversion of an arbitrary initial state from the block amplitudes alone.

    ``-|v_0|^2 + sum_n [(1 - 2|f|^2)(|u_n|^2 - |v_{n+1}|^2) + 4 Re(h conj(f) conj(u_n) v_{n+1})]``
    with ``(h, f)`` taken in block ``n + 1``.
    """
    _require_one_photon(model)
    times = np.asarray(times, dtype=float)
    state0 = state0.padded(state0.n_max + 1)
    u0, v0 = state0.u, state0.v
    values = np.full(times.shape, -abs(v0[0]) ** 2)
    for n in range(state0.n_max):
        un, vn1 = u0[n], v0[n + 1]
        if un == 0 and vn1 == 0:
            continue
        prop = propagate_subspace(model, pulse, n + 1, times)
        values += (1.0 - 2.0 * prop.transfer) * (abs(un) ** 2 - abs(vn1) ** 2)
        values += 4.0 * np.real(prop.h * np.conj(prop.f) * np.conj(un) * vn1)
    return TimeSeries(times, values, _meta(model, pulse, initial="general"))
