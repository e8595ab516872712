"""Generalized Jaynes-Cummings model families and their su(2) reduction.

A model is fixed by the ladder step ``m`` of the field operators and three
functions of the photon number: ``chi(n)`` (eigenvalue of ``A+ A-``), the
field energy ``r(n)`` and the atomic term ``s(n)``.  The conserved excitation
number ``Delta = A0 + m (1 + sigma3) / 2`` splits the dynamics into
two-dimensional blocks spanned by ``|Delta - m, up>`` and ``|Delta, down>``
plus one-dimensional "low" (and, for some families, "high") states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "ModelSpec",
    "SubspaceParams",
    "StateClass",
    "falling_factorial",
    "make_standard_jcm",
    "make_mphoton_jcm",
    "make_kerr_jcm",
    "subspace_params",
    "subspace_hamiltonian",
    "classify_state",
    "isolated_energy",
]

UP, DOWN = "up", "down"


def falling_factorial(n: int, m: int) -> float:
    """``n! / (n - m)!`` as a running product; zero when ``n < m``."""
    if n < m:
        return 0.0
    out = 1.0
    for k in range(n - m + 1, n + 1):
        out *= k
    return out


@dataclass(frozen=True)
class ModelSpec:
    """A generalized JCM ``H = r(A0) + s(A0) sigma3 + lambda(t)(A+ sigma- + A- sigma+)``.

    ``family`` and ``params`` tag the closed-form families so that tests and
    the CLI can recover the parameters; a custom model may leave them empty.
    """

    m: int
    chi: Callable[[int], float]
    r: Callable[[int], float]
    s: Callable[[int], float]
    family: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"ladder step m must be a positive integer, got {self.m}")

    @property
    def detuning(self) -> float:
        """``omega0 - m omega`` for the tagged families."""
        p = self.params
        return p["omega0"] - self.m * p["omega"]


class SubspaceParams(NamedTuple):
    delta_total: int
    omega_phase: float
    delta_eff: float
    coupling_weight: float


class StateClass(NamedTuple):
    """Where a basis state ``|n, atom>`` lives: ``two_dim``, ``low`` or ``high``."""

    kind: str
    delta_total: int | None = None


def make_kerr_jcm(omega: float, omega0: float, kappa: float, m: int) -> ModelSpec:
    """m-photon JCM in a Kerr medium: ``r(n) = omega n + kappa (n^2 - n)``."""
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    m = int(m)
    family = "kerr" if kappa != 0 else ("standard" if m == 1 else "mphoton")
    return ModelSpec(
        m=m,
        chi=lambda n: falling_factorial(n, m),
        r=lambda n: omega * n + kappa * (n * n - n),
        s=lambda n: 0.5 * omega0,
        family=family,
        params={"omega": omega, "omega0": omega0, "kappa": kappa},
    )


def make_mphoton_jcm(omega: float, omega0: float, m: int) -> ModelSpec:
    return make_kerr_jcm(omega, omega0, 0.0, m)


def make_standard_jcm(omega: float, omega0: float) -> ModelSpec:
    """One-photon JCM: ``chi(n) = n``, ``r(n) = omega n``, ``s = omega0 / 2``."""
    return make_kerr_jcm(omega, omega0, 0.0, 1)


def subspace_params(model: ModelSpec, delta_total: int) -> SubspaceParams:
    """Phase, effective half-detuning and coupling weight of block ``Delta``.

    ``Omega = [r(D-m) + r(D)]/2 + [s(D-m) - s(D)]/2`` and
    ``delta_eff = [r(D-m) - r(D)]/2 + [s(D-m) + s(D)]/2``.
    """
    m = model.m
    if delta_total < m:
        raise ValueError(
            f"Delta = {delta_total} < m = {m} labels a one-dimensional subspace"
        )
    lo, hi = delta_total - m, delta_total
    r_lo, r_hi = model.r(lo), model.r(hi)
    s_lo, s_hi = model.s(lo), model.s(hi)
    omega_phase = 0.5 * (r_lo + r_hi) + 0.5 * (s_lo - s_hi)
    delta_eff = 0.5 * (r_lo - r_hi) + 0.5 * (s_lo + s_hi)
    return SubspaceParams(delta_total, omega_phase, delta_eff, math.sqrt(model.chi(hi)))


def subspace_hamiltonian(params: SubspaceParams, coupling: float) -> np.ndarray:
    """``Omega I + delta_eff sigma3 + coupling sqrt(chi) sigma1`` in the block basis."""
    w, d, g = params.omega_phase, params.delta_eff, coupling * params.coupling_weight
    return np.array([[w + d, g], [g, w - d]], dtype=float)


def classify_state(model: ModelSpec, n: int, atom: str) -> StateClass:
    if n < 0:
        raise ValueError("photon number must be non-negative")
    if atom == UP:
        target = n + model.m
        if model.chi(target) > 0:
            return StateClass("two_dim", target)
        return StateClass("high")
    if atom == DOWN:
        if model.chi(n) > 0:
            return StateClass("two_dim", n)
        return StateClass("low")
    raise ValueError(f"atom must be 'up' or 'down', got {atom!r}")


def isolated_energy(model: ModelSpec, n: int, atom: str) -> float:
    """Energy of a one-dimensional invariant state ``|n, atom>``.

    Equals ``Omega(l) - delta(l)`` for a low state and ``Omega(h+m) + delta(h+m)``
    for a high state, written without the out-of-range arguments.
    """
    if atom == DOWN:
        return model.r(n) - model.s(n)
    return model.r(n) + model.s(n)
