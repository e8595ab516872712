"""Exact interaction-picture propagator for a sech coupling pulse.

In each two-dimensional block the rotating-frame propagator is

    U~ = [[conj(h), conj(f)], [-f, h]],

and ``h``, ``f`` solve ``X'' + (2i delta_eff - d ln(lambda)/dt) X' + chi lambda^2 X = 0``
with ``h(t0) = 1, h'(t0) = 0, f(t0) = 0, f'(t0) = i sqrt(chi) lambda(t0)``.
Under ``z = e^{t/tau} / (1 + e^{t/tau})`` this becomes the hypergeometric
equation with ``a = alpha``, ``b = -alpha``, ``c = gamma`` where
``alpha = 2 lambda0 tau sqrt(chi)`` and ``gamma = 1/2 + 2i delta_eff tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_expit

from .algebra import ModelSpec, subspace_params
from .specfun import SpecialFunctionError, hyp2f1, hyp2f1_second_solution

__all__ = [
    "PulseParams",
    "SubspacePropagator",
    "PropagationError",
    "gudermannian",
    "z_of_t",
    "hypergeometric_coefficients",
    "propagate_subspace",
    "propagate_zero_detuning",
    "ZC_FREEZE",
]

# below this 1 - z the remaining pulse area is ~1e-15 of lambda0 tau
ZC_FREEZE = 1e-30


class PropagationError(ArithmeticError):
    """Special-function failure, tagged with the subspace and times involved."""

    def __init__(self, delta_total, times, cause):
        t = np.atleast_1d(times)
        span = f"t = {t[0]:g}" if t.size == 1 else f"t in [{t.min():g}, {t.max():g}]"
        super().__init__(f"subspace Delta = {delta_total}, {span}: {cause}")
        self.delta_total = delta_total
        self.times = times


def gudermannian(x):
    """``gd(x) = 2 arctan(e^x) - pi/2``, the antiderivative of ``sech``."""
    return 2.0 * np.arctan(np.tanh(0.5 * np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class PulseParams:
    """Coupling ``lambda(t) = lambda0 sech(t / (2 tau))`` switched on at ``t0``."""

    lambda0: float
    tau: float
    t0: float

    def __post_init__(self):
        if self.lambda0 < 0:
            raise ValueError("lambda0 must be non-negative")
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def coupling(self, t):
        x = np.asarray(t, dtype=float) / (2.0 * self.tau)
        return self.lambda0 / np.cosh(x)

    def area(self, t):
        """Pulse area ``int_{t0}^{t} lambda(t') dt'``."""
        gd = gudermannian
        return 2.0 * self.lambda0 * self.tau * (gd(np.asarray(t) / (2 * self.tau)) - gd(self.t0 / (2 * self.tau)))


@dataclass(frozen=True)
class SubspacePropagator:
    """Rotating-frame propagator amplitudes of one block at time(s) ``t``."""

    delta_total: int
    h: complex | np.ndarray
    f: complex | np.ndarray
    t: float | np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        h, f = np.asarray(self.h), np.asarray(self.f)
        return np.array([[np.conj(h), np.conj(f)], [-f, h]])

    @property
    def transfer(self):
        """``|f|^2``, the population moved across the block."""
        return np.abs(self.f) ** 2


def z_of_t(t, tau: float):
    """Logistic map ``z = e^{t/tau} / (1 + e^{t/tau})`` onto ``(0, 1)``."""
    return expit(np.asarray(t, dtype=float) / tau)


def hypergeometric_coefficients(alpha: float, gamma: complex, z0: float, *, zc0=None):
    """Constants ``(A_h, B_h, A_f, B_f)`` fixing ``h`` and ``f`` at ``z0``.

    With ``F1 = 2F1(alpha, -alpha; gamma; z)`` and
    ``F2 = z^{1-gamma} 2F1(alpha-gamma+1, -alpha-gamma+1; 2-gamma; z)``,
    ``h = A_h F1 + B_h F2`` and ``f = A_f F1 + B_f F2``.

    Parameters
    ----------
    zc0 : float, optional
        ``1 - z0`` to full relative precision (defaults to ``1 - z0``).
    """
    gamma = complex(gamma)
    for shifted in (gamma, 1.0 - gamma, 2.0 - gamma, gamma + 1.0):
        if shifted.imag == 0.0 and shifted.real <= 0 and shifted.real == round(shifted.real):
            raise ValueError(f"degenerate hypergeometric pair for gamma = {gamma}")
    if not 0.0 < z0 < 1.0:
        raise ValueError("z0 must lie in (0, 1)")
    zc0 = 1.0 - z0 if zc0 is None else zc0
    log_z0, log_zc0 = math.log(z0), math.log(zc0)
    log_odds = log_z0 - log_zc0
    one_m = 1.0 - gamma

    a_h = np.exp(one_m * log_zc0) * hyp2f1(alpha - gamma + 1, -alpha - gamma + 1, one_m, z0, zc=zc0)
    b_h = (
        alpha**2 * z0 / (gamma * one_m)
        * np.exp((gamma - 1.0) * log_odds)
        * hyp2f1(alpha + 1, 1 - alpha, gamma + 1, z0, zc=zc0)
    )
    odds_pow = np.exp((gamma - 0.5) * log_odds)
    a_f = (
        -1j * alpha / one_m * odds_pow * np.exp(one_m * log_z0)
        * hyp2f1(alpha - gamma + 1, -alpha - gamma + 1, 2.0 - gamma, z0, zc=zc0)
    )
    b_f = 1j * alpha / one_m * odds_pow * hyp2f1(alpha, -alpha, gamma, z0, zc=zc0)
    return complex(a_h), complex(b_h), complex(a_f), complex(b_f)


def _pulse_exponents(model, pulse, delta_total, gamma_offset=0.0):
    sp = subspace_params(model, delta_total)
    alpha = 2.0 * pulse.lambda0 * pulse.tau * sp.coupling_weight
    gamma = 0.5 + 2j * sp.delta_eff * pulse.tau + gamma_offset
    return alpha, gamma


def propagate_subspace(
    model: ModelSpec,
    pulse: PulseParams,
    delta_total: int,
    t,
    *,
    gamma_offset: complex = 0.0,
) -> SubspacePropagator:
    """Exact ``(h, f)`` of block ``delta_total`` at time(s) ``t``.

    ``gamma_offset`` perturbs ``gamma`` and exists only as a negative-control
    hook for the verification command.
    """
    alpha, gamma = _pulse_exponents(model, pulse, delta_total, gamma_offset)
    tau = pulse.tau
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    x = t_arr / tau
    x0 = pulse.t0 / tau
    try:
        a_h, b_h, a_f, b_f = hypergeometric_coefficients(
            alpha, gamma, float(expit(x0)), zc0=float(expit(-x0))
        )
        # past this point the pulse has deposited all resolvable area
        x = np.minimum(x, -math.log(ZC_FREEZE))
        z, zc, log_z = expit(x), expit(-x), log_expit(x)
        f1 = hyp2f1(alpha, -alpha, gamma, z, zc=zc)
        f2 = hyp2f1_second_solution(alpha, gamma, z, zc=zc, log_z=log_z)
    except SpecialFunctionError as exc:
        raise PropagationError(delta_total, t_arr, exc) from exc
    h = a_h * f1 + b_h * f2
    f = a_f * f1 + b_f * f2
    at_start = t_arr == pulse.t0
    h = np.where(at_start, 1.0 + 0j, h)
    f = np.where(at_start, 0j, f)
    if np.ndim(t) == 0:
        return SubspacePropagator(delta_total, complex(h[0]), complex(f[0]), float(t))
    return SubspacePropagator(delta_total, h, f, t_arr)


def propagate_zero_detuning(
    model: ModelSpec, pulse: PulseParams, delta_total: int, t
) -> SubspacePropagator:
    """Closed-form propagator when the block is resonant (``delta_eff = 0``).

    The interaction Hamiltonian then commutes with itself at all times, so
    ``h = cos(sqrt(chi) Theta)`` and ``f = i sin(sqrt(chi) Theta)`` with
    ``Theta`` the pulse area since ``t0``.
    """
    sp = subspace_params(model, delta_total)
    scale = max(abs(model.r(delta_total)), abs(model.s(delta_total)), 1.0)
    if abs(sp.delta_eff) > 1e-14 * scale:
        raise ValueError(
            f"zero-detuning propagator called with delta_eff = {sp.delta_eff} in Delta = {delta_total}"
        )
    phase = sp.coupling_weight * pulse.area(t)
    h, f = np.cos(phase) + 0j, 1j * np.sin(phase)
    if np.ndim(t) == 0:
        return SubspacePropagator(delta_total, complex(h), complex(f), float(t))
    return SubspacePropagator(delta_total, h, f, np.asarray(t, dtype=float))
