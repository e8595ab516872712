"""Complex log-gamma and the Gauss hypergeometric function on [0, 1).

The hypergeometric kernel targets the parameter family met by the sech-pulse
propagator: real ``z`` in ``[0, 1)``, complex ``c`` off the non-positive
integers, and ``a - b`` possibly large (``a = alpha``, ``b = -alpha``).

Evaluation strategy
-------------------
* ``z <= 0.5``: direct power series in ``z``.
* ``z > 0.5``: linear transformation to argument ``1 - z`` with gamma-function
  connection coefficients.
* Whenever the summed terms dwarf the result (large ``a - b`` makes both
  series cancel catastrophically), the value is rebuilt from two seeds with
  small parameters by the three-term contiguous recurrence in the direction
  ``(a + 1, b - 1)``, which is neutrally stable where the function oscillates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpecialFunctionError",
    "PoleError",
    "ConvergenceError",
    "Hyp2F1Params",
    "log_gamma_complex",
    "gamma_complex",
    "rgamma_complex",
    "hyp2f1",
    "hyp2f1_second_solution",
    "Z_SWITCH",
    "MAX_TERMS",
]

Z_SWITCH = 0.5
MAX_TERMS = 10_000
# log10 of tolerated (largest term / |sum|) before switching to recurrence
_CANCEL_DIGITS = 2.0

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


class SpecialFunctionError(ArithmeticError):
    """Base class for failures in the special-function kernels."""


class PoleError(SpecialFunctionError):
    """Argument sits on a pole (non-positive integer)."""


class ConvergenceError(SpecialFunctionError):
    """A series or recurrence failed to converge within its budget."""


def _is_nonpositive_integer(w: complex, tol: float = 0.0) -> bool:
    w = complex(w)
    if w.imag != 0.0 or w.real > tol:
        return False
    return abs(w.real - round(w.real)) <= tol


def _lanczos_log_gamma(w: complex) -> complex:
    # valid for Re w >= 0.5
    w = w - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (w + k)
    t = w + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(acc)


def log_gamma_complex(w: complex) -> complex:
    """Logarithm of the gamma function for complex ``w``.

    Uses the Lanczos approximation for ``Re w >= 0.5`` and the reflection
    formula below that. ``exp`` of the result equals ``Gamma(w)``; the
    imaginary part is the continuous branch on the right half-plane.

    Raises
    ------
    PoleError
        If ``w`` is a non-positive integer.
    """
    w = complex(w)
    if _is_nonpositive_integer(w):
        raise PoleError(f"log-gamma pole at w = {w}")
    if w.real >= 0.5:
        return complex(_lanczos_log_gamma(w))
    # Gamma(w) Gamma(1 - w) = pi / sin(pi w)
    s = np.sin(np.pi * w)
    return complex(_LOG_PI - np.log(s) - _lanczos_log_gamma(1.0 - w))


def gamma_complex(w: complex) -> complex:
    return complex(np.exp(log_gamma_complex(w)))


def rgamma_complex(w: complex) -> complex:
    """``1 / Gamma(w)``, zero at the poles."""
    if _is_nonpositive_integer(w):
        return 0.0j
    return complex(np.exp(-log_gamma_complex(w)))


@dataclass(frozen=True)
class Hyp2F1Params:
    """Parameter record for ``2F1(a, b; c; z)`` with ``z`` in ``[0, 1)``."""

    a: float
    b: float
    c: complex
    z: float

    def __post_init__(self):
        if not 0.0 <= self.z < 1.0:
            raise ValueError(f"z must lie in [0, 1), got {self.z}")

    def evaluate(self) -> complex:
        return complex(hyp2f1(self.a, self.b, self.c, self.z))


def _series(a, b, c, z):
    """Sum the Gauss series at each ``z``; return ``(sum, max |term|)``."""
    z = np.asarray(z, dtype=float)
    total = np.ones(z.shape, dtype=complex)
    term = np.ones(z.shape, dtype=complex)
    biggest = np.ones(z.shape)
    active = np.ones(z.shape, dtype=bool)
    quiet = np.zeros(z.shape, dtype=int)
    for k in range(MAX_TERMS):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0))
        if ratio == 0:
            # terminating series
            return total, biggest
        term = np.where(active, term * ratio * z, 0.0)
        total = total + term
        mag = np.abs(term)
        biggest = np.maximum(biggest, mag)
        small = mag <= 1e-17 * np.abs(total)
        # require several consecutive negligible terms past the hump
        quiet = np.where(small & (abs(ratio) * z < 1.0), quiet + 1, 0)
        active &= quiet < 3
        if not active.any():
            return total, biggest
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; z) series did not converge in {MAX_TERMS} terms"
    )


def _connection(a, b, c, z, zc):
    """Linear transformation to ``1 - z``; returns ``(value, max |term|)``."""
    s = c - a - b
    if abs(s.imag) < 1e-14 and abs(s.real - round(s.real)) < 1e-14:
        raise ConvergenceError(
            f"degenerate 1-z connection (c-a-b = {s}) is not supported"
        )
    lg_c = log_gamma_complex(c)
    coef1 = np.exp(lg_c + log_gamma_complex(s)) * rgamma_complex(c - a) * rgamma_complex(c - b)
    coef2 = np.exp(lg_c + log_gamma_complex(-s)) * rgamma_complex(a) * rgamma_complex(b)
    g1, m1 = _series(a, b, 1.0 - s, zc)
    g2, m2 = _series(c - a, c - b, 1.0 + s, zc)
    p2 = np.exp(s * np.log(zc))
    value = coef1 * g1 + coef2 * p2 * g2
    biggest = np.maximum(abs(coef1) * m1, abs(coef2) * np.abs(p2) * m2)
    return value, biggest


def _direct(a, b, c, z, zc):
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        # polynomial in z: the series is exact everywhere
        return _series(a, b, c, z)
    lo = z <= Z_SWITCH
    out = np.empty(z.shape, dtype=complex)
    big = np.empty(z.shape)
    if lo.any():
        out[lo], big[lo] = _series(a, b, c, z[lo])
    if (~lo).any():
        out[~lo], big[~lo] = _connection(a, b, c, z[~lo], zc[~lo])
    return out, big


def _recurrence(a, b, c, z, zc):
    """Rebuild ``2F1(a, b; c; z)`` from small-parameter seeds.

    With ``F_k = 2F1(a0 + k, b0 - k; c; z)`` the contiguous relation

        A F_{k+1} = B F_k - C F_{k-1}

    holds with ``A = a(b - c)(a - b - 1)``,
    ``B = (a - b)[2ab - (a + b)c + c + (a - b - 1)(a - b + 1) z]`` and
    ``C = b(a - c)(a - b + 1)`` evaluated at ``(a, b) = (a0 + k, b0 - k)``.
    """
    steps = int(math.floor((a - b).real / 2.0))
    a0, b0 = a - steps, b + steps
    prev, _ = _direct(a0, b0, c, z, zc)
    if steps == 0:
        return prev
    cur, _ = _direct(a0 + 1.0, b0 - 1.0, c, z, zc)
    for k in range(1, steps):
        ak, bk = a0 + k, b0 - k
        d = ak - bk
        lead = ak * (bk - c) * (d - 1.0)
        if lead == 0:
            raise ConvergenceError(f"contiguous recurrence breaks down at a={ak}, b={bk}")
        mid = d * (2.0 * ak * bk - (ak + bk) * c + c + (d - 1.0) * (d + 1.0) * z)
        low = bk * (ak - c) * (d + 1.0)
        prev, cur = cur, (mid * cur - low * prev) / lead
    return cur


def hyp2f1(a, b, c, z, *, zc=None):
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for real ``z`` in ``[0, 1)``.

    Parameters
    ----------
    a, b : float or complex
    c : complex
        Must not be a non-positive integer.
    z : float or array_like
        Points in ``[0, 1)``.
    zc : float or array_like, optional
        ``1 - z`` computed without cancellation. Pass it when ``z`` is close
        to one and the caller knows ``1 - z`` to full relative precision.

    Returns
    -------
    complex or ndarray of complex
    """
    a, b, c = complex(a), complex(b), complex(c)
    if _is_nonpositive_integer(c):
        raise PoleError(f"2F1 undefined for c = {c}")
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    zc = 1.0 - z if zc is None else np.atleast_1d(np.asarray(zc, dtype=float))
    if np.any(z < 0.0) or np.any(zc <= 0.0):
        raise ValueError("hyp2f1 requires z in [0, 1)")

    value, biggest = _direct(a, b, c, z, zc)
    lost = np.log10(np.maximum(biggest, 1e-300)) - np.log10(np.maximum(np.abs(value), 1e-300))
    bad = lost > _CANCEL_DIGITS
    if bad.any() and (a - b).real >= 2.0:
        value[bad] = _recurrence(a, b, c, z[bad], zc[bad])
    return value[0] if scalar else value


def hyp2f1_second_solution(alpha: float, gamma: complex, z, *, zc=None, log_z=None):
    """``z**(1 - gamma) * 2F1(alpha - gamma + 1, -alpha - gamma + 1; 2 - gamma; z)``.

    This is the Frobenius solution of the pulse hypergeometric equation that
    vanishes at ``z = 0`` when ``Re(gamma) < 1``. ``log_z`` may be supplied
    to avoid rounding in ``log(z)`` for ``z`` near zero.
    """
    gamma = complex(gamma)
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z == 0.0):
        if (1.0 - gamma).real < 0.0:
            raise ValueError("second solution diverges at z = 0 for Re(1 - gamma) < 0")
    with np.errstate(divide="ignore"):
        lz = np.log(z) if log_z is None else np.atleast_1d(np.asarray(log_z, dtype=float))
    f = hyp2f1(alpha - gamma + 1.0, -alpha - gamma + 1.0, 2.0 - gamma, z, zc=zc)
    power = np.where(z > 0.0, np.exp((1.0 - gamma) * np.where(z > 0.0, lz, 0.0)), 0.0)
    out = power * f
    return out[0] if scalar else out
