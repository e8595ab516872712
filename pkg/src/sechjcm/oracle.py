"""Brute-force reference: adaptive Runge-Kutta on the 2x2 Schrodinger equation.

Nothing here touches the hypergeometric machinery.  Each block is integrated
from ``t0`` with an embedded Dormand-Prince 5(4) pair; many blocks (or many
independent parameter tuples) are advanced together as one array state with
a max-norm error controller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import ModelSpec, isolated_energy, subspace_params
from .propagator import PulseParams, SubspacePropagator

__all__ = [
    "OdeSettings",
    "StepBudgetExceeded",
    "dopri5",
    "integrate_subspace",
    "integrate_subspaces",
    "integrate_spin_batch",
    "full_state_oracle",
]


class StepBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OdeSettings:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_steps: int = 2_000_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            val = getattr(self, name)
            if not 0.0 < val <= 1e-2:
                raise ValueError(f"{name} must lie in (0, 1e-2], got {val}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B - _B_LOW


def dopri5(rhs, t_start, y0, t_out, rel_tol, abs_tol, max_steps=2_000_000, h0=None):
    """Integrate ``y' = rhs(t, y)`` and return ``y`` at each time in ``t_out``.

    ``t_out`` must be non-decreasing and ``>= t_start``.  Steps are clipped to
    land on every output time.  The local error is measured in the max norm
    over all components, so batching independent systems never loosens the
    per-system tolerance.
    """
    t_out = np.asarray(t_out, dtype=float)
    if np.any(np.diff(t_out) < 0) or (t_out.size and t_out[0] < t_start):
        raise ValueError("output times must be sorted and not precede t_start")
    y = np.array(y0, dtype=complex)
    out = np.empty((t_out.size,) + y.shape, dtype=complex)
    t = float(t_start)
    k_first = rhs(t, y)
    span = (t_out[-1] - t) if t_out.size else 0.0
    h = h0 if h0 is not None else max(span, 1.0) * 1e-3
    steps = 0
    for i, target in enumerate(t_out):
        while t < target:
            if steps >= max_steps:
                raise StepBudgetExceeded(f"step budget {max_steps} exhausted at t = {t:g}")
            step = min(h, target - t)
            last = step >= target - t
            ks = [k_first]
            for s in range(1, 7):
                incr = sum(a * k for a, k in zip(_A[s], ks) if a != 0.0)
                ks.append(rhs(t + _C[s] * step, y + step * incr))
            y_new = y + step * sum(b * k for b, k in zip(_B, ks) if b != 0.0)
            err = step * sum(e * k for e, k in zip(_E, ks) if e != 0.0)
            scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            norm = float(np.max(np.abs(err) / scale)) if err.size else 0.0
            steps += 1
            if norm <= 1.0:
                t = target if last else t + step
                y = y_new
                k_first = ks[6]
                grow = 5.0 if norm == 0.0 else min(5.0, 0.9 * norm ** -0.2)
                h = step * grow if not last or grow < 1.0 else max(h, step * grow)
            else:
                if not np.isfinite(norm):
                    h = step * 0.1
                else:
                    h = step * max(0.2, 0.9 * norm ** -0.2)
                if h < 1e-14 * max(1.0, abs(t)):
                    raise StepBudgetExceeded(f"step size underflow at t = {t:g}")
        out[i] = y
    return out


def integrate_spin_batch(coupling_peak, delta_eff, tau, t0, t_end, settings=OdeSettings()):
    """Rotating-frame ``(h, f)`` for independent blocks, each at its own end time.

    Every element ``j`` solves ``i psi' = (delta_eff sigma3 + g sech(t/2tau) sigma1) psi``
    with ``g = coupling_peak[j]`` from ``t0[j]`` to ``t_end[j]``.  All systems
    share a normalized clock ``s = (t - t0) / (t_end - t0)`` in ``[0, 1]``.
    """
    g, d, tau, t0, t_end = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (coupling_peak, delta_eff, tau, t0, t_end))
    )
    g, d, tau, t0, t_end = (np.ravel(v) for v in (g, d, tau, t0, t_end))
    dur = t_end - t0
    if np.any(dur < 0):
        raise ValueError("t_end must not precede t0")

    def rhs(s, psi):
        t = t0 + s * dur
        lam = g / np.cosh(t / (2.0 * tau))
        up, dn = psi[:, 0], psi[:, 1]
        return np.stack([-1j * dur * (d * up + lam * dn), -1j * dur * (lam * up - d * dn)], axis=1)

    psi0 = np.zeros((g.size, 2), dtype=complex)
    psi0[:, 0] = 1.0
    psi = dopri5(rhs, 0.0, psi0, [1.0], settings.rel_tol, settings.abs_tol, settings.max_steps)[0]
    # first column of the rotating-frame propagator is (conj(h), -f)
    rot = np.exp(1j * d * dur)
    h = np.conj(rot * psi[:, 0])
    f = -np.conj(rot) * psi[:, 1]
    return h, f


def integrate_subspaces(
    model: ModelSpec,
    pulse: PulseParams,
    deltas,
    t,
    settings: OdeSettings = OdeSettings(),
) -> list[SubspacePropagator]:
    """Oracle ``(h, f)`` for several blocks at times ``t >= t0``, one pass from ``t0``.

    Blocks are integrated together; the max-norm controller keeps each
    block at the requested tolerance.
    """
    params = [subspace_params(model, int(D)) for D in deltas]
    g = pulse.lambda0 * np.array([p.coupling_weight for p in params])
    d = np.array([p.delta_eff for p in params])
    tau, t0 = pulse.tau, pulse.t0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    order = np.argsort(t_arr, kind="stable")
    if t_arr.size and t_arr[order[0]] < t0:
        raise ValueError("oracle integration requires t >= t0")

    def rhs(tt, psi):
        lam = g / np.cosh(tt / (2.0 * tau))
        up, dn = psi[:, 0], psi[:, 1]
        return np.stack([-1j * (d * up + lam * dn), -1j * (lam * up - d * dn)], axis=1)

    psi0 = np.zeros((len(params), 2), dtype=complex)
    psi0[:, 0] = 1.0
    sol = dopri5(rhs, t0, psi0, t_arr[order], settings.rel_tol, settings.abs_tol, settings.max_steps)
    psi = np.empty_like(sol)
    psi[order] = sol
    # first column of the rotating-frame propagator is (conj(h), -f)
    rot = np.exp(1j * np.outer(t_arr - t0, d))
    h = np.conj(rot * psi[:, :, 0])
    f = -np.conj(rot) * psi[:, :, 1]
    out = []
    for j, p in enumerate(params):
        if np.ndim(t) == 0:
            out.append(SubspacePropagator(p.delta_total, complex(h[0, j]), complex(f[0, j]), float(t)))
        else:
            out.append(SubspacePropagator(p.delta_total, h[:, j], f[:, j], t_arr))
    return out


def integrate_subspace(
    model: ModelSpec,
    pulse: PulseParams,
    delta_total: int,
    t,
    settings: OdeSettings = OdeSettings(),
) -> SubspacePropagator:
    """Oracle ``(h, f)`` for one block; integration always starts at ``t0``."""
    return integrate_subspaces(model, pulse, [delta_total], t, settings)[0]


def full_state_oracle(model: ModelSpec, pulse: PulseParams, state0, t, settings: OdeSettings = OdeSettings()):
    """Evolve ``state0`` to ``t`` by integrating every block's Schrodinger equation.

    Block Hamiltonians are built straight from ``r``, ``s`` and ``chi``:
    diagonal ``r(D-m) + s(D-m)``, ``r(D) - s(D)``, off-diagonal
    ``lambda(t) sqrt(chi(D))``.  ``t`` may be a scalar (returns one state) or
    a sorted array (returns a list of states).
    """
    from .states import QuantumState

    m = model.m
    u0, v0 = state0.u, state0.v
    n_max = state0.n_max + m
    u0 = np.concatenate([u0, np.zeros(m, dtype=complex)])
    v0 = np.concatenate([v0, np.zeros(m, dtype=complex)])
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if times.size and times.min() < pulse.t0:
        raise ValueError("oracle evolution requires t >= t0")
    dt = times - pulse.t0

    u_t = np.zeros((times.size, n_max + 1), dtype=complex)
    v_t = np.zeros((times.size, n_max + 1), dtype=complex)

    blocks, diag_up, diag_dn, weight = [], [], [], []
    for n in range(n_max + 1 - m):
        big = n + m
        chi = model.chi(big)
        if chi > 0:
            blocks.append(n)
            diag_up.append(model.r(n) + model.s(n))
            diag_dn.append(model.r(big) - model.s(big))
            weight.append(np.sqrt(chi))
    for n in range(n_max + 1):
        if model.chi(n) == 0:
            v_t[:, n] = np.exp(-1j * isolated_energy(model, n, "down") * dt) * v0[n]
        if model.chi(n + m) == 0:
            u_t[:, n] = np.exp(-1j * isolated_energy(model, n, "up") * dt) * u0[n]

    if blocks:
        idx = np.array(blocks)
        e_up, e_dn = np.array(diag_up), np.array(diag_dn)
        w = np.array(weight)
        shift = 0.5 * (e_up + e_dn)
        d_up, d_dn = e_up - shift, e_dn - shift
        tau = pulse.tau

        def rhs(tt, psi):
            lam = pulse.lambda0 / np.cosh(tt / (2.0 * tau)) * w
            up, dn = psi[:, 0], psi[:, 1]
            return np.stack([-1j * (d_up * up + lam * dn), -1j * (lam * up + d_dn * dn)], axis=1)

        psi0 = np.stack([u0[idx], v0[idx + m]], axis=1)
        sol = dopri5(rhs, pulse.t0, psi0, times, settings.rel_tol, settings.abs_tol, settings.max_steps)
        phase = np.exp(-1j * np.outer(dt, shift))
        u_t[:, idx] = sol[:, :, 0] * phase
        v_t[:, idx + m] = sol[:, :, 1] * phase

    states = [QuantumState(u_t[i], v_t[i]) for i in range(times.size)]
    return states[0] if np.ndim(t) == 0 else states
