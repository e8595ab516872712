"""Random sweep of block propagators: unitarity and agreement with the ODE oracle.

Usage: python scripts/sweep_check.py [--samples 1000] [--seed 0] [--rtol 1e-12]
"""

import argparse
import time

import numpy as np

from sechjcm import PulseParams, make_standard_jcm, propagate_subspace
from sechjcm.oracle import OdeSettings, integrate_spin_batch


def cli():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rtol", type=float, default=1e-12)
    ap.add_argument("--t0", type=float, default=-10.0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n = args.samples
    lam = rng.uniform(0.1, 10.0, n)
    dbar = rng.uniform(-2.0, 2.0, n)
    delta = rng.integers(1, 31, n)
    t = args.t0 + rng.uniform(0.0, 40.0, n)

    start = time.perf_counter()
    h = np.empty(n, complex)
    f = np.empty(n, complex)
    for j in range(n):
        p = propagate_subspace(make_standard_jcm(1.0, 1.0 + 2 * dbar[j]),
                               PulseParams(lam[j], 1.0, args.t0), int(delta[j]), t[j])
        h[j], f[j] = p.h, p.f
    t_exact = time.perf_counter() - start
    unit = np.abs(np.abs(h) ** 2 + np.abs(f) ** 2 - 1)
    print(f"analytic: {n} tuples in {t_exact:.2f}s, max unitarity error {unit.max():.2e}")

    start = time.perf_counter()
    h_ode, f_ode = integrate_spin_batch(lam * np.sqrt(delta), dbar, 1.0, args.t0, t,
                                        OdeSettings(rel_tol=args.rtol, abs_tol=args.rtol * 1e-2))
    gap = np.maximum(np.abs(h - h_ode), np.abs(f - f_ode))
    j = int(gap.argmax())
    print(f"oracle:   {time.perf_counter() - start:.2f}s, max |analytic - ode| {gap[j]:.2e} "
          f"at lambda0 tau = {lam[j]:.3f}, delta_eff tau = {dbar[j]:.3f}, Delta = {delta[j]}, t = {t[j]:.2f}")


if __name__ == "__main__":
    cli()
