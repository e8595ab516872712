"""Write every preset curve to CSV and print its envelope diagnostics.

Usage: python scripts/reproduce_figures.py [--outdir figures]
"""

import argparse
from pathlib import Path

from sechjcm.analysis import local_frequency, revival_lobes
from sechjcm.cli import PRESETS, build_config, inversion_curve, main, to_physics


def describe(name):
    cfg = build_config(name, {}, {})
    _, _, t = to_physics(cfg)
    y = inversion_curve(cfg, "analytic")
    if name.startswith("fig1"):
        t_mid, freq = local_frequency(t, y)
        k = freq.argmax()
        return f"Rabi frequency peaks at {freq[k]:.2f}/tau near t = {t_mid[k]:.2f} tau"
    info = revival_lobes(t, y)
    if info["floor"] is None:
        return "no collapse detected"
    lobes = ", ".join(f"[{a:.2f}, {b:.2f}] peak {p:.3f}" for a, b, p in info["lobes"]) or "none"
    return f"collapse at t = {info['t_floor']:.2f}, floor {info['floor']:.1e}, lobes: {lobes}"


def cli():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="figures")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name in PRESETS:
        path = out / f"{name}.csv"
        main(["run", "--preset", name, "--out", str(path)])
        print(f"{name:15s} -> {path}  {describe(name)}")


if __name__ == "__main__":
    cli()
