"""Command-line front end: ``sechjcm run`` and ``sechjcm verify``.

All CLI-facing quantities are dimensionless in units of the pulse width:
times as ``t / tau``, coupling as ``lambda0 tau``, detuning as ``delta tau``.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import make_kerr_jcm
from .oracle import OdeSettings, integrate_subspaces
from .propagator import PropagationError, PulseParams, propagate_subspace
from .specfun import SpecialFunctionError
from .states import (
    coherent_cutoff,
    evolve_many,
    inversion,
    inversion_series_coherent,
    inversion_series_number,
    make_coherent_state,
    make_number_state,
)

log = logging.getLogger("sechjcm")

VERIFY_TOL = 1e-6


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str = "standard"
    omega_tau: float = 1.0
    delta_tau: float = 0.0
    kappa_tau: float = 0.0
    m: int = 1
    lambda0_tau: float = 5.0
    t0: float = -10.0
    initial: str = "number"
    n: int = 0
    pe: float = 1.0
    nbar: float = 10.0
    grid: tuple = (-10.0, 10.0, 2000)
    engine: str = "analytic"
    out: str = "-"
    tail_eps: float = 1e-12
    tol: float = 1e-10

    def validate(self):
        if self.model not in ("standard", "mphoton", "kerr"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.model == "standard" and self.m != 1:
            raise ConfigError("the standard model has m = 1; use --model mphoton")
        if self.model != "kerr" and self.kappa_tau != 0.0:
            raise ConfigError("kappa is only meaningful for --model kerr")
        if self.m < 1:
            raise ConfigError("m must be a positive integer")
        if self.initial not in ("number", "coherent"):
            raise ConfigError(f"unknown initial state {self.initial!r}")
        if self.initial == "number" and (self.n < 0 or not 0.0 <= self.pe <= 1.0):
            raise ConfigError("number state needs n >= 0 and 0 <= pe <= 1")
        if self.initial == "coherent" and self.nbar <= 0:
            raise ConfigError("coherent state needs nbar > 0")
        if self.lambda0_tau < 0:
            raise ConfigError("lambda0-tau must be non-negative")
        start, end, samples = self.grid
        if samples < 2:
            raise ConfigError("grid needs at least 2 samples")
        if not end > start >= self.t0:
            raise ConfigError(f"grid must satisfy t_end > t_start >= t0, got {self.grid} with t0={self.t0}")
        if self.engine not in ("analytic", "ode", "both"):
            raise ConfigError(f"unknown engine {self.engine!r}")
        if not 0.0 < self.tail_eps < 1.0:
            raise ConfigError("tail-eps must lie in (0, 1)")
        if not 0.0 < self.tol <= 1e-2:
            raise ConfigError("tol must lie in (0, 1e-2]")
        return self


_FIG = dict(model="standard", lambda0_tau=5.0, t0=-10.0)
PRESETS = {
    "fig1_resonant": dict(_FIG, initial="number", n=3, pe=1.0, delta_tau=0.0, grid=(-10.0, 10.0, 2000)),
    "fig1_detuned": dict(_FIG, initial="number", n=3, pe=1.0, delta_tau=1.0, grid=(-10.0, 10.0, 2000)),
    "fig2_resonant": dict(_FIG, initial="coherent", nbar=10.0, delta_tau=0.0, grid=(-10.0, 20.0, 3000)),
    "fig2_detuned": dict(_FIG, initial="coherent", nbar=10.0, delta_tau=0.5, grid=(-10.0, 20.0, 3000)),
    "fig3_resonant": dict(_FIG, initial="coherent", nbar=10.0, delta_tau=0.0, t0=0.0, grid=(0.0, 30.0, 3000)),
    "fig3_detuned": dict(_FIG, initial="coherent", nbar=10.0, delta_tau=0.5, t0=0.0, grid=(0.0, 30.0, 3000)),
}

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def parse_grid(text: str) -> tuple:
    """``start:end:samples`` in units of tau."""
    try:
        start, end, samples = text.split(":")
        return (float(start), float(end), int(samples))
    except ValueError as exc:
        raise ConfigError(f"grid must look like start:end:samples, got {text!r}") from exc


def _coerce(key, value):
    if key == "grid":
        return parse_grid(value) if isinstance(value, str) else tuple(value)
    kind = _FIELD_TYPES[key]
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return str(value)


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys use - or _."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "preset":
            out[key] = value
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def build_config(preset=None, file_values=None, overrides=None) -> RunConfig:
    """Layer preset, then config file, then explicit flags."""
    values = {}
    file_values = dict(file_values or {})
    preset = preset or file_values.pop("preset", None)
    file_values.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        values.update(PRESETS[preset])
    values.update(file_values)
    values.update({k: _coerce(k, v) for k, v in (overrides or {}).items() if v is not None})
    if "nbar" in (overrides or {}) and overrides["nbar"] is not None:
        values["initial"] = "coherent"
    elif "n" in (overrides or {}) and overrides["n"] is not None:
        values["initial"] = "number"
    return RunConfig(**values).validate()


def to_physics(cfg: RunConfig):
    """The single unit boundary: tau = 1, so every scaled quantity is used as is."""
    omega = cfg.omega_tau
    model = make_kerr_jcm(omega, cfg.m * omega + cfg.delta_tau, cfg.kappa_tau, cfg.m)
    pulse = PulseParams(lambda0=cfg.lambda0_tau, tau=1.0, t0=cfg.t0)
    start, end, samples = cfg.grid
    return model, pulse, np.linspace(start, end, samples)


def initial_state(cfg: RunConfig):
    if cfg.initial == "coherent":
        return make_coherent_state(cfg.nbar, excited=True, tail_eps=cfg.tail_eps)
    pe = cfg.pe
    return make_number_state(cfg.n, np.sqrt(pe), np.sqrt(1.0 - pe))


def inversion_curve(cfg: RunConfig, engine: str, *, gamma_offset=0.0):
    model, pulse, times = to_physics(cfg)
    if engine == "analytic" and model.m == 1 and gamma_offset == 0.0:
        if cfg.initial == "coherent":
            return inversion_series_coherent(model, pulse, cfg.nbar, times, cfg.tail_eps).values
        return inversion_series_number(model, pulse, cfg.n, cfg.pe, times).values
    settings = OdeSettings(rel_tol=cfg.tol, abs_tol=cfg.tol * 1e-2)
    states = evolve_many(model, pulse, initial_state(cfg), times, engine=engine, settings=settings)
    return np.array([inversion(s) for s in states])


def relevant_blocks(cfg: RunConfig):
    model, _, _ = to_physics(cfg)
    m = model.m
    if cfg.initial == "coherent":
        top = coherent_cutoff(cfg.nbar, cfg.tail_eps)
        return [n + m for n in range(top + 1)]
    blocks = []
    if cfg.pe < 1.0 and model.chi(cfg.n) > 0:
        blocks.append(cfg.n)
    if cfg.pe > 0.0 and model.chi(cfg.n + m) > 0:
        blocks.append(cfg.n + m)
    return blocks


def write_csv(stream, times, columns: dict, summary: dict | None = None):
    stream.write("# t_over_tau," + ",".join(columns) + "\n")
    data = np.column_stack([times, *columns.values()])
    for row in data:
        stream.write(",".join(f"{x:.17g}" for x in row) + "\n")
    for key, value in (summary or {}).items():
        stream.write(f"# {key}={value:.6e}\n")


def _emit(cfg, text):
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.out).write_text(text)


def run(cfg: RunConfig) -> int:
    _, _, times = to_physics(cfg)
    columns, summary = {}, {}
    if cfg.engine in ("analytic", "both"):
        columns["inversion"] = inversion_curve(cfg, "analytic")
    if cfg.engine in ("ode", "both"):
        columns["inversion_ode"] = inversion_curve(cfg, "ode")
    if cfg.engine == "both":
        summary["max_abs_discrepancy"] = float(np.max(np.abs(columns["inversion"] - columns["inversion_ode"])))
    buf = io.StringIO()
    write_csv(buf, times, columns, summary)
    _emit(cfg, buf.getvalue())
    return 0


def verify(cfg: RunConfig, *, gamma_offset=0.0, tol=VERIFY_TOL):
    """Compare both engines block by block; return ``(ok, worst)``.

    ``worst`` is ``(discrepancy, t, Delta)`` over the grid, where the
    discrepancy is ``max(|h - h_ode|, |f - f_ode|)``.
    """
    model, pulse, times = to_physics(cfg)
    settings = OdeSettings(rel_tol=min(cfg.tol, 1e-10), abs_tol=min(cfg.tol, 1e-10) * 1e-2)
    worst = (0.0, float(times[0]), None)
    blocks = relevant_blocks(cfg)
    refs = integrate_subspaces(model, pulse, blocks, times, settings) if blocks else []
    for delta, ref in zip(blocks, refs):
        exact = propagate_subspace(model, pulse, delta, times, gamma_offset=gamma_offset)
        gap = np.maximum(np.abs(exact.h - ref.h), np.abs(exact.f - ref.f))
        i = int(np.argmax(gap))
        if gap[i] > worst[0]:
            worst = (float(gap[i]), float(times[i]), delta)
    return worst[0] <= tol, worst


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--model", choices=["standard", "mphoton", "kerr"])
    common.add_argument("--m", type=int)
    common.add_argument("--omega-tau", type=float, help="field frequency times tau (sets phases only)")
    common.add_argument("--delta-tau", type=float, help="detuning (omega0 - m omega) times tau")
    common.add_argument("--kappa-tau", type=float)
    common.add_argument("--lambda0-tau", type=float)
    common.add_argument("--t0", type=float, help="pulse start time in units of tau")
    common.add_argument("--n", type=int, help="initial Fock number (number-state run)")
    common.add_argument("--pe", type=float, help="initial excited-state probability")
    common.add_argument("--nbar", type=float, help="mean photon number (coherent-state run)")
    common.add_argument("--grid", help="start:end:samples in units of tau")
    common.add_argument("--engine", choices=["analytic", "ode", "both"])
    common.add_argument("--out", help="output CSV path, - for stdout")
    common.add_argument("--tail-eps", type=float)
    common.add_argument("--tol", type=float, help="ODE oracle relative tolerance")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sechjcm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="emit an inversion time series as CSV")
    ver = sub.add_parser("verify", parents=[common], help="cross-check analytic and ODE engines")
    ver.add_argument("--corrupt-gamma", type=float, default=0.0, help=argparse.SUPPRESS)
    sub.add_parser("presets", help="list preset scenarios")
    return parser


_FLAG_KEYS = ("model", "m", "omega_tau", "delta_tau", "kappa_tau", "lambda0_tau", "t0",
              "n", "pe", "nbar", "grid", "engine", "out", "tail_eps", "tol")


def _join_grid(argv):
    # let "--grid -10:10:200" through; argparse would take the value for a flag
    out = []
    it = iter(argv)
    for tok in it:
        out.append(f"--grid={next(it, '')}" if tok == "--grid" else tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = _parser().parse_args(_join_grid(argv))
    if args.command == "presets":
        for name, values in PRESETS.items():
            print(name, " ".join(f"{k}={v}" for k, v in values.items()))
        return 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(args.preset, file_values, {k: getattr(args, k) for k in _FLAG_KEYS})
    except (ConfigError, OSError, TypeError) as exc:
        print(f"sechjcm: configuration error: {exc}", file=sys.stderr)
        return 2
    log.info("config: %s", cfg)
    try:
        if args.command == "run":
            return run(cfg)
        ok, (gap, t, delta) = verify(cfg, gamma_offset=args.corrupt_gamma)
    except (PropagationError, SpecialFunctionError) as exc:
        print(f"sechjcm: numerical failure: {exc}", file=sys.stderr)
        return 3
    status = "PASS" if ok else "FAIL"
    print(f"{status} max |analytic - ode| = {gap:.3e} (tol {VERIFY_TOL:g}) worst at t/tau = {t:g}, Delta = {delta}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
