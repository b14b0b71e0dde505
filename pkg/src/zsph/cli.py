"""Command-line driver: basis caching, simulation, ensembles, analysis, synthesis.

Configuration precedence is flags > config file > defaults.  The config file
is flat ``key = value`` text whose keys mirror the long flag names (dashes or
underscores both accepted).  Every run echoes its effective configuration into
a ``run_meta`` provenance file next to the outputs.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time as _time
from pathlib import Path

import numpy as np

from .diagnostics import nide_rates, scaling_norms
from .dynamics import NideSpec, build_nide_operator, build_noise_scaling
from .ensemble import (
    RunConfig,
    SimulationContext,
    run_ensemble,
    run_trajectory,
    write_summary_csv,
    write_timeseries_csv,
)
from .errors import ZsphError
from .fields import random_initial_condition, save_grid, synthesize_grid
from .integrators import ModelSpec
from .quantization import (
    HarmonicCoefficients,
    Resolution,
    build_basis,
    extract,
    load_cache,
    save_cache,
)

CACHE_ENV_VAR = "ZSPH_CACHE_DIR"

DEFAULTS = {
    "n": 32,
    "dt": 0.01,
    "t_end": 1.0,
    "model": "euler",
    "a": 1.0,
    "m_max": 8,
    "nu": 1e-4,
    "nu_salt": 0.5,
    "nide_mode": "power-law",
    "seed": 0,
    "ic_seed": 0,
    "ic_lmax": 10,
    "realizations": 1,
    "workers": 1,
    "sample_every": 1,
    "out": ".",
    "cache_dir": None,
    "snapshots_every": 0,
    "preset": None,
    "nlat": 128,
    "nlon": 256,
}

_INT_KEYS = {
    "n",
    "m_max",
    "seed",
    "ic_seed",
    "ic_lmax",
    "realizations",
    "workers",
    "sample_every",
    "snapshots_every",
    "nlat",
    "nlon",
}
_FLOAT_KEYS = {"dt", "t_end", "a", "nu", "nu_salt"}


def _add_common(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--n", type=int)
    add("--dt", type=float)
    add("--t-end", dest="t_end", type=float)
    add("--model", choices=["euler", "ns", "nide", "stochastic"])
    add("--a", type=float)
    add("--m-max", dest="m_max", type=int)
    add("--nu", type=float)
    add("--nu-salt", dest="nu_salt", type=float)
    add("--nide-mode", dest="nide_mode", choices=["power-law", "avm"])
    add("--seed", type=int)
    add("--ic-seed", dest="ic_seed", type=int)
    add("--ic-lmax", dest="ic_lmax", type=int)
    add("--realizations", type=int)
    add("--workers", type=int)
    add("--sample-every", dest="sample_every", type=int)
    add("--out")
    add("--cache-dir", dest="cache_dir")
    add("--snapshots-every", dest="snapshots_every", type=int)
    add("--preset", choices=["paper-fig2"])
    add("--config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zsph",
        description="Structure-preserving spectral solver for 2D flow on the sphere",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, helptext in [
        ("basis", "build and persist a quantized harmonic basis cache"),
        ("simulate", "run one trajectory and write a diagnostics CSV"),
        ("ensemble", "run a Monte Carlo ensemble and write per-realization and summary CSVs"),
        ("analyze", "report noise-scaling norms and dissipation rates"),
        ("synth", "convert a stored coefficient state to a grid snapshot file"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "synth":
            p.add_argument("--state", required=True, help="coefficient state file (.npz)")
            p.add_argument("--nlat", type=int)
            p.add_argument("--nlon", type=int)
    return parser


def read_config_file(path: str) -> dict:
    """Flat key = value text; blank lines and # comments ignored."""
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: malformed line {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ValueError(f"{path}: unknown configuration key {key!r}")
        if key in _INT_KEYS:
            values[key] = int(val)
        elif key in _FLOAT_KEYS:
            values[key] = float(val)
        else:
            values[key] = val
    return values


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge flags over config file over defaults (and the cache-dir env var)."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        opts.update(read_config_file(args.config))
    for key in DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            opts[key] = flag_value
    if opts["cache_dir"] is None:
        opts["cache_dir"] = os.environ.get(CACHE_ENV_VAR) or None
    for key in ("n", "realizations", "workers", "sample_every", "ic_lmax"):
        if opts[key] < 1:
            raise ValueError(f"--{key.replace('_', '-')} must be positive")
    for key in ("dt", "t_end", "a", "nu_salt"):
        if opts[key] <= 0:
            raise ValueError(f"--{key.replace('_', '-')} must be positive")
    if opts["nu"] < 0 or opts["snapshots_every"] < 0:
        raise ValueError("--nu and --snapshots-every must be nonnegative")
    return opts


def cache_file_path(cache_dir: str, n: int) -> Path:
    return Path(cache_dir) / f"basis_n{n}.zsph"


def obtain_cache(opts: dict):
    """Load the basis cache from disk when available, else build (and persist)."""
    n = opts["n"]
    cache_dir = opts["cache_dir"]
    if cache_dir:
        path = cache_file_path(cache_dir, n)
        if path.exists():
            return load_cache(path, expected_n=n)
        cache = build_basis(Resolution(n))
        path.parent.mkdir(parents=True, exist_ok=True)
        save_cache(cache, path)
        return cache
    return build_basis(Resolution(n))


def build_model_spec(opts: dict) -> ModelSpec:
    model = opts["model"]
    if model == "euler":
        return ModelSpec(variant="euler", h=opts["dt"])
    if model == "ns":
        return ModelSpec(variant="navier_stokes", h=opts["dt"], nu=opts["nu"])
    scaling = build_noise_scaling(opts["a"], opts["m_max"], opts["nu_salt"], n=opts["n"])
    if model == "stochastic":
        return ModelSpec(variant="stochastic", h=opts["dt"], scaling=scaling)
    if model == "nide":
        if opts["nide_mode"] == "avm":
            spec = NideSpec.avm()
        else:
            spec = NideSpec.power_law(scaling)
        return ModelSpec(variant="nide", h=opts["dt"], nide=spec)
    raise ValueError(f"unknown model {model!r}")


def build_run_config(opts: dict, realizations: int | None = None) -> RunConfig:
    return RunConfig(
        n=opts["n"],
        model=build_model_spec(opts),
        t_end=opts["t_end"],
        sample_every=opts["sample_every"],
        seed=opts["seed"],
        realizations=opts["realizations"] if realizations is None else realizations,
        ic_seed=opts["ic_seed"],
        ic_l_max=opts["ic_lmax"],
        workers=opts["workers"],
    )


def write_run_meta(opts: dict, out_dir: Path, extra: dict | None = None) -> None:
    lines = [f"timestamp = {_time.strftime('%Y-%m-%dT%H:%M:%S')}"]
    for key in sorted(DEFAULTS):
        value = opts.get(key)
        lines.append(f"{key.replace('_', '-')} = {'' if value is None else value}")
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    (out_dir / "run_meta").write_text("\n".join(lines) + "\n")


def save_state(coeffs: HarmonicCoefficients, n: int, t: float, path) -> None:
    np.savez(path, values=coeffs.values, l_max=coeffs.l_max, n=n, time=t)


def load_state(path) -> tuple[HarmonicCoefficients, float]:
    with np.load(path) as data:
        coeffs = HarmonicCoefficients(
            l_max=int(data["l_max"]), values=np.asarray(data["values"], dtype=complex)
        )
        t = float(data["time"]) if "time" in data else 0.0
    return coeffs, t


# -- subcommands ---------------------------------------------------------------


def cmd_basis(opts: dict) -> int:
    cache_dir = opts["cache_dir"] or "."
    path = cache_file_path(cache_dir, opts["n"])
    cache = build_basis(Resolution(opts["n"]))
    path.parent.mkdir(parents=True, exist_ok=True)
    save_cache(cache, path)
    load_cache(path, expected_n=opts["n"])  # round-trip verification
    print(f"wrote basis cache for N={opts['n']} to {path}")
    return 0


def cmd_simulate(opts: dict) -> int:
    out_dir = Path(opts["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    config = build_run_config(opts, realizations=1)
    ctx = SimulationContext(config, cache=obtain_cache(opts))
    sink: dict = {}
    series = run_trajectory(config, 0, context=ctx, state_sink=sink)
    write_timeseries_csv(series, out_dir / "series.csv")

    every = opts["snapshots_every"]
    if every > 0:
        for t, w in sink.items():
            if t == "final":
                continue
            step = int(round(t / opts["dt"]))
            if step % every != 0 and t != 0.0:
                continue
            coeffs = extract(w, ctx.cache)
            grid = synthesize_grid(coeffs, opts["nlat"], opts["nlon"], time=t)
            save_grid(grid, out_dir / f"snapshot_{step:06d}.zgrd")
    save_state(
        extract(sink["final"], ctx.cache),
        opts["n"],
        series.samples[-1].t,
        out_dir / "state_final.npz",
    )
    write_run_meta(opts, out_dir, extra={"status": series.error or "ok"})
    if series.error:
        print(f"trajectory aborted: {series.error}", file=sys.stderr)
        return 1
    print(f"wrote {out_dir / 'series.csv'} ({len(series.samples)} samples)")
    return 0


def _run_one_ensemble(opts: dict, out_dir: Path) -> None:
    config = build_run_config(opts)
    context = None
    if config.workers <= 1 or config.realizations <= 1:
        context = SimulationContext(config, cache=obtain_cache(opts))
    series, summary = run_ensemble(config, context=context)
    out_dir.mkdir(parents=True, exist_ok=True)
    for s in series:
        write_timeseries_csv(s, out_dir / f"realization_{s.realization:04d}.csv")
    write_summary_csv(summary, out_dir / "summary.csv")
    write_run_meta(
        opts,
        out_dir,
        extra={
            "completed-realizations": summary.realization_count,
            "failed-realizations": len(summary.failed),
        },
    )


def _preset_runs(opts: dict):
    """Experiment matrix: stochastic ensembles over M = N/16..N/2 and a = 1, 2."""
    n = opts["n"]
    if n < 16:
        raise ValueError("the paper-fig2 preset needs N >= 16")
    for a in (1.0, 2.0):
        for m_max in (n // 16, n // 8, n // 4, n // 2):
            run = dict(opts)
            run.update(model="stochastic", a=a, m_max=m_max)
            yield run


def cmd_ensemble(opts: dict) -> int:
    out_dir = Path(opts["out"])
    if opts["preset"] == "paper-fig2":
        out_dir.mkdir(parents=True, exist_ok=True)
        rows = []
        for run in _preset_runs(opts):
            label = f"a{run['a']:g}_m{run['m_max']}"
            run_dir = out_dir / label
            print(f"running {label} ...")
            _run_one_ensemble(run, run_dir)
            rows.append(
                {
                    "label": label,
                    "model": run["model"],
                    "a": run["a"],
                    "m_max": run["m_max"],
                    "summary": f"{label}/summary.csv",
                }
            )
        with open(out_dir / "manifest.csv", "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=["label", "model", "a", "m_max", "summary"])
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {out_dir / 'manifest.csv'} ({len(rows)} runs)")
        return 0
    _run_one_ensemble(opts, out_dir)
    print(f"wrote {out_dir / 'summary.csv'}")
    return 0


def cmd_analyze(opts: dict) -> int:
    norms = scaling_norms(opts["a"], opts["m_max"], opts["nu_salt"])
    print(f"noise scaling: a={opts['a']:g} M={opts['m_max']} nu_salt={opts['nu_salt']:g}")
    print(f"  c_l2       = {norms.c_l2:.12g}")
    print(f"  alpha_inf  = {norms.alpha_inf:.12g}")
    print(f"  regime     = {norms.regime}")

    cache = obtain_cache(opts)
    ctx_config = build_run_config({**opts, "model": "euler", "realizations": 1}, 1)
    ctx = SimulationContext(ctx_config, cache=cache)
    if opts["nide_mode"] == "avm":
        spec = NideSpec.avm()
    else:
        scaling = build_noise_scaling(opts["a"], opts["m_max"], opts["nu_salt"], n=opts["n"])
        spec = NideSpec.power_law(scaling)
    op = build_nide_operator(spec, cache, fact=ctx.fact)
    de_dt, ds_dt = nide_rates(ctx.w0, op, ctx.fact)
    print(f"dissipation rates on the seeded initial state (mode={opts['nide_mode']}):")
    print(f"  dE/dt      = {de_dt:.12g}")
    print(f"  dS/dt      = {ds_dt:.12g}")
    return 0


def cmd_synth(opts: dict, state_path: str) -> int:
    coeffs, t = load_state(state_path)
    grid = synthesize_grid(coeffs, opts["nlat"], opts["nlon"], time=t)
    out = Path(opts["out"])
    if out.is_dir() or opts["out"] == DEFAULTS["out"]:
        out.mkdir(parents=True, exist_ok=True)
        out = out / (Path(state_path).stem + ".zgrd")
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
    save_grid(grid, out)
    print(f"wrote {out} ({grid.nlat}x{grid.nlon})")
    return 0


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = resolve_options(args)
        if args.subcommand == "basis":
            return cmd_basis(opts)
        if args.subcommand == "simulate":
            return cmd_simulate(opts)
        if args.subcommand == "ensemble":
            return cmd_ensemble(opts)
        if args.subcommand == "analyze":
            return cmd_analyze(opts)
        if args.subcommand == "synth":
            return cmd_synth(opts, args.state)
    except (ZsphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def main() -> None:
    sys.exit(run_cli())
