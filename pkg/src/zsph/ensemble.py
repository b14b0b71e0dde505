"""Trajectory and Monte Carlo ensemble execution with deterministic seeding.

Each realization owns an independent RNG stream derived from
(master seed, realization index) via ``SeedSequence`` spawning, so results
are bit-identical regardless of worker count or scheduling.  The basis cache
and Laplacian factorization are shared read-only.
"""

from __future__ import annotations

import csv
import pickle
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import DiagnosticsSample, sample_diagnostics, spectrum
from .dynamics import build_noise_generators
from .errors import AggregationError, EnsembleError, StepFailureError
from .fields import random_initial_condition
from .integrators import FixedPointSettings, ModelSpec, Stepper, sample_noise_draw
from .laplacian import build_factorization
from .quantization import BasisCache, Resolution, build_basis, load_cache, project

TIMESERIES_HEADER = [
    "t",
    "energy",
    "enstrophy",
    "casimir2",
    "casimir3",
    "casimir4",
    "spectrum_drift",
]
SUMMARY_HEADER = [
    "t",
    "energy_mean",
    "energy_std",
    "enstrophy_mean",
    "enstrophy_std",
    "n_realizations",
]


@dataclass(frozen=True)
class RunConfig:
    n: int
    model: ModelSpec
    t_end: float
    sample_every: int = 1
    seed: int = 0
    realizations: int = 1
    ic_seed: int = 0
    ic_l_max: int = 10
    workers: int = 1
    cache_path: str | None = None  # basis cache file; rebuilt when absent
    force_zero_noise: bool = False  # test hook: stochastic step with zeta = 0

    def __post_init__(self):
        if self.t_end <= 0 or self.sample_every < 1 or self.realizations < 1:
            raise ValueError("invalid run configuration")
        if self.model.variant != "stochastic" and self.realizations != 1:
            raise ValueError("deterministic variants run a single realization")

    @property
    def step_count(self) -> int:
        return int(round(self.t_end / self.model.h))


@dataclass
class TimeSeries:
    realization: int
    samples: list[DiagnosticsSample]
    error: str | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        if name in ("energy", "enstrophy", "spectrum_drift", "t"):
            return np.array([getattr(s, name if name != "t" else "t") for s in self.samples])
        if name.startswith("casimir"):
            k = int(name[len("casimir") :]) - 2
            return np.array([s.casimirs[k] for s in self.samples])
        raise KeyError(name)


@dataclass
class EnsembleSummary:
    times: np.ndarray
    energy_mean: np.ndarray
    energy_std: np.ndarray
    enstrophy_mean: np.ndarray
    enstrophy_std: np.ndarray
    realization_count: int
    failed: tuple = ()


class SimulationContext:
    """Shared read-only state for all realizations of one configuration."""

    def __init__(self, config: RunConfig, cache: BasisCache | None = None):
        self.config = config
        if cache is None:
            if config.cache_path is not None:
                cache = load_cache(config.cache_path, expected_n=config.n)
            else:
                cache = build_basis(Resolution(config.n))
        self.cache = cache
        self.fact = build_factorization(cache.resolution, cache.generators)
        gens = None
        if config.model.variant == "stochastic":
            gens = build_noise_generators(cache, config.model.scaling.m_max)
        self.stepper = Stepper(
            config.model, cache, self.fact, FixedPointSettings(), gens=gens
        )
        self.w0 = project(
            random_initial_condition(config.ic_seed, config.ic_l_max), cache
        )
        self.ref_spectrum = spectrum(self.w0)


def realization_rng(seed: int, realization: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(realization,))
    return np.random.default_rng(seq)


def run_trajectory(
    config: RunConfig,
    realization: int = 0,
    context: SimulationContext | None = None,
    state_sink: dict | None = None,
) -> TimeSeries:
    """Advance one realization, sampling diagnostics every ``sample_every`` steps.

    ``state_sink`` (optional dict) receives snapshots of the raw state under
    key t for callers that export snapshots; "final" holds the last state.
    """
    ctx = context or SimulationContext(config)
    model = config.model
    stepper = ctx.stepper
    rng = realization_rng(config.seed, realization)
    w = ctx.w0.copy()
    h = model.h
    nsteps = config.step_count

    samples = [sample_diagnostics(0.0, w, ctx.fact, ctx.ref_spectrum)]
    if state_sink is not None:
        state_sink[0.0] = w.copy()
    error = None
    for k in range(1, nsteps + 1):
        draw = None
        if model.variant == "stochastic":
            draw = sample_noise_draw(h, model.scaling, rng)
            if config.force_zero_noise:
                draw = replace(draw, zetas=np.zeros_like(draw.zetas))
        try:
            w = stepper.composite_step(w, draw)
        except StepFailureError as exc:
            error = f"step {k} (t={k * h:.6g}): {exc}"
            break
        if k % config.sample_every == 0 or k == nsteps:
            samples.append(sample_diagnostics(k * h, w, ctx.fact, ctx.ref_spectrum))
            if state_sink is not None:
                state_sink[k * h] = w.copy()
    if state_sink is not None:
        state_sink["final"] = w.copy()
    return TimeSeries(realization=realization, samples=samples, error=error)


_WORKER_CTX: SimulationContext | None = None
_WORKER_KEY: bytes | None = None


def _worker_run(args):
    # Cache the shared context per worker process, keyed on the pickled
    # configuration (direct equality is unreliable with array-valued fields).
    global _WORKER_CTX, _WORKER_KEY
    config, realization = args
    key = pickle.dumps(config)
    if _WORKER_CTX is None or _WORKER_KEY != key:
        _WORKER_CTX = SimulationContext(config)
        _WORKER_KEY = key
    return run_trajectory(config, realization, context=_WORKER_CTX)


def run_ensemble(
    config: RunConfig, context: SimulationContext | None = None
) -> tuple[list[TimeSeries], EnsembleSummary]:
    indices = range(config.realizations)
    if config.workers > 1 and config.realizations > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            series = list(pool.map(_worker_run, [(config, i) for i in indices]))
    else:
        ctx = context or SimulationContext(config)
        series = [run_trajectory(config, i, context=ctx) for i in indices]
    summary = aggregate([s for s in series if s.error is None])
    summary.failed = tuple(
        (s.realization, s.error) for s in series if s.error is not None
    )
    if summary.realization_count == 0:
        raise EnsembleError(f"all {config.realizations} realizations failed")
    return series, summary


def aggregate(series: list[TimeSeries]) -> EnsembleSummary:
    """Pointwise mean and population standard deviation of energy/enstrophy."""
    if not series:
        return EnsembleSummary(
            times=np.zeros(0),
            energy_mean=np.zeros(0),
            energy_std=np.zeros(0),
            enstrophy_mean=np.zeros(0),
            enstrophy_std=np.zeros(0),
            realization_count=0,
        )
    times = series[0].times
    for s in series[1:]:
        if len(s.times) != len(times) or not np.allclose(s.times, times, atol=1e-12):
            raise AggregationError("time series sample grids do not match")
    e = np.array([s.column("energy") for s in series])
    z = np.array([s.column("enstrophy") for s in series])
    return EnsembleSummary(
        times=times,
        energy_mean=e.mean(axis=0),
        energy_std=e.std(axis=0),
        enstrophy_mean=z.mean(axis=0),
        enstrophy_std=z.std(axis=0),
        realization_count=len(series),
    )


# -- CSV export ----------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_timeseries_csv(series: TimeSeries, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TIMESERIES_HEADER)
        for s in series.samples:
            writer.writerow(
                [
                    _fmt(s.t),
                    _fmt(s.energy),
                    _fmt(s.enstrophy),
                    _fmt(s.casimirs[0]),
                    _fmt(s.casimirs[1]),
                    _fmt(s.casimirs[2]),
                    _fmt(s.spectrum_drift),
                ]
            )


def write_summary_csv(summary: EnsembleSummary, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SUMMARY_HEADER)
        for i, t in enumerate(summary.times):
            writer.writerow(
                [
                    _fmt(t),
                    _fmt(summary.energy_mean[i]),
                    _fmt(summary.energy_std[i]),
                    _fmt(summary.enstrophy_mean[i]),
                    _fmt(summary.enstrophy_std[i]),
                    str(summary.realization_count),
                ]
            )
