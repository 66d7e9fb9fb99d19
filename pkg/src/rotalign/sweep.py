"""Parameter sweeps over interaction strength, pulse duration, amplitude ratio and delay."""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from threadpoolctl import threadpool_limits

from .basis import build_basis, build_quadrature
from .field import CouplingSet, FieldConfig, InteractionMode, PulseSpec
from .propagator import PropagationPlan, TimeSeries, initial_eigenstate, propagate, refine_dt

__all__ = [
    "BASIS_CHECK_TOL",
    "ColorMode",
    "FIGURES",
    "RunConfig",
    "RunSettings",
    "RunSummary",
    "SweepSpec",
    "expand_sweep",
    "figure_sweep",
    "run_single",
    "run_sweep",
    "summarize",
]

BASIS_CHECK_TOL = 1e-8


class ColorMode(str, enum.Enum):
    ONE_COLOR = "one_color"
    TWO_COLOR = "two_color"


@dataclass(frozen=True)
class RunSettings:
    """Plan and field parameters shared by every run of a sweep."""

    interaction: InteractionMode = InteractionMode.CYCLE_AVERAGED
    carrier_omega: float | None = None
    delta_omega_mu: float = 0.0
    delta_omega_perp: float = 0.0
    j_max: int = 64
    m: int = 0
    j0: int = 0
    n_nodes: int | None = None
    dt: float = 1e-4
    record_every: int = 10
    t_start: float = 0.0
    t_end: float | None = None
    center_factor: float = 4.0
    post_window: float = math.pi
    record_populations: bool = False
    field_cutoff: float = 1e-6
    auto_dt: bool = False
    check_basis: bool = False

    @property
    def resolved_n_nodes(self) -> int:
        return self.n_nodes if self.n_nodes is not None else 2 * self.j_max + 1


@dataclass(frozen=True)
class SweepSpec:
    delta_omegas: tuple
    tau_fwhms: tuple
    amplitude_ratios: tuple = (1.0,)
    delay_ratios: tuple = (1.0,)
    color_mode: ColorMode = ColorMode.ONE_COLOR
    settings: RunSettings = field(default_factory=RunSettings)

    def __post_init__(self):
        for name in ("delta_omegas", "tau_fwhms", "amplitude_ratios", "delay_ratios"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ValueError(f"sweep axis {name} is empty")
            object.__setattr__(self, name, values)
        object.__setattr__(self, "color_mode", ColorMode(self.color_mode))


@dataclass(frozen=True)
class RunConfig:
    """One point of a sweep, fully determining a propagation."""

    delta_omega: float
    tau_fwhm: float
    amplitude_ratio: float
    delay_ratio: float
    color_mode: ColorMode
    settings: RunSettings

    @property
    def t1(self) -> float:
        return self.settings.center_factor * self.tau_fwhm

    def pulses(self) -> tuple:
        first = PulseSpec(1.0, self.tau_fwhm, self.t1, carrier_multiple=1)
        if self.color_mode is ColorMode.ONE_COLOR:
            return (first,)
        second = PulseSpec(
            self.amplitude_ratio, self.tau_fwhm, self.delay_ratio * self.t1, carrier_multiple=2
        )
        return (first, second)

    def field_config(self) -> FieldConfig:
        s = self.settings
        couplings = CouplingSet(self.delta_omega, s.delta_omega_mu, s.delta_omega_perp)
        return FieldConfig(self.pulses(), couplings, s.carrier_omega, s.interaction)

    def t_end(self) -> float:
        s = self.settings
        if s.t_end is not None:
            return s.t_end
        last = max(p.center for p in self.pulses())
        return last + s.center_factor * self.tau_fwhm + s.post_window

    def plan(self, j_max: int | None = None) -> PropagationPlan:
        s = self.settings
        if j_max is None:
            grid = _grid(s.j_max, s.m, s.resolved_n_nodes)
        else:
            grid = _grid(j_max, s.m, 2 * j_max + 1)
        return PropagationPlan(
            s.t_start, self.t_end(), s.dt, s.record_every, self.field_config(), grid, s.record_populations
        )

    def params(self) -> tuple:
        out = [("color_mode", self.color_mode.value), ("delta_omega", self.delta_omega), ("tau_fwhm", self.tau_fwhm)]
        if self.color_mode is ColorMode.TWO_COLOR:
            out += [("amplitude_ratio", self.amplitude_ratio), ("delay_ratio", self.delay_ratio)]
        return tuple(out)


@lru_cache(maxsize=8)
def _grid(j_max: int, m: int, n_nodes: int):
    return build_quadrature(n_nodes, build_basis(j_max, m))


@dataclass(frozen=True)
class RunSummary:
    params: tuple
    peak_alignment: float
    t_peak: float
    post_pulse_mean: float | None
    post_pulse_amplitude: float | None
    converged: bool
    peak_during_pulse: float | None = None
    t_peak_during_pulse: float | None = None
    norm_drift: float = 0.0
    max_edge_population: float = 0.0
    dt: float | None = None


def expand_sweep(spec: SweepSpec) -> list:
    """Cartesian product in list order, delta_omega outermost.  One-color sweeps ignore
    the ratio and delay axes."""
    if spec.color_mode is ColorMode.ONE_COLOR:
        ratios, delays = (1.0,), (1.0,)
    else:
        ratios, delays = spec.amplitude_ratios, spec.delay_ratios
    return [
        RunConfig(dw, tau, r, d, spec.color_mode, spec.settings)
        for dw, tau, r, d in itertools.product(spec.delta_omegas, spec.tau_fwhms, ratios, delays)
    ]


def summarize(series: TimeSeries, field_cutoff: float = 1e-6, params: tuple = ()) -> RunSummary:
    """Peak alignment over the whole run and statistics over the field-free tail.

    The tail is the longest suffix of records where |field| stays below
    ``field_cutoff`` times its maximum; if there is no such suffix the post-pulse
    entries are None.  ``peak_during_pulse`` is the maximum over records where |field|
    is at or above that threshold (None for a field-free run).
    """
    if len(series) == 0:
        raise ValueError("cannot summarize an empty time series")
    i_peak = int(np.argmax(series.alignment))
    magnitude = np.abs(series.field)
    peak_field = float(magnitude.max())
    during = t_during = None
    if peak_field == 0.0:
        start = 0
    else:
        above = np.nonzero(magnitude >= field_cutoff * peak_field)[0]
        start = int(above[-1]) + 1
        i_on = above[int(np.argmax(series.alignment[above]))]
        during, t_during = float(series.alignment[i_on]), float(series.t[i_on])
    tail = series.alignment[start:]
    if tail.size:
        mean, amplitude = float(tail.mean()), float(tail.max() - tail.min())
    else:
        mean = amplitude = None
    return RunSummary(
        params=params,
        peak_alignment=float(series.alignment[i_peak]),
        t_peak=float(series.t[i_peak]),
        post_pulse_mean=mean,
        post_pulse_amplitude=amplitude,
        converged=bool(series.converged),
        peak_during_pulse=during,
        t_peak_during_pulse=t_during,
        norm_drift=float(series.norm_drift),
        max_edge_population=float(series.max_edge_population),
    )


def run_single(run: RunConfig):
    """Propagate one sweep point and summarize it."""
    s = run.settings
    with threadpool_limits(limits=1):
        plan = run.plan()
        state = initial_eigenstate(s.j0, s.m, plan.basis)
        if s.auto_dt:
            series, dt, _ = refine_dt(state, plan)
        else:
            series, dt = propagate(state, plan), s.dt
        converged = series.converged
        if s.check_basis:
            wide_plan = replace(run, settings=replace(s, dt=dt, record_every=10**9)).plan(j_max=2 * s.j_max)
            wide = propagate(initial_eigenstate(s.j0, s.m, wide_plan.basis), wide_plan)
            converged = converged and abs(wide.alignment[-1] - series.alignment[-1]) < BASIS_CHECK_TOL
    series.converged = converged
    summary = replace(summarize(series, s.field_cutoff, run.params()), dt=dt)
    return series, summary


def _run_block(block):
    return [run_single(r) for r in block]


def run_sweep(spec: SweepSpec, workers: int = 1) -> list:
    """Run every sweep point; results come back in :func:`expand_sweep` order.

    Runs are split into ``workers`` contiguous blocks up front.  Each run is
    single-threaded and deterministic, so the output does not depend on ``workers``.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    runs = expand_sweep(spec)
    if workers == 1 or len(runs) == 1:
        return _run_block(runs)
    n = min(workers, len(runs))
    bounds = np.linspace(0, len(runs), n + 1).round().astype(int)
    blocks = [runs[a:b] for a, b in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=n) as pool:
        results = list(pool.map(_run_block, blocks))
    return [r for block in results for r in block]


FIGURES = {
    1: dict(
        delta_omegas=(100.0, 400.0, 900.0),
        tau_fwhms=(0.05, 0.5, 5.0),
        color_mode=ColorMode.ONE_COLOR,
    ),
    2: dict(
        delta_omegas=(100.0, 400.0, 900.0),
        tau_fwhms=(0.05, 0.5, 5.0),
        color_mode=ColorMode.TWO_COLOR,
    ),
    3: dict(
        delta_omegas=(100.0, 400.0, 900.0),
        tau_fwhms=(0.05,),
        amplitude_ratios=(1.0, math.sqrt(2.0)),
        color_mode=ColorMode.TWO_COLOR,
    ),
    4: dict(
        delta_omegas=(100.0, 400.0, 900.0),
        tau_fwhms=(0.05,),
        delay_ratios=(1.0, 1.5, 2.0),
        color_mode=ColorMode.TWO_COLOR,
    ),
}


def figure_sweep(number: int, settings: RunSettings | None = None) -> SweepSpec:
    """Canned sweep reproducing the parameter grid of figure ``number`` (1-4)."""
    if number not in FIGURES:
        raise ValueError(f"no canned sweep for figure {number}; choose from {sorted(FIGURES)}")
    return SweepSpec(settings=settings or RunSettings(), **FIGURES[number])
