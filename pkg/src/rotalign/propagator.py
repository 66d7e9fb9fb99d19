"""Strang split-operator propagation of the rotor wavefunction.

One step of length dt advances the coefficients by

    exp(-i V(t + dt/2) dt/2)  exp(-i J^2 dt)  exp(-i V(t + dt/2) dt/2)

The kinetic factor is diagonal in the spectral basis.  The potential factors are
diagonal on the Gauss-Legendre grid, reached through the orthonormal scaled table of
:class:`~rotalign.basis.AngularGrid`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import AngularGrid, BasisDescriptor, BasisError, SpectralState, cos2_theta_matrix, cos_theta_matrix
from .field import FieldConfig, effective_couplings, field_record

__all__ = [
    "EDGE_POPULATION_LIMIT",
    "NORM_DRIFT_LIMIT",
    "PropagationPlan",
    "TimeSeries",
    "free_evolve",
    "initial_eigenstate",
    "propagate",
    "refine_dt",
    "step_schedule",
    "strang_step",
]

NORM_DRIFT_LIMIT = 1e-8
EDGE_POPULATION_LIMIT = 1e-8


@dataclass(frozen=True, eq=False)
class PropagationPlan:
    t_start: float
    t_end: float
    dt: float
    record_every: int
    field: FieldConfig
    grid: AngularGrid
    record_populations: bool = False

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end={self.t_end} must exceed t_start={self.t_start}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.dt > self.t_end - self.t_start:
            raise ValueError(f"dt={self.dt} exceeds the time window {self.t_end - self.t_start}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")
        j_max = self.grid.basis.j_max
        if self.dt * j_max * (j_max + 1) > 2 * math.pi:
            warnings.warn(
                f"dt * j_max(j_max+1) = {self.dt * j_max * (j_max + 1):.3g} > 2 pi: "
                "the fastest retained level winds more than a full phase cycle per step",
                stacklevel=2,
            )

    @property
    def basis(self) -> BasisDescriptor:
        return self.grid.basis


@dataclass(eq=False)
class TimeSeries:
    """Recorded observables of one run, plus its convergence diagnostics."""

    t: np.ndarray
    alignment: np.ndarray
    orientation: np.ndarray
    norm: np.ndarray
    field: np.ndarray
    populations: np.ndarray | None = None
    j_values: np.ndarray | None = None
    norm_drift: float = 0.0
    max_edge_population: float = 0.0
    converged: bool = True

    def __len__(self):
        return len(self.t)


def initial_eigenstate(j: int, m: int, basis: BasisDescriptor) -> SpectralState:
    """Field-free eigenstate Y_{j,m} as a unit coefficient vector."""
    if m != basis.m:
        raise BasisError(f"m={m} does not match the basis (m={basis.m})")
    c = np.zeros(basis.dim, dtype=np.complex128)
    c[basis.index(j)] = 1.0
    return SpectralState(c, basis)


def _rotational_energies(basis: BasisDescriptor) -> np.ndarray:
    j = basis.j_values.astype(float)
    return j * (j + 1)


def free_evolve(state: SpectralState, dt: float) -> SpectralState:
    phases = np.exp(-1j * _rotational_energies(state.basis) * dt)
    return SpectralState(state.coefficients * phases, state.basis)


def step_schedule(plan: PropagationPlan):
    """Start times and lengths of every step; the last one is shortened to land on t_end."""
    span = plan.t_end - plan.t_start
    ratio = span / plan.dt
    n = int(round(ratio)) if abs(ratio - round(ratio)) < 1e-9 else int(math.ceil(ratio))
    n = max(n, 1)
    starts = plan.t_start + np.arange(n) * plan.dt
    lengths = np.full(n, plan.dt)
    last = plan.t_end - starts[-1]
    if abs(last - plan.dt) > 1e-12 * plan.dt:
        lengths[-1] = last
    return starts, lengths


def record_steps(n_steps: int, record_every: int) -> np.ndarray:
    """Step counts after which a record is taken; always includes 0 and the final step."""
    idx = np.arange(0, n_steps + 1, record_every)
    if idx[-1] != n_steps:
        idx = np.append(idx, n_steps)
    return idx


class _SplitStepper:
    def __init__(self, plan: PropagationPlan):
        grid = plan.grid
        self.field = plan.field
        self.synth = np.ascontiguousarray(grid.scaled_table)
        self.analysis = np.ascontiguousarray(grid.scaled_table.T)
        self.x = np.asarray(grid.nodes)
        self.x2 = self.x * self.x
        self.energies = _rotational_energies(grid.basis)
        self._kinetic = {}

    def kinetic(self, dt: float) -> np.ndarray:
        k = self._kinetic.get(dt)
        if k is None:
            k = self._kinetic[dt] = np.exp(-1j * self.energies * dt)
        return k

    def potential_phase(self, dt, c1, c2, c0) -> np.ndarray:
        return np.exp((-0.5j * dt) * (c1 * self.x + c2 * self.x2 + c0))

    def _apply_potential(self, c: np.ndarray, phase: np.ndarray) -> np.ndarray:
        # complex @ real without upcasting the table: view (re, im) pairs as a 2-column matrix
        u = (self.synth @ c.view(np.float64).reshape(-1, 2)).view(np.complex128).ravel()
        u *= phase
        return (self.analysis @ u.view(np.float64).reshape(-1, 2)).view(np.complex128).ravel()

    def step(self, c, dt, c1, c2, c0) -> np.ndarray:
        if c1 == 0.0 and c2 == 0.0 and c0 == 0.0:
            # field off (or underflowed): the potential factor is exactly the identity
            return c * self.kinetic(dt)
        phase = self.potential_phase(dt, c1, c2, c0)
        c = self._apply_potential(c, phase)
        c *= self.kinetic(dt)
        return self._apply_potential(c, phase)


@lru_cache(maxsize=8)
def _stepper_for(plan: PropagationPlan) -> _SplitStepper:
    return _SplitStepper(plan)


def strang_step(state: SpectralState, t: float, dt: float, plan: PropagationPlan) -> SpectralState:
    """Advance ``state`` from t to t + dt (dt may be negative) with V frozen at t + dt/2."""
    if state.basis != plan.basis:
        raise BasisError("state basis does not match the plan's grid")
    c1, c2, c0 = (float(v) for v in effective_couplings(t + 0.5 * dt, plan.field))
    c = _stepper_for(plan).step(np.array(state.coefficients), dt, c1, c2, c0)
    return SpectralState(c, state.basis)


class _Recorder:
    def __init__(self, n_records: int, plan: PropagationPlan):
        basis = plan.basis
        self.cos = cos_theta_matrix(basis)
        self.cos2 = cos2_theta_matrix(basis)
        self.field = plan.field
        self.t = np.empty(n_records)
        self.alignment = np.empty(n_records)
        self.orientation = np.empty(n_records)
        self.norm = np.empty(n_records)
        self.pops = np.empty((n_records, basis.dim)) if plan.record_populations else None
        self.j_values = basis.j_values if plan.record_populations else None
        self.edge = 0.0
        self.n_edge = min(2, basis.dim)
        self.i = 0

    def __call__(self, t: float, c: np.ndarray):
        i = self.i
        p = (c.conj() * c).real
        self.t[i] = t
        self.alignment[i] = self.cos2.expectation(c)
        self.orientation[i] = self.cos.expectation(c)
        self.norm[i] = math.sqrt(p.sum())
        self.edge = max(self.edge, float(p[-self.n_edge:].sum()))
        if self.pops is not None:
            self.pops[i] = p
        self.i += 1

    def finish(self) -> TimeSeries:
        drift = float(np.max(np.abs(self.norm - self.norm[0])))
        return TimeSeries(
            t=self.t,
            alignment=self.alignment,
            orientation=self.orientation,
            norm=self.norm,
            field=np.asarray(field_record(self.t, self.field), dtype=float),
            populations=self.pops,
            j_values=self.j_values,
            norm_drift=drift,
            max_edge_population=self.edge,
            converged=drift <= NORM_DRIFT_LIMIT and self.edge < EDGE_POPULATION_LIMIT,
        )


def propagate(state: SpectralState, plan: PropagationPlan) -> TimeSeries:
    """Integrate from plan.t_start to plan.t_end, recording every ``record_every`` steps.

    The result carries ``converged = False`` when the norm drifts by more than
    NORM_DRIFT_LIMIT or the two highest retained levels ever hold more than
    EDGE_POPULATION_LIMIT of the population.
    """
    if state.basis != plan.basis:
        raise BasisError("state basis does not match the plan's grid")
    stepper = _SplitStepper(plan)
    starts, lengths = step_schedule(plan)
    c1, c2, c0 = (
        np.broadcast_to(np.asarray(v, dtype=float), starts.shape)
        for v in effective_couplings(starts + 0.5 * lengths, plan.field)
    )
    rec_at = record_steps(len(starts), plan.record_every)
    recorder = _Recorder(len(rec_at), plan)

    c = np.array(state.coefficients)
    recorder(plan.t_start, c)
    next_rec = 1
    for k in range(len(starts)):
        c = stepper.step(c, lengths[k], c1[k], c2[k], c0[k])
        if k + 1 == rec_at[next_rec]:
            t = plan.t_end if k + 1 == len(starts) else plan.t_start + (k + 1) * plan.dt
            recorder(t, c)
            next_rec += 1
    return recorder.finish()


def refine_dt(state: SpectralState, plan: PropagationPlan, tol: float = 1e-7, max_halvings: int = 8):
    """Halve dt until the Richardson estimate of the final <cos^2> error drops below ``tol``.

    Each halving doubles ``record_every`` so every run records at the same times.
    Returns ``(series, dt, error_estimate)`` for the finest run performed; the series is
    marked non-converged if the tolerance was never met.
    """
    coarse = propagate(state, plan)
    current = plan
    estimate = math.inf
    for _ in range(max_halvings):
        current = PropagationPlan(
            current.t_start,
            current.t_end,
            current.dt / 2,
            current.record_every * 2,
            current.field,
            current.grid,
            current.record_populations,
        )
        fine = propagate(state, current)
        # Strang is second order: error(dt/2) ~ |A(dt) - A(dt/2)| / (2^2 - 1)
        estimate = abs(coarse.alignment[-1] - fine.alignment[-1]) / 3.0
        coarse = fine
        if estimate < tol:
            return fine, current.dt, estimate
    coarse.converged = False
    return coarse, current.dt, estimate
