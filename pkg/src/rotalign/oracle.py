"""Reference integrator for checking the split-operator propagator.

Solves i dc/dt = H(t) c directly in the spectral basis with the banded Hamiltonian

    H(t) = diag(J(J+1)) + c1(t) cos + c2(t) cos^2 + c0(t)

using classic fourth-order Runge-Kutta at one hundredth of the plan step.  It shares
nothing with the propagator beyond the field coefficients and the closed-form matrix
elements, and it is only meant for test-sized bases.
"""

from __future__ import annotations

import numba
import numpy as np

from .basis import BasisError, SpectralState, cos2_theta_matrix, cos_theta_matrix
from .field import effective_couplings
from .propagator import PropagationPlan, TimeSeries, _Recorder, record_steps, step_schedule

__all__ = ["MAX_ORACLE_DIM", "SUBSTEPS", "oracle_propagate"]

MAX_ORACLE_DIM = 256
SUBSTEPS = 100


@numba.njit(cache=True)
def _apply_h(c, out, energies, a1, b0, b2, s1, s2, s0):
    dim = c.shape[0]
    for i in range(dim):
        acc = (energies[i] + s2 * b0[i] + s0) * c[i]
        if i >= 1:
            acc += s1 * a1[i - 1] * c[i - 1]
        if i + 1 < dim:
            acc += s1 * a1[i] * c[i + 1]
        if i >= 2:
            acc += s2 * b2[i - 2] * c[i - 2]
        if i + 2 < dim:
            acc += s2 * b2[i] * c[i + 2]
        out[i] = -1j * acc


@numba.njit(cache=True)
def _rk4_chunk(c, energies, a1, b0, b2, c1, c2, c0, h):
    """RK4 over len(h) substeps; coefficient arrays are sampled at start, middle and end
    of each substep (index 2i, 2i+1, 2i+2)."""
    dim = c.shape[0]
    k1 = np.empty(dim, np.complex128)
    k2 = np.empty(dim, np.complex128)
    k3 = np.empty(dim, np.complex128)
    k4 = np.empty(dim, np.complex128)
    for s in range(h.shape[0]):
        hs = h[s]
        i0, im, i1 = 2 * s, 2 * s + 1, 2 * s + 2
        _apply_h(c, k1, energies, a1, b0, b2, c1[i0], c2[i0], c0[i0])
        _apply_h(c + 0.5 * hs * k1, k2, energies, a1, b0, b2, c1[im], c2[im], c0[im])
        _apply_h(c + 0.5 * hs * k2, k3, energies, a1, b0, b2, c1[im], c2[im], c0[im])
        _apply_h(c + hs * k3, k4, energies, a1, b0, b2, c1[i1], c2[i1], c0[i1])
        c = c + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return c


def oracle_propagate(state: SpectralState, plan: PropagationPlan) -> TimeSeries:
    """Fine-step RK4 solution recorded at exactly the times :func:`propagate` records."""
    basis = plan.basis
    if state.basis != basis:
        raise BasisError("state basis does not match the plan's grid")
    if basis.dim > MAX_ORACLE_DIM:
        raise ValueError(f"oracle limited to dim <= {MAX_ORACLE_DIM}, basis has {basis.dim}")
    j = basis.j_values.astype(float)
    energies = j * (j + 1)
    a1 = np.ascontiguousarray(cos_theta_matrix(basis).diagonals[1])
    b0 = np.ascontiguousarray(cos2_theta_matrix(basis).diagonals[0])
    b2 = np.ascontiguousarray(cos2_theta_matrix(basis).diagonals[2])

    starts, lengths = step_schedule(plan)
    rec_at = record_steps(len(starts), plan.record_every)
    recorder = _Recorder(len(rec_at), plan)
    frac = np.arange(2 * SUBSTEPS + 1) / (2 * SUBSTEPS)

    c = np.array(state.coefficients)
    recorder(plan.t_start, c)
    for lo, hi in zip(rec_at[:-1], rec_at[1:]):
        # samples of each plan step share their endpoints with the next one
        t = np.concatenate(
            [starts[k] + lengths[k] * (frac if k == lo else frac[1:]) for k in range(lo, hi)]
        )
        h = np.repeat(lengths[lo:hi] / SUBSTEPS, SUBSTEPS)
        s1, s2, s0 = (np.broadcast_to(np.asarray(v, float), t.shape).copy() for v in effective_couplings(t, plan.field))
        c = _rk4_chunk(c, energies, a1, b0, b2, s1, s2, s0, h)
        t_rec = plan.t_end if hi == len(starts) else plan.t_start + hi * plan.dt
        recorder(t_rec, c)
    return recorder.finish()
