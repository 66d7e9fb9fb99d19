"""Acceptance gate: one PASS/FAIL line per criterion, repeated in the terminal summary.

Run with ``pytest tests/test_acceptance.py -s`` to see each line as it is produced.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, reference_legendre
from rotalign.basis import SpectralState, build_basis, build_quadrature, cos2_theta_matrix, cos_theta_matrix
from rotalign.field import CouplingSet, FieldConfig, PulseSpec
from rotalign.oracle import oracle_propagate
from rotalign.output import write_summary_csv, write_timeseries_csv
from rotalign.propagator import PropagationPlan, initial_eigenstate, propagate
from rotalign.sweep import RunSettings, SweepSpec, expand_sweep, figure_sweep, run_single, run_sweep

pytestmark = pytest.mark.slow


def report(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)
    return ok


def write_outputs(results, directory):
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    for i, (series, _) in enumerate(results):
        names.append(f"run_{i:03d}.csv")
        write_timeseries_csv(series, directory / names[-1])
    write_summary_csv(((i, n, s) for i, (n, (_, s)) in enumerate(zip(names, results))), directory / "summary.csv")
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


@pytest.fixture(scope="module")
def fig1():
    t0 = time.perf_counter()
    results = run_sweep(figure_sweep(1), workers=1)
    return results, time.perf_counter() - t0


def post_pulse(series, cutoff=1e-6):
    """Records after the field last exceeds ``cutoff`` of its peak."""
    magnitude = np.abs(series.field)
    start = int(np.nonzero(magnitude >= cutoff * magnitude.max())[0][-1]) + 1
    return series.alignment[start:]


def single_plan(dw, tau, j_max, dt=1e-4, record_every=10, **kw):
    run = expand_sweep(SweepSpec((dw,), (tau,), settings=RunSettings(j_max=j_max, dt=dt, record_every=record_every, **kw)))[0]
    return run.plan()


def test_1_unitarity(fig1):
    results, elapsed = fig1
    drifts = [s.norm_drift for _, s in results]
    ok = len(results) == 9 and max(drifts) <= 1e-10 and elapsed < 300
    assert report(1, ok, f"fig1 9 runs, max norm drift {max(drifts):.2e} (<= 1e-10), {elapsed:.0f} s (< 300 s)")


def test_2_oracle_equivalence():
    plan = single_plan(100.0, 0.05, 32)
    state = initial_eigenstate(0, 0, plan.basis)
    t0 = time.perf_counter()
    split = propagate(state, plan)
    ref = oracle_propagate(state, plan)
    elapsed = time.perf_counter() - t0
    worst = float(np.max(np.abs(split.alignment - ref.alignment)))
    ok = np.array_equal(split.t, ref.t) and worst <= 1e-6 and elapsed < 120
    detail = f"t in [0, {plan.t_end:.3f}], {len(split)} records, max |split - oracle| {worst:.2e} (<= 1e-6), {elapsed:.0f} s"
    assert report(2, ok, detail)


def test_3_free_rotor_analytics(dense_rule):
    x, w = dense_rule
    basis = build_basis(16, 0)
    grid = build_quadrature(33, basis)
    free = FieldConfig((PulseSpec(1.0, 0.05, 0.2),), CouplingSet(0.0))
    worst_const = 0.0
    for j in (0, 1):
        oracle = float(np.sum(w * x**2 * reference_legendre(j, 0, x) ** 2))
        plan = PropagationPlan(0.0, math.pi, 1e-3, 50, free, grid)
        series = propagate(initial_eigenstate(j, 0, basis), plan)
        worst_const = max(worst_const, float(np.max(np.abs(series.alignment - oracle))))
    rng = np.random.default_rng(2024)
    c = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    plan = PropagationPlan(0.0, 2 * math.pi, math.pi / 1000, 1, free, grid)
    series = propagate(SpectralState(c / np.linalg.norm(c), basis), plan)
    revival = float(np.max(np.abs(series.alignment[1000:] - series.alignment[:-1000])))
    ok = worst_const <= 1e-12 and revival <= 1e-10
    detail = f"Y00/Y10 max |<cos^2> - quadrature value| {worst_const:.1e} (<= 1e-12), revival error {revival:.1e} (<= 1e-10)"
    assert report(3, ok, detail)


def test_4_convergence_order():
    # smooth field: tau = 0.5, errors on the records shared by both step sizes
    coarse_plan = single_plan(100.0, 0.5, 32, dt=2e-3, record_every=50, t_end=5.0)
    fine_plan = single_plan(100.0, 0.5, 32, dt=1e-3, record_every=100, t_end=5.0)
    state = initial_eigenstate(0, 0, coarse_plan.basis)
    ref = oracle_propagate(state, single_plan(100.0, 0.5, 32, dt=1e-3, record_every=100, t_end=5.0))
    errors = []
    for plan in (coarse_plan, fine_plan):
        series = propagate(state, plan)
        assert np.allclose(series.t, ref.t, atol=1e-12, rtol=0)
        errors.append(float(np.max(np.abs(series.alignment - ref.alignment))))
    ratio = errors[0] / errors[1]
    ok = 3.5 <= ratio <= 4.5
    detail = f"error dt=2e-3 {errors[0]:.3e}, dt=1e-3 {errors[1]:.3e}, ratio {ratio:.3f} (in [3.5, 4.5])"
    assert report(4, ok, detail)


def test_5_fig1_qualitative(fig1):
    results, _ = fig1
    by = {(s.params[1][1], s.params[2][1]): (series, s) for series, s in results}
    short = [by[(dw, 0.05)][1] for dw in (100.0, 400.0, 900.0)]
    amplitudes = [s.post_pulse_amplitude for s in short]
    during = [s.peak_during_pulse for s in short]
    whole = [s.peak_alignment for s in short]
    adiabatic = []
    for dw in (100.0, 400.0, 900.0):
        adiabatic.append(float(np.max(np.abs(post_pulse(by[(dw, 5.0)][0]) - 1 / 3))))
    ok_a = min(amplitudes) > 0.1 and during[2] > during[1] > during[0]
    ok_c = max(adiabatic) < 0.05
    report(
        "5a",
        ok_a,
        "tau=0.05 post-pulse amplitude "
        + "/".join(f"{a:.3f}" for a in amplitudes)
        + " (> 0.1); peak during pulse dw=100/400/900 "
        + "/".join(f"{p:.4f}" for p in during)
        + " (increasing); whole-window peak "
        + "/".join(f"{p:.4f}" for p in whole)
        + " (informational)",
    )
    report("5c", ok_c, "tau=5 max post-pulse |<cos^2> - 1/3| " + "/".join(f"{a:.4f}" for a in adiabatic) + " (< 0.05)")
    assert ok_a and ok_c


def local_maxima(a):
    return int(np.sum((a[1:-1] > a[:-2]) & (a[1:-1] > a[2:])))


def distinct(summaries):
    keys = [(round(s.peak_alignment, 9), round(s.post_pulse_mean, 9), round(s.post_pulse_amplitude, 9)) for s in summaries]
    return len(set(keys)) == len(keys)


def test_6_two_color_figures(tmp_path, fig1):
    lines, ok = [], True
    fig2 = run_sweep(figure_sweep(2), workers=1)
    one = {(s.params[1][1], s.params[2][1]): (series, s) for series, s in fig1[0]}
    two = {(s.params[1][1], s.params[2][1]): (series, s) for series, s in fig2}
    changes = []
    for dw in (100.0, 400.0, 900.0):
        (sa, a), (sb, b) = one[(dw, 0.05)], two[(dw, 0.05)]
        tail_a, tail_b = post_pulse(sa), post_pulse(sb)
        changed = abs(a.post_pulse_amplitude - b.post_pulse_amplitude) > 1e-3 or abs(a.post_pulse_mean - b.post_pulse_mean) > 1e-3
        ok &= changed
        changes.append(
            f"dw={dw:g}: amplitude {a.post_pulse_amplitude:.3f}->{b.post_pulse_amplitude:.3f}, "
            f"maxima {local_maxima(tail_a)}->{local_maxima(tail_b)}"
        )
    lines.append("fig2 vs fig1 at tau=0.05: " + "; ".join(changes))
    ok &= distinct([s for _, s in fig2]) and all(s.converged for _, s in fig2)
    for number in (3, 4):
        first = run_sweep(figure_sweep(number), workers=1)
        second = run_sweep(figure_sweep(number), workers=2)
        same = write_outputs(first, tmp_path / f"f{number}a") == write_outputs(second, tmp_path / f"f{number}b")
        summaries = [s for _, s in first]
        panels_distinct = distinct(summaries)
        ok &= same and panels_distinct and all(s.converged for s in summaries)
        lines.append(f"fig{number}: {len(first)} runs, deterministic={same}, distinct summaries={panels_distinct}")
    assert report(6, ok, " | ".join(lines))


def test_7_invariance(tmp_path, fig1):
    plans = [single_plan(100.0, 0.05, 32, delta_omega_perp=perp) for perp in (0.0, 10.0)]
    a, b = (propagate(initial_eigenstate(0, 0, p.basis), p) for p in plans)
    perp = max(float(np.max(np.abs(a.alignment - b.alignment))), float(np.max(np.abs(a.orientation - b.orientation))))
    orientation = max(float(np.max(np.abs(series.orientation))) for series, _ in fig1[0])
    many = run_sweep(figure_sweep(1), workers=8)
    same = write_outputs(fig1[0], tmp_path / "w1") == write_outputs(many, tmp_path / "w8")
    ok = perp <= 1e-12 and orientation < 1e-10 and same
    detail = f"dw_perp 0 vs 10 max deviation {perp:.1e} (<= 1e-12), fig1 max |<cos>| {orientation:.1e} (< 1e-10), fig1 CSVs 1 vs 8 workers identical={same}"
    assert report(7, ok, detail)


def test_8_matrix_elements(dense_rule):
    x, w = dense_rule
    worst, count = 0.0, 0
    for j_max in range(0, 17):
        for m in range(-min(j_max, 4), min(j_max, 4) + 1):
            basis = build_basis(j_max, m)
            rows = np.array([reference_legendre(j, m, x) for j in basis.j_values])
            for p, op in ((1, cos_theta_matrix(basis)), (2, cos2_theta_matrix(basis))):
                ref = (rows * w * x**p) @ rows.T
                worst = max(worst, float(np.max(np.abs(op.to_dense() - ref))))
                count += ref.size
    assert report(8, worst <= 1e-12, f"{count} elements, j_max <= 16, |m| <= 4, max deviation {worst:.1e} (<= 1e-12)")
