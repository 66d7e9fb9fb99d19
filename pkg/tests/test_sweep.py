import math

import numpy as np
import pytest

from rotalign.field import InteractionMode
from rotalign.propagator import TimeSeries
from rotalign.sweep import (
    ColorMode,
    RunSettings,
    SweepSpec,
    expand_sweep,
    figure_sweep,
    run_single,
    run_sweep,
    summarize,
)

SMALL = RunSettings(j_max=24, dt=5e-4, record_every=4, post_window=0.5)


def series_of(alignment, field):
    alignment = np.asarray(alignment, dtype=float)
    n = len(alignment)
    return TimeSeries(
        t=np.arange(n, dtype=float),
        alignment=alignment,
        orientation=np.zeros(n),
        norm=np.ones(n),
        field=np.asarray(field, dtype=float),
    )


def test_expand_sweep_counts():
    assert len(expand_sweep(figure_sweep(1))) == 9
    assert len(expand_sweep(figure_sweep(3))) == 6
    assert len(expand_sweep(figure_sweep(4))) == 9
    assert len(expand_sweep(SweepSpec((100.0,), (0.05,)))) == 1


def test_expand_sweep_order_and_one_color_axes():
    spec = SweepSpec((100.0, 400.0), (0.05, 0.5), amplitude_ratios=(1.0, 2.0), delay_ratios=(1.0, 1.5))
    runs = expand_sweep(spec)
    assert len(runs) == 4
    assert [(r.delta_omega, r.tau_fwhm) for r in runs] == [(100, 0.05), (100, 0.5), (400, 0.05), (400, 0.5)]
    two = expand_sweep(SweepSpec((100.0,), (0.05,), (1.0, 2.0), (1.0, 1.5), ColorMode.TWO_COLOR))
    assert [(r.amplitude_ratio, r.delay_ratio) for r in two] == [(1, 1), (1, 1.5), (2, 1), (2, 1.5)]


def test_empty_axis_rejected():
    with pytest.raises(ValueError):
        SweepSpec((), (0.05,))


def test_run_config_geometry():
    run = expand_sweep(SweepSpec((100.0,), (0.5,), (math.sqrt(2),), (1.5,), ColorMode.TWO_COLOR))[0]
    first, second = run.pulses()
    assert first.center == 2.0 and second.center == 3.0 and second.carrier_delay == 3.0
    assert second.relative_amplitude == math.sqrt(2) and second.carrier_multiple == 2
    assert run.t_end() == pytest.approx(3.0 + 2.0 + math.pi)


def test_summarize_constant_series():
    s = summarize(series_of([0.6] * 5, [0.0] * 5))
    assert s.peak_alignment == s.post_pulse_mean == 0.6
    assert s.post_pulse_amplitude == 0.0
    assert s.peak_during_pulse is None


def test_summarize_tail_and_absent_marker():
    s = summarize(series_of([0.3, 0.5, 0.9, 0.4, 0.6], [0.0, 1.0, 0.5, 0.0, 0.0]))
    assert s.peak_alignment == 0.9 and s.t_peak == 2.0
    assert s.post_pulse_mean == pytest.approx(0.5) and s.post_pulse_amplitude == pytest.approx(0.2)
    assert s.peak_during_pulse == 0.9
    on = summarize(series_of([0.3, 0.5], [1.0, 1.0]))
    assert on.post_pulse_mean is None and on.post_pulse_amplitude is None
    with pytest.raises(ValueError):
        summarize(series_of([], []))


def test_summary_invariant_on_real_run():
    _, s = run_single(expand_sweep(SweepSpec((400.0,), (0.05,), settings=SMALL))[0])
    assert s.converged
    assert s.peak_alignment >= s.post_pulse_mean - s.post_pulse_amplitude
    assert s.post_pulse_amplitude > 0.1


def test_impulsive_and_adiabatic_regimes():
    _, kick = run_single(expand_sweep(SweepSpec((100.0,), (0.05,), settings=SMALL))[0])
    assert kick.post_pulse_amplitude > 0.1
    slow = RunSettings(j_max=24, dt=1e-3, record_every=10, post_window=0.5)
    _, adiabatic = run_single(expand_sweep(SweepSpec((100.0,), (2.0,), settings=slow))[0])
    assert abs(adiabatic.post_pulse_mean - 1 / 3) < 0.05


def test_workers_do_not_change_results():
    spec = SweepSpec((100.0, 400.0, 900.0), (0.05,), settings=RunSettings(j_max=32, dt=1e-3, post_window=0.3))
    one = run_sweep(spec, workers=1)
    two = run_sweep(spec, workers=2)
    assert len(one) == len(two) == 3
    for (sa, ma), (sb, mb) in zip(one, two):
        assert np.array_equal(sa.alignment, sb.alignment)
        assert ma == mb


def test_edge_guard_flags_small_basis():
    spec = SweepSpec((900.0,), (0.05,), settings=RunSettings(j_max=8, dt=1e-3, post_window=0.2))
    _, s = run_single(expand_sweep(spec)[0])
    assert not s.converged and s.max_edge_population > 1e-8


def test_check_basis_and_auto_dt():
    settings = RunSettings(j_max=24, dt=2e-3, record_every=5, post_window=0.2, auto_dt=True, check_basis=True)
    _, s = run_single(expand_sweep(SweepSpec((100.0,), (0.05,), settings=settings))[0])
    assert s.converged and s.dt < 2e-3


def test_figure_sweep_lookup():
    assert figure_sweep(3).amplitude_ratios == (1.0, math.sqrt(2))
    assert figure_sweep(2).settings.interaction is InteractionMode.CYCLE_AVERAGED
    with pytest.raises(ValueError):
        figure_sweep(5)
    with pytest.raises(ValueError):
        run_sweep(figure_sweep(1), workers=0)
