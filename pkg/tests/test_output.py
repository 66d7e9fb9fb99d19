import json
import math

import numpy as np
import pytest

from rotalign.basis import build_basis, build_quadrature
from rotalign.field import CouplingSet, FieldConfig, PulseSpec
from rotalign.output import (
    OutputError,
    RunManifest,
    emit_plot_script,
    plot_layout,
    read_timeseries_csv,
    write_comparison_csv,
    write_manifest,
    write_summary_csv,
    write_timeseries_csv,
)
from rotalign.propagator import PropagationPlan, initial_eigenstate, propagate
from rotalign.sweep import RunSummary, expand_sweep, figure_sweep


def free_series(n_steps=2, populations=False):
    basis = build_basis(4, 0)
    field = FieldConfig((PulseSpec(1.0, 0.05, 0.2),), CouplingSet(0.0))
    plan = PropagationPlan(0.0, n_steps * 0.1, 0.1, 1, field, build_quadrature(9, basis), populations)
    return propagate(initial_eigenstate(0, 0, basis), plan)


def test_free_rotor_csv(tmp_path):
    path = tmp_path / "ts.csv"
    write_timeseries_csv(free_series(), path)
    lines = path.read_bytes().decode("utf-8").split("\n")
    assert lines[-1] == "" and len(lines) == 5
    assert lines[0] == "t,alignment,orientation,norm,field"
    assert all(row.split(",")[1] == "0.3333333333333333" for row in lines[1:4])
    assert b"\r" not in path.read_bytes()


def test_csv_round_trip_is_byte_identical(tmp_path):
    series = free_series(5, populations=True)
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_timeseries_csv(series, first)
    back = read_timeseries_csv(first)
    write_timeseries_csv(back, second)
    assert first.read_bytes() == second.read_bytes()
    assert np.array_equal(back.alignment, series.alignment)


def test_population_columns(tmp_path):
    path = tmp_path / "p.csv"
    write_timeseries_csv(free_series(populations=True), path)
    header = path.read_text().splitlines()[0].split(",")
    assert header[5:] == ["p0", "p1", "p2", "p3", "p4"]


def test_io_errors_name_the_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError, match="file"):
        write_timeseries_csv(free_series(), blocker / "ts.csv")
    with pytest.raises(OutputError, match="missing.csv"):
        read_timeseries_csv(tmp_path / "missing.csv")


def test_comparison_and_summary_csv(tmp_path):
    a = free_series()
    diff = write_comparison_csv(a, a, tmp_path / "c.csv")
    assert np.all(diff == 0)
    s = RunSummary((("color_mode", "one_color"), ("delta_omega", 100.0), ("tau_fwhm", 0.05)), 0.8, 1.0, None, None, False)
    write_summary_csv([(0, "runs/run_000.csv", s)], tmp_path / "s.csv")
    row = (tmp_path / "s.csv").read_text().splitlines()[1].split(",")
    assert row[:5] == ["0", "runs/run_000.csv", "one_color", "100.0", "0.05"]
    assert row[11] == row[12] == "" and row[13] == "false"


def runs_of(number):
    return [(r, f"runs/run_{i:03d}.csv") for i, r in enumerate(expand_sweep(figure_sweep(number)))]


def test_plot_layout_fig1():
    panels = plot_layout(runs_of(1))
    assert len(panels) == 3 and all(len(p.curves) == 3 for p in panels)
    assert [p.title for p in panels] == ["tau_FWHM=0.05", "tau_FWHM=0.5", "tau_FWHM=5"]
    assert [c.dash_type for c in panels[0].curves] == [1, 2, 4]


def test_plot_layout_single_run_and_fig3_fig4():
    single = plot_layout(runs_of(1)[:1])
    assert len(single) == 1 and len(single[0].curves) == 1
    assert [p.title for p in plot_layout(runs_of(3))] == ["F2=F1", "F2=sqrt(2)F1"]
    assert [p.title for p in plot_layout(runs_of(4))] == ["t2=t1", "t2=1.5t1", "t2=2t1"]


def test_plot_script(tmp_path):
    path = tmp_path / "plot.gp"
    emit_plot_script(runs_of(1), path)
    text = path.read_text()
    assert "set multiplot layout 1,3" in text
    assert text.count("runs/run_") == 9
    assert "dashtype 4" in text


def test_manifest(tmp_path):
    m = RunManifest(config_hash="abc", output_paths=["x.csv"], resolved_config={"dt": 1e-4})
    write_manifest(m, tmp_path / "manifest.json")
    data = json.loads((tmp_path / "manifest.json").read_text())
    assert data["config_hash"] == "abc" and data["output_paths"] == ["x.csv"]
    assert data["tool_version"] and data["timestamp"]
