"""CSV persistence, gnuplot script emission and run manifests.

Numbers are written in Python's shortest round-trip float form, rows end in ``\\n``
and files are UTF-8, so identical results always produce identical bytes.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .propagator import TimeSeries
from .sweep import ColorMode, RunConfig, RunSummary

__all__ = [
    "OutputError",
    "Panel",
    "PlotCurve",
    "RunManifest",
    "SUMMARY_COLUMNS",
    "TIMESERIES_COLUMNS",
    "emit_plot_script",
    "plot_layout",
    "read_timeseries_csv",
    "write_manifest",
    "write_comparison_csv",
    "write_summary_csv",
    "write_timeseries_csv",
]

TIMESERIES_COLUMNS = ("t", "alignment", "orientation", "norm", "field")
SUMMARY_COLUMNS = (
    "run",
    "file",
    "color_mode",
    "delta_omega",
    "tau_fwhm",
    "amplitude_ratio",
    "delay_ratio",
    "peak_alignment",
    "t_peak",
    "peak_during_pulse",
    "t_peak_during_pulse",
    "post_pulse_mean",
    "post_pulse_amplitude",
    "converged",
    "norm_drift",
    "max_edge_population",
    "dt",
)
# gnuplot dash types: solid, dashed, dot-dashed, then the remaining built-ins
DASH_TYPES = (1, 2, 4, 3, 5)


class OutputError(OSError):
    pass


def _num(v) -> str:
    return "" if v is None else repr(float(v))


def _write_text(path, text: str):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as err:
        raise OutputError(f"cannot write {path}: {err.strerror or err}") from err


def write_timeseries_csv(series: TimeSeries, path):
    """Header ``t,alignment,orientation,norm,field`` plus ``p<J>`` columns when populations
    were recorded."""
    if len(series) == 0:
        raise ValueError("refusing to write an empty time series")
    header = list(TIMESERIES_COLUMNS)
    columns = [series.t, series.alignment, series.orientation, series.norm, series.field]
    rows = np.column_stack(columns)
    if series.populations is not None:
        header += [f"p{j}" for j in series.j_values]
        rows = np.column_stack([rows, series.populations])
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows.tolist():
        buf.write(",".join(repr(v) for v in row) + "\n")
    _write_text(path, buf.getvalue())


def read_timeseries_csv(path) -> TimeSeries:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise OutputError(f"cannot read {path}: {err.strerror or err}") from err
    header, body = rows[0], np.array(rows[1:], dtype=float)
    if tuple(header[:5]) != TIMESERIES_COLUMNS:
        raise ValueError(f"{path}: unexpected header {header[:5]}")
    pops = body[:, 5:] if len(header) > 5 else None
    j_values = np.array([int(h[1:]) for h in header[5:]]) if pops is not None else None
    return TimeSeries(
        t=body[:, 0],
        alignment=body[:, 1],
        orientation=body[:, 2],
        norm=body[:, 3],
        field=body[:, 4],
        populations=pops,
        j_values=j_values,
    )


def write_comparison_csv(split: TimeSeries, reference: TimeSeries, path) -> np.ndarray:
    """Side-by-side alignment traces; returns the absolute differences."""
    diff = np.abs(split.alignment - reference.alignment)
    rows = zip(split.t.tolist(), split.alignment.tolist(), reference.alignment.tolist(), diff.tolist())
    lines = ["t,split,oracle,abs_diff"] + [",".join(repr(v) for v in row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")
    return diff


def write_summary_csv(entries, path):
    """One row per run; ``entries`` yields ``(run_index, file_name, RunSummary)``."""
    buf = io.StringIO()
    buf.write(",".join(SUMMARY_COLUMNS) + "\n")
    for index, name, s in entries:
        p = dict(s.params)
        row = [
            str(index),
            name,
            p.get("color_mode", ""),
            _num(p.get("delta_omega")),
            _num(p.get("tau_fwhm")),
            _num(p.get("amplitude_ratio")),
            _num(p.get("delay_ratio")),
            _num(s.peak_alignment),
            _num(s.t_peak),
            _num(s.peak_during_pulse),
            _num(s.t_peak_during_pulse),
            _num(s.post_pulse_mean),
            _num(s.post_pulse_amplitude),
            "true" if s.converged else "false",
            _num(s.norm_drift),
            _num(s.max_edge_population),
            _num(s.dt),
        ]
        buf.write(",".join(row) + "\n")
    _write_text(path, buf.getvalue())


@dataclass(frozen=True)
class PlotCurve:
    data_file: str
    label: str
    dash_type: int


@dataclass(frozen=True)
class Panel:
    title: str
    curves: tuple


def _g(x: float) -> str:
    return f"{x:g}"


def _ratio_label(r: float) -> str:
    if r == 1.0:
        return "F2=F1"
    if math.isclose(r, math.sqrt(2.0), rel_tol=1e-12):
        return "F2=sqrt(2)F1"
    return f"F2={_g(r)}F1"


def _delay_label(d: float) -> str:
    return "t2=t1" if d == 1.0 else f"t2={_g(d)}t1"


def plot_layout(runs) -> list:
    """Group ``(RunConfig, data_file)`` pairs into panels, one curve per delta_omega.

    Panels are keyed by everything except delta_omega; the title names whichever of
    pulse duration, amplitude ratio and delay actually differ between panels.
    """
    runs = list(runs)
    keys, groups = [], {}
    for run, data_file in runs:
        key = (run.color_mode, run.tau_fwhm)
        if run.color_mode is ColorMode.TWO_COLOR:
            key += (run.amplitude_ratio, run.delay_ratio)
        if key not in groups:
            keys.append(key)
            groups[key] = []
        groups[key].append((run, data_file))

    varying = [len({k[i] for k in keys if len(k) > i}) > 1 for i in range(4)]
    dash_of = {}
    for run, _ in runs:
        dash_of.setdefault(run.delta_omega, DASH_TYPES[len(dash_of) % len(DASH_TYPES)])

    panels = []
    for key in keys:
        parts = []
        if varying[0]:
            parts.append(key[0].value)
        if varying[1] or not any(varying):
            parts.append(f"tau_FWHM={_g(key[1])}")
        if len(key) > 2 and varying[2]:
            parts.append(_ratio_label(key[2]))
        if len(key) > 2 and varying[3]:
            parts.append(_delay_label(key[3]))
        curves = tuple(
            PlotCurve(str(f), f"dw={_g(r.delta_omega)}", dash_of[r.delta_omega]) for r, f in groups[key]
        )
        panels.append(Panel(", ".join(parts), curves))
    return panels


def emit_plot_script(runs, path) -> list:
    """Write a gnuplot script drawing t vs <cos^2 theta> from the run CSVs.

    Data paths are written as given, so pass them relative to the script's directory.
    Returns the panel layout.
    """
    panels = plot_layout(runs)
    lines = [
        "# gnuplot script: alignment cosine <cos^2 theta> vs dimensionless time",
        "# line style by delta_omega: solid, dashed, dot-dashed",
        "set datafile separator ','",
        "set terminal pngcairo size %d,400" % (420 * len(panels)),
        "set output 'alignment.png'",
        "set multiplot layout 1,%d" % len(panels),
        "set xlabel 't'",
        "set ylabel '<cos^2(theta)>'",
        "set yrange [0:1]",
    ]
    for panel in panels:
        lines.append(f"set title '{panel.title}'")
        plots = [
            f"'{c.data_file}' using 1:2 skip 1 with lines dashtype {c.dash_type} lc rgb 'black' title '{c.label}'"
            for c in panel.curves
        ]
        lines.append("plot " + ", \\\n     ".join(plots))
    lines.append("unset multiplot")
    _write_text(path, "\n".join(lines) + "\n")
    return panels


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    output_paths: list = field(default_factory=list)
    command: str = ""
    resolved_config: dict = field(default_factory=dict)


def write_manifest(manifest: RunManifest, path):
    _write_text(path, json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n")
