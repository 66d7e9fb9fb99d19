"""Command-line entry point: ``rotalign <command> [options]``.

Every configuration key is also a flag (``tau_fwhm`` -> ``--tau-fwhm``; physical block
keys take a ``--physical-`` prefix).  Flags override values from ``--config``.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import yaml

from . import __version__
from .config import AXIS_KEYS, ConfigError, PhysicalConfig, ResolvedConfig, SimulationConfig, build_config, load_yaml
from .oracle import oracle_propagate
from .output import (
    RunManifest,
    emit_plot_script,
    write_manifest,
    write_summary_csv,
    write_comparison_csv,
    write_timeseries_csv,
)
from .propagator import initial_eigenstate, propagate
from .sweep import FIGURES, run_single, run_sweep

log = logging.getLogger("rotalign")


def _scalar(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if text.lower() in ("null", "none"):
        return None
    return text


def _add_config_flags(parser: argparse.ArgumentParser, axes: bool = True):
    group = parser.add_argument_group("configuration keys (override --config)")
    for name, info in SimulationConfig.model_fields.items():
        if name == "physical" or (not axes and name in AXIS_KEYS):
            continue
        flag = "--" + name.replace("_", "-")
        if info.annotation is bool:
            group.add_argument(flag, dest=name, action=argparse.BooleanOptionalAction, default=None)
        elif name in AXIS_KEYS:
            group.add_argument(flag, dest=name, nargs="+", type=_scalar, default=None, metavar="X")
        else:
            group.add_argument(flag, dest=name, type=_scalar, default=None, metavar="X")
    if axes:
        for name in PhysicalConfig.model_fields:
            group.add_argument(
                "--physical-" + name.replace("_", "-"), dest="physical." + name, type=_scalar, default=None, metavar="X"
            )


def _load(args, overrides: dict | None = None) -> ResolvedConfig:
    data = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigError(f"cannot read config {args.config}: {err.strerror}") from None
        data = load_yaml(text)
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a mapping of keys to values")
    for key, value in vars(args).items():
        if value is None:
            continue
        if key.startswith("physical."):
            block = data.get("physical") or {}
            block[key.split(".", 1)[1]] = value
            data["physical"] = block
        elif key in SimulationConfig.model_fields:
            data[key] = value
    if overrides:
        clash = [k for k in overrides if k in data]
        if clash:
            raise ConfigError(f"this command fixes {', '.join(clash)}; remove them from the config")
        data.update(overrides)
    return build_config(data)


def _finish(out: Path, resolved: ResolvedConfig, outputs: list, argv):
    with open(out / "config.resolved.yaml", "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(resolved.resolved, fh, sort_keys=True)
    outputs = [*outputs, "config.resolved.yaml", "manifest.json"]
    manifest = RunManifest(
        config_hash=resolved.config_hash,
        output_paths=outputs,
        command="rotalign " + " ".join(argv),
        resolved_config=resolved.resolved,
    )
    write_manifest(manifest, out / "manifest.json")


def _print_summary(index: int, s):
    p = ", ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in s.params)
    tail = "n/a" if s.post_pulse_mean is None else f"{s.post_pulse_mean:.4f} +/- {s.post_pulse_amplitude / 2:.4f}"
    flag = "" if s.converged else "  [NOT CONVERGED]"
    print(f"[{index:03d}] {p}: peak {s.peak_alignment:.4f} at t={s.t_peak:.4g}, post-pulse {tail}{flag}")


def _write_sweep(out: Path, resolved: ResolvedConfig, results, argv):
    runs = resolved.runs()
    names = [f"runs/run_{i:03d}.csv" for i in range(len(runs))]
    for name, (series, _) in zip(names, results):
        write_timeseries_csv(series, out / name)
    write_summary_csv(((i, n, s) for i, (n, (_, s)) in enumerate(zip(names, results))), out / "summary.csv")
    emit_plot_script(zip(runs, names), out / "plot.gp")
    _finish(out, resolved, [*names, "summary.csv", "plot.gp"], argv)
    for i, (_, s) in enumerate(results):
        _print_summary(i, s)


def cmd_simulate(args, argv):
    resolved = _load(args)
    run = resolved.single_run()
    series, summary = run_single(run)
    out = Path(args.out)
    write_timeseries_csv(series, out / "timeseries.csv")
    write_summary_csv([(0, "timeseries.csv", summary)], out / "summary.csv")
    emit_plot_script([(run, "timeseries.csv")], out / "plot.gp")
    _finish(out, resolved, ["timeseries.csv", "summary.csv", "plot.gp"], argv)
    _print_summary(0, summary)
    return 0


def cmd_sweep(args, argv, overrides=None):
    resolved = _load(args, overrides)
    t0 = time.perf_counter()
    results = run_sweep(resolved.sweep, workers=args.workers)
    log.info("%d runs in %.1f s", len(results), time.perf_counter() - t0)
    _write_sweep(Path(args.out), resolved, results, argv)
    return 0


def cmd_figure(number: int):
    def handler(args, argv):
        fig = FIGURES[number]
        overrides = {
            "mode": fig["color_mode"].value,
            "delta_omega": list(fig["delta_omegas"]),
            "tau_fwhm": list(fig["tau_fwhms"]),
            "amplitude_ratio": list(fig.get("amplitude_ratios", (1.0,))),
            "delay_ratio": list(fig.get("delay_ratios", (1.0,))),
        }
        return cmd_sweep(args, argv, overrides)

    return handler


def cmd_compare_oracle(args, argv):
    resolved = _load(args)
    run = resolved.single_run()
    plan = run.plan()
    state = initial_eigenstate(run.settings.j0, run.settings.m, plan.basis)
    split = propagate(state, plan)
    ref = oracle_propagate(state, plan)
    out = Path(args.out)
    diff = write_comparison_csv(split, ref, out / "compare_oracle.csv")
    _finish(out, resolved, ["compare_oracle.csv"], argv)
    worst = float(diff.max())
    status = "PASS" if worst <= args.tol else "FAIL"
    print(f"max |split - oracle| <cos^2 theta> = {worst:.3e} (tol {args.tol:.1e}) {status}")
    print(f"norm drift: split {split.norm_drift:.2e}, oracle {ref.norm_drift:.2e}")
    return 0 if worst <= args.tol else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotalign", description="Rigid-rotor alignment by one- and two-color laser pulses.", allow_abbrev=False
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, name, axes=True, workers=True):
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--out", default=f"out/{name}", help="output directory (default: %(default)s)")
        if workers:
            p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        _add_config_flags(p, axes=axes)

    p = sub.add_parser("simulate", help="single run", allow_abbrev=False)
    common(p, "simulate", workers=False)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("sweep", help="cartesian sweep over the listed axis values", allow_abbrev=False)
    common(p, "sweep")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("compare-oracle", help="split-operator vs fine-step RK4 on one run", allow_abbrev=False)
    common(p, "compare-oracle", workers=False)
    p.add_argument("--tol", type=float, default=1e-6, help="pass threshold on max |delta <cos^2>|")
    p.set_defaults(handler=cmd_compare_oracle)

    for n in sorted(FIGURES):
        p = sub.add_parser(f"fig{n}", help=f"canned sweep of figure {n}", allow_abbrev=False)
        common(p, f"fig{n}", axes=False)
        p.set_defaults(handler=cmd_figure(n))
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.handler(args, argv)
    except ConfigError as err:
        print(f"rotalign: configuration error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"rotalign: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
