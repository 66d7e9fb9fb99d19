"""Strict YAML configuration for single runs and sweeps.

Every key is optional except the interaction strength and pulse duration, which come
either as ``delta_omega`` / ``tau_fwhm`` or from a ``physical`` block, never both.
The sweep axes (``delta_omega``, ``tau_fwhm``, ``amplitude_ratio``, ``delay_ratio``)
take a number or a list of numbers.  Unknown keys are rejected.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass
from typing import Annotated, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .field import InteractionMode
from .sweep import ColorMode, RunConfig, RunSettings, SweepSpec, expand_sweep
from .units import PhysicalMolecule, to_dimensionless

__all__ = [
    "AXIS_KEYS",
    "ConfigError",
    "PhysicalConfig",
    "ResolvedConfig",
    "SimulationConfig",
    "build_config",
    "config_hash",
    "load_yaml",
    "parse_config",
]

AXIS_KEYS = ("delta_omega", "tau_fwhm", "amplitude_ratio", "delay_ratio")

NonNeg = Annotated[float, Field(ge=0)]
Positive = Annotated[float, Field(gt=0)]


class ConfigError(ValueError):
    """Configuration rejected; the message lists each offending key and constraint."""


class PhysicalConfig(BaseModel):
    """Laboratory-unit alternative to ``delta_omega`` / ``tau_fwhm`` (one pulse setting)."""

    model_config = ConfigDict(extra="forbid", strict=True)

    rotational_constant_cm: Positive
    dipole_debye: NonNeg = 0.0
    polarizability_parallel_a3: NonNeg = 0.0
    polarizability_perp_a3: NonNeg = 0.0
    peak_intensity_w_cm2: Positive
    tau_fwhm_s: Positive


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)

    mode: Literal["one_color", "two_color"] = "one_color"
    delta_omega: Optional[list[NonNeg]] = Field(default=None, min_length=1)
    tau_fwhm: Optional[list[Positive]] = Field(default=None, min_length=1)
    amplitude_ratio: list[NonNeg] = Field(default=[1.0], min_length=1)
    delay_ratio: list[Positive] = Field(default=[1.0], min_length=1)
    interaction: Literal["cycle_averaged", "full_carrier"] = "cycle_averaged"
    carrier_omega: Optional[Positive] = None
    delta_omega_mu: NonNeg = 0.0
    delta_omega_perp: NonNeg = 0.0
    j_max: Annotated[int, Field(ge=0)] = 64
    m: int = 0
    j0: Optional[int] = None
    n_nodes: Optional[Annotated[int, Field(ge=1)]] = None
    dt: Positive = 1e-4
    record_every: Annotated[int, Field(ge=1)] = 10
    t_start: float = 0.0
    t_end: Optional[float] = None
    center_factor: Positive = 4.0
    post_window: NonNeg = math.pi
    populations: bool = False
    field_cutoff: Positive = 1e-6
    auto_dt: bool = False
    check_basis: bool = False
    physical: Optional[PhysicalConfig] = None

    @model_validator(mode="before")
    @classmethod
    def _scalars_to_lists(cls, data):
        if isinstance(data, dict):
            data = dict(data)
            for key in AXIS_KEYS:
                value = data.get(key)
                if value is not None and not isinstance(value, list):
                    data[key] = [value]
        return data

    @model_validator(mode="after")
    def _cross_checks(self):
        if self.physical is not None:
            clash = [k for k in ("delta_omega", "tau_fwhm") if getattr(self, k) is not None]
            clash += [k for k in ("delta_omega_mu", "delta_omega_perp") if getattr(self, k) != 0]
            if clash:
                raise ValueError(f"physical block cannot be combined with {', '.join(clash)}")
        else:
            for key in ("delta_omega", "tau_fwhm"):
                if getattr(self, key) is None:
                    raise ValueError(f"missing required key {key} (or a physical block)")
        if self.j_max < abs(self.m):
            raise ValueError(f"j_max={self.j_max} must be >= |m|={abs(self.m)}")
        j0 = abs(self.m) if self.j0 is None else self.j0
        if not abs(self.m) <= j0 <= self.j_max:
            raise ValueError(f"j0={j0} must lie in |m|..j_max")
        if self.n_nodes is not None and self.n_nodes < self.j_max + 1:
            raise ValueError(f"n_nodes={self.n_nodes} must be >= j_max + 1 = {self.j_max + 1}")
        if self.interaction == "full_carrier" and self.carrier_omega is None:
            raise ValueError("full_carrier interaction requires carrier_omega")
        mu = self.delta_omega_mu
        if self.physical is not None:
            mu = self.physical.dipole_debye
        if self.interaction == "cycle_averaged" and mu > 0:
            raise ValueError("a permanent-dipole coupling requires interaction: full_carrier")
        if self.t_end is not None and self.t_end <= self.t_start:
            raise ValueError(f"t_end={self.t_end} must exceed t_start={self.t_start}")
        return self


@dataclass(frozen=True)
class ResolvedConfig:
    """Validated configuration: the sweep to run and the fully-defaulted key echo."""

    sweep: SweepSpec
    resolved: dict

    @property
    def config_hash(self) -> str:
        return config_hash(self.resolved)

    def runs(self) -> list:
        return expand_sweep(self.sweep)

    def single_run(self) -> RunConfig:
        runs = self.runs()
        if len(runs) != 1:
            raise ConfigError(f"configuration describes {len(runs)} runs; expected exactly one")
        return runs[0]


def config_hash(resolved: dict) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"])
        if e["type"] == "extra_forbidden":
            lines.append(f"unknown key {loc!r}")
        else:
            msg = e["msg"].removeprefix("Value error, ")
            lines.append(f"{loc}: {msg}" if loc else msg)
    return "; ".join(lines)


def build_config(data: dict) -> ResolvedConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping of keys to values")
    try:
        cfg = SimulationConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_format_errors(err)) from None

    delta_omegas, taus = cfg.delta_omega, cfg.tau_fwhm
    mu, perp = cfg.delta_omega_mu, cfg.delta_omega_perp
    if cfg.physical is not None:
        p = cfg.physical
        mol = PhysicalMolecule(
            p.rotational_constant_cm, p.dipole_debye, p.polarizability_parallel_a3, p.polarizability_perp_a3
        )
        couplings, tau = to_dimensionless(mol, p.peak_intensity_w_cm2, p.tau_fwhm_s)
        delta_omegas, taus = [couplings.delta_omega], [tau]
        mu, perp = couplings.delta_omega_mu, couplings.delta_omega_perp

    j0 = abs(cfg.m) if cfg.j0 is None else cfg.j0
    n_nodes = cfg.n_nodes if cfg.n_nodes is not None else 2 * cfg.j_max + 1
    try:
        settings = RunSettings(
            interaction=InteractionMode(cfg.interaction),
            carrier_omega=cfg.carrier_omega,
            delta_omega_mu=mu,
            delta_omega_perp=perp,
            j_max=cfg.j_max,
            m=cfg.m,
            j0=j0,
            n_nodes=n_nodes,
            dt=cfg.dt,
            record_every=cfg.record_every,
            t_start=cfg.t_start,
            t_end=cfg.t_end,
            center_factor=cfg.center_factor,
            post_window=cfg.post_window,
            record_populations=cfg.populations,
            field_cutoff=cfg.field_cutoff,
            auto_dt=cfg.auto_dt,
            check_basis=cfg.check_basis,
        )
        sweep = SweepSpec(
            delta_omegas=tuple(delta_omegas),
            tau_fwhms=tuple(taus),
            amplitude_ratios=tuple(cfg.amplitude_ratio),
            delay_ratios=tuple(cfg.delay_ratio),
            color_mode=ColorMode(cfg.mode),
            settings=settings,
        )
        for run in expand_sweep(sweep):
            run.field_config()
            if run.t_end() <= settings.t_start:
                raise ValueError(f"t_end={run.t_end()} must exceed t_start={settings.t_start}")
    except ValueError as err:
        raise ConfigError(str(err)) from None

    resolved = cfg.model_dump(mode="json")
    resolved.update(j0=j0, n_nodes=n_nodes)
    return ResolvedConfig(sweep, resolved)


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads ``1e12`` and ``1.0e-13`` as floats (YAML 1.2 style);
    plain PyYAML keeps exponents without a dot or sign as strings."""


_Loader.yaml_implicit_resolvers = {k: list(v) for k, v in yaml.SafeLoader.yaml_implicit_resolvers.items()}
_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:[0-9][0-9_]*)?(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"),
    list("-+0123456789."),
)


def load_yaml(text: str):
    """Parse a YAML document; an empty document gives an empty mapping."""
    try:
        data = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as err:
        raise ConfigError(f"malformed YAML: {err}") from None
    return {} if data is None else data


def parse_config(text: str) -> ResolvedConfig:
    """Parse and validate a YAML configuration document."""
    return build_config(load_yaml(text))
