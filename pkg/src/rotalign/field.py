"""Two-color laser field and the time-dependent coefficients of the interaction potential.

All amplitudes are in units of the first harmonic's peak field max(F1), and all times
in units of hbar/B.  The potential acting on the rotor is

    V(theta, t) = c1(t) cos(theta) + c2(t) cos^2(theta) + c0(t)

with the coefficients returned by :func:`effective_couplings`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CouplingSet",
    "FieldConfig",
    "FieldModeError",
    "InteractionMode",
    "PulseSpec",
    "effective_couplings",
    "envelope",
    "field_record",
    "field_value",
]

_FOUR_LN2 = 4.0 * math.log(2.0)


class FieldModeError(ValueError):
    """Operation or parameter combination not defined for the interaction mode."""


class InteractionMode(str, enum.Enum):
    FULL_CARRIER = "full_carrier"
    CYCLE_AVERAGED = "cycle_averaged"


@dataclass(frozen=True)
class PulseSpec:
    """One Gaussian pulse.

    ``center`` is the envelope peak time and ``carrier_delay`` the time origin of the
    carrier phase; when ``carrier_delay`` is omitted it follows ``center``.
    """

    relative_amplitude: float
    tau_fwhm: float
    center: float
    carrier_multiple: int = 1
    carrier_delay: float | None = None

    def __post_init__(self):
        if not self.tau_fwhm > 0:
            raise ValueError(f"tau_fwhm must be > 0, got {self.tau_fwhm}")
        if not self.relative_amplitude >= 0:
            raise ValueError(f"relative_amplitude must be >= 0, got {self.relative_amplitude}")
        if self.carrier_multiple not in (1, 2):
            raise ValueError(f"carrier_multiple must be 1 or 2, got {self.carrier_multiple}")
        if self.carrier_delay is None:
            object.__setattr__(self, "carrier_delay", self.center)


@dataclass(frozen=True)
class CouplingSet:
    """Dimensionless interaction strengths.

    delta_omega       max(F1)^2 * (alpha_par - alpha_perp) / (2B)
    delta_omega_mu    mu * max(F1) / B
    delta_omega_perp  alpha_perp * max(F1)^2 / (2B)
    """

    delta_omega: float = 0.0
    delta_omega_mu: float = 0.0
    delta_omega_perp: float = 0.0

    def __post_init__(self):
        for name in ("delta_omega", "delta_omega_mu", "delta_omega_perp"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class FieldConfig:
    pulses: tuple
    couplings: CouplingSet
    carrier_omega: float | None = None
    mode: InteractionMode = InteractionMode.CYCLE_AVERAGED

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        object.__setattr__(self, "mode", InteractionMode(self.mode))
        if self.mode is InteractionMode.CYCLE_AVERAGED:
            if self.couplings.delta_omega_mu > 0:
                raise FieldModeError(
                    "delta_omega_mu > 0 requires full_carrier mode; "
                    "the dipole term averages to zero over a carrier cycle"
                )
            multiples = [p.carrier_multiple for p in self.pulses]
            if len(set(multiples)) != len(multiples):
                raise FieldModeError(
                    "cycle_averaged mode needs distinct carrier multiples per pulse "
                    "(same-color cross terms do not average out)"
                )
        else:
            if self.carrier_omega is None or not self.carrier_omega > 0:
                raise FieldModeError("full_carrier mode requires carrier_omega > 0")
            shortest = min((p.tau_fwhm for p in self.pulses), default=math.inf)
            if self.carrier_omega * shortest < 10:
                warnings.warn(
                    f"carrier_omega * tau_fwhm = {self.carrier_omega * shortest:.3g} < 10: "
                    "fewer than ~2 optical cycles under the envelope",
                    stacklevel=2,
                )


def envelope(t, pulse: PulseSpec):
    """Gaussian envelope with FWHM ``tau_fwhm`` peaking at ``center``; scalar or array t."""
    dt = np.asarray(t, dtype=float) - pulse.center
    return pulse.relative_amplitude * np.exp(-0.5 * _FOUR_LN2 * dt * dt / pulse.tau_fwhm**2)


def field_value(t, config: FieldConfig):
    """Instantaneous field f(t) in units of max(F1)."""
    if config.mode is not InteractionMode.FULL_CARRIER:
        raise FieldModeError("instantaneous field is undefined in cycle_averaged mode")
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for p in config.pulses:
        phase = p.carrier_multiple * config.carrier_omega * (t - p.carrier_delay)
        total = total + envelope(t, p) * np.cos(phase)
    return total


def _envelope_power(t, config: FieldConfig):
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for p in config.pulses:
        g = envelope(t, p)
        total = total + g * g
    return total


def effective_couplings(t, config: FieldConfig):
    """Coefficients (c1, c2, c0) of cos, cos^2 and the constant term of V(theta, t).

    In cycle_averaged mode the carrier average of f^2 is sum_i g_i^2 / 2 and the linear
    dipole term vanishes.
    """
    k = config.couplings
    if config.mode is InteractionMode.FULL_CARRIER:
        f = field_value(t, config)
        f2 = f * f
        return -k.delta_omega_mu * f, -k.delta_omega * f2, -k.delta_omega_perp * f2
    half_power = 0.5 * _envelope_power(t, config)
    return np.zeros_like(half_power), -k.delta_omega * half_power, -k.delta_omega_perp * half_power


def field_record(t, config: FieldConfig):
    """Value stored in the ``field`` column: f(t), or sum_i g_i(t)^2 when cycle-averaged."""
    if config.mode is InteractionMode.FULL_CARRIER:
        return field_value(t, config)
    return _envelope_power(t, config)
