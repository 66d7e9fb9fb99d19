"""Laser-driven alignment of a linear rigid rotor by one- and two-color pulses."""

__version__ = "0.1.0"

from .basis import (  # noqa: E402
    AngularGrid,
    BasisDescriptor,
    SpectralState,
    build_basis,
    build_quadrature,
)
from .field import CouplingSet, FieldConfig, InteractionMode, PulseSpec  # noqa: E402
from .observables import alignment_cosine, orientation_cosine, populations  # noqa: E402
from .propagator import PropagationPlan, TimeSeries, initial_eigenstate, propagate  # noqa: E402
from .sweep import ColorMode, RunSettings, SweepSpec, figure_sweep, run_sweep  # noqa: E402

__all__ = [
    "AngularGrid",
    "BasisDescriptor",
    "ColorMode",
    "CouplingSet",
    "FieldConfig",
    "InteractionMode",
    "PropagationPlan",
    "PulseSpec",
    "RunSettings",
    "SpectralState",
    "SweepSpec",
    "TimeSeries",
    "alignment_cosine",
    "build_basis",
    "build_quadrature",
    "figure_sweep",
    "initial_eigenstate",
    "orientation_cosine",
    "populations",
    "propagate",
    "run_sweep",
]
