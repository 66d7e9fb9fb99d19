"""Expectation values and populations of a spectral state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import (
    AngularGrid,
    SpectralState,
    cos2_theta_matrix,
    cos_theta_matrix,
    spectral_to_grid,
)

__all__ = [
    "ObservableRecord",
    "alignment_cosine",
    "alignment_on_grid",
    "observe",
    "orientation_cosine",
    "orientation_on_grid",
    "populations",
]


@dataclass(frozen=True)
class ObservableRecord:
    t: float
    alignment: float
    orientation: float
    norm: float
    field: float
    populations: np.ndarray | None = None


def alignment_cosine(state: SpectralState) -> float:
    """<cos^2 theta> as the banded quadratic form c^H A c."""
    return cos2_theta_matrix(state.basis).expectation(state.coefficients)


def orientation_cosine(state: SpectralState) -> float:
    """<cos theta>; zero for any state of definite parity."""
    return cos_theta_matrix(state.basis).expectation(state.coefficients)


def populations(state: SpectralState) -> np.ndarray:
    c = state.coefficients
    return (c.conj() * c).real


def alignment_on_grid(state: SpectralState, grid: AngularGrid) -> float:
    """Cross-check of :func:`alignment_cosine` by quadrature on the grid."""
    psi = spectral_to_grid(state, grid)
    return float(np.sum(grid.weights * grid.nodes**2 * np.abs(psi) ** 2))


def orientation_on_grid(state: SpectralState, grid: AngularGrid) -> float:
    psi = spectral_to_grid(state, grid)
    return float(np.sum(grid.weights * grid.nodes * np.abs(psi) ** 2))


def observe(state: SpectralState, t: float, field: float = 0.0, with_populations=False):
    p = populations(state)
    return ObservableRecord(
        t=float(t),
        alignment=alignment_cosine(state),
        orientation=orientation_cosine(state),
        norm=float(np.sqrt(p.sum())),
        field=float(field),
        populations=p if with_populations else None,
    )
