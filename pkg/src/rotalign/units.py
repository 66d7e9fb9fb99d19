"""Conversion between laboratory quantities and the dimensionless solver inputs.

Energies are measured in units of the rotational constant B and times in hbar/B.
Laboratory inputs use spectroscopy units: B in cm^-1, dipole moment in debye,
polarizability volumes in cubic angstrom, peak intensity in W/cm^2 and durations in
seconds.  The peak field amplitude follows from I = c eps0 F0^2 / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as const

from .field import CouplingSet

__all__ = [
    "DEBYE",
    "PhysicalMolecule",
    "from_dimensionless",
    "to_dimensionless",
]

DEBYE = 1e-21 / const.c  # C m
ANGSTROM3 = 4 * math.pi * const.epsilon_0 * 1e-30  # C m^2 / V per cubic angstrom
W_PER_CM2 = 1e4  # W/m^2


@dataclass(frozen=True)
class PhysicalMolecule:
    rotational_constant_cm: float
    dipole_debye: float = 0.0
    polarizability_parallel_a3: float = 0.0
    polarizability_perp_a3: float = 0.0

    def __post_init__(self):
        if not self.rotational_constant_cm > 0:
            raise ValueError("rotational_constant_cm must be > 0")
        if self.dipole_debye < 0:
            raise ValueError("dipole_debye must be >= 0")
        if self.polarizability_parallel_a3 < 0 or self.polarizability_perp_a3 < 0:
            raise ValueError("polarizabilities must be >= 0")
        if self.polarizability_parallel_a3 < self.polarizability_perp_a3:
            raise ValueError("polarizability_parallel_a3 must be >= polarizability_perp_a3")

    @property
    def rotational_energy(self) -> float:
        """B in joules."""
        return const.h * const.c * 100.0 * self.rotational_constant_cm

    @property
    def time_unit(self) -> float:
        """hbar / B in seconds."""
        return const.hbar / self.rotational_energy

    @property
    def anisotropy_si(self) -> float:
        return (self.polarizability_parallel_a3 - self.polarizability_perp_a3) * ANGSTROM3


def _peak_field(intensity_w_cm2: float) -> float:
    return math.sqrt(2.0 * intensity_w_cm2 * W_PER_CM2 / (const.c * const.epsilon_0))


def to_dimensionless(mol: PhysicalMolecule, peak_intensity_w_cm2: float, tau_fwhm_s: float):
    """Return ``(CouplingSet, tau_fwhm)`` for a pulse of the given peak intensity and FWHM."""
    if not peak_intensity_w_cm2 > 0:
        raise ValueError("peak intensity must be > 0")
    if not tau_fwhm_s > 0:
        raise ValueError("tau_fwhm must be > 0")
    f0 = _peak_field(peak_intensity_w_cm2)
    b = mol.rotational_energy
    couplings = CouplingSet(
        delta_omega=f0 * f0 * mol.anisotropy_si / (2 * b),
        delta_omega_mu=mol.dipole_debye * DEBYE * f0 / b,
        delta_omega_perp=f0 * f0 * mol.polarizability_perp_a3 * ANGSTROM3 / (2 * b),
    )
    return couplings, tau_fwhm_s / mol.time_unit


def from_dimensionless(mol: PhysicalMolecule, couplings: CouplingSet, tau_fwhm: float):
    """Inverse of :func:`to_dimensionless`: ``(peak_intensity_w_cm2, tau_fwhm_s)``.

    The field strength is recovered from the first coupling the molecule can produce,
    in the order delta_omega, delta_omega_perp, delta_omega_mu.
    """
    if not tau_fwhm > 0:
        raise ValueError("tau_fwhm must be > 0")
    b = mol.rotational_energy
    if mol.anisotropy_si > 0:
        f0 = math.sqrt(2 * b * couplings.delta_omega / mol.anisotropy_si)
    elif mol.polarizability_perp_a3 > 0:
        f0 = math.sqrt(2 * b * couplings.delta_omega_perp / (mol.polarizability_perp_a3 * ANGSTROM3))
    elif mol.dipole_debye > 0:
        f0 = couplings.delta_omega_mu * b / (mol.dipole_debye * DEBYE)
    else:
        raise ValueError("molecule has no coupling to the field; intensity is undetermined")
    if not f0 > 0:
        raise ValueError("couplings must be > 0 to recover an intensity")
    intensity = 0.5 * const.c * const.epsilon_0 * f0 * f0 / W_PER_CM2
    return intensity, tau_fwhm * mol.time_unit
