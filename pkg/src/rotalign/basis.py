"""Fixed-M spherical-harmonic basis, Gauss-Legendre grid and the transforms between them.

The azimuthal factor exp(i M phi)/sqrt(2 pi) is integrated out analytically, so every
function here works with the theta part only, written in x = cos(theta).  The basis
functions are the normalized associated Legendre functions

    N_J^M(x),   int_{-1}^{1} N_J^M(x) N_J'^M(x) dx = delta_JJ'

generated without the Condon-Shortley phase, so all closed-form matrix elements of
cos(theta) and cos^2(theta) are non-negative off the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "AngularGrid",
    "BandedOperator",
    "BasisDescriptor",
    "BasisError",
    "QuadratureError",
    "SpectralState",
    "build_basis",
    "build_quadrature",
    "cos2_theta_matrix",
    "cos_theta_matrix",
    "gauss_legendre",
    "grid_to_spectral",
    "legendre_table",
    "normalized_assoc_legendre",
    "spectral_to_grid",
]

_LD = np.longdouble


class BasisError(ValueError):
    """Invalid (j_max, m) pair, or a quantum number outside a basis."""


class QuadratureError(ValueError):
    """Grid too small for the basis, or a vector whose length does not match the grid."""


@dataclass(frozen=True)
class BasisDescriptor:
    """Truncated basis {Y_{J,M} : |M| <= J <= j_max} at fixed M."""

    j_max: int
    m: int

    def __post_init__(self):
        if self.j_max < abs(self.m):
            raise BasisError(f"j_max={self.j_max} must be >= |m|={abs(self.m)}")

    @property
    def dim(self) -> int:
        return self.j_max - abs(self.m) + 1

    @property
    def j_values(self) -> np.ndarray:
        return np.arange(abs(self.m), self.j_max + 1)

    def index(self, j: int) -> int:
        if not abs(self.m) <= j <= self.j_max:
            raise BasisError(f"J={j} outside basis |m|={abs(self.m)}..{self.j_max}")
        return j - abs(self.m)


def build_basis(j_max: int, m: int) -> BasisDescriptor:
    return BasisDescriptor(int(j_max), int(m))


@dataclass(frozen=True, eq=False)
class SpectralState:
    """Expansion coefficients c_J of psi over a fixed-M basis, ordered J = |m|..j_max."""

    coefficients: np.ndarray
    basis: BasisDescriptor

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.complex128)
        if c.shape != (self.basis.dim,):
            raise BasisError(f"expected {self.basis.dim} coefficients, got shape {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.coefficients, self.coefficients).real))


@dataclass(frozen=True, eq=False)
class BandedOperator:
    """Real symmetric banded matrix.

    ``diagonals[k]`` holds the k-th superdiagonal (k = 0 is the main diagonal), so it
    has length ``dim - k``.  Diagonals that are structurally zero are stored as zeros.
    """

    half_bandwidth: int
    diagonals: tuple

    @property
    def dim(self) -> int:
        return len(self.diagonals[0])

    def matvec(self, c: np.ndarray) -> np.ndarray:
        out = self.diagonals[0] * c
        for k in range(1, self.half_bandwidth + 1):
            d = self.diagonals[k]
            if d.size:
                out[:-k] += d * c[k:]
                out[k:] += d * c[:-k]
        return out

    def expectation(self, c: np.ndarray) -> float:
        """Re <c|A|c>, evaluated from the band without forming the dense matrix."""
        value = np.dot(self.diagonals[0], (c.conj() * c).real)
        for k in range(1, self.half_bandwidth + 1):
            d = self.diagonals[k]
            if d.size:
                value += 2.0 * np.dot(d, (c[:-k].conj() * c[k:]).real)
        return float(value)

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diagonals[0]).astype(float)
        for k in range(1, self.half_bandwidth + 1):
            if self.diagonals[k].size:
                a += np.diag(self.diagonals[k], k) + np.diag(self.diagonals[k], -k)
        return a


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@lru_cache(maxsize=None)
def cos_theta_matrix(basis: BasisDescriptor) -> BandedOperator:
    """Tridiagonal matrix of cos(theta); <J|cos|J+1> = sqrt(((J+1)^2 - M^2) / ((2J+1)(2J+3)))."""
    m = abs(basis.m)
    j = basis.j_values[:-1].astype(float)
    off = np.sqrt(((j + 1) ** 2 - m * m) / ((2 * j + 1) * (2 * j + 3)))
    return BandedOperator(1, (_readonly(np.zeros(basis.dim)), _readonly(off)))


@lru_cache(maxsize=None)
def cos2_theta_matrix(basis: BasisDescriptor) -> BandedOperator:
    """Pentadiagonal matrix of cos^2(theta) from closed-form elements.

    Every element is the exact integral, including the last two rows.  Squaring the
    truncated cos(theta) matrix instead would be wrong there: row j_max of cos^2 needs
    the missing coupling to J = j_max + 1, and row j_max - 1 inherits it on the diagonal.
    """
    m = abs(basis.m)
    j = basis.j_values.astype(float)
    diag = (2 * j * (j + 1) - 2 * m * m - 1) / ((2 * j - 1) * (2 * j + 3))
    j2 = j[:-2]
    off2 = np.sqrt(
        ((j2 + 1) ** 2 - m * m)
        * ((j2 + 2) ** 2 - m * m)
        / ((2 * j2 + 1) * (2 * j2 + 3) ** 2 * (2 * j2 + 5))
    )
    return BandedOperator(
        2, (_readonly(diag), _readonly(np.zeros(max(basis.dim - 1, 0))), _readonly(off2))
    )


def _assoc_legendre_rows(j_max: int, m: int, x: np.ndarray) -> np.ndarray:
    """Rows N_J^m(x) for J = |m|..j_max by upward three-term recurrence (dtype follows x)."""
    m = abs(m)
    dim = j_max - m + 1
    one = x.dtype.type(1)
    out = np.zeros((dim, x.size), dtype=x.dtype)
    seed = one / np.sqrt(x.dtype.type(2))
    for k in range(1, m + 1):
        seed *= np.sqrt(x.dtype.type(2 * k + 1) / x.dtype.type(2 * k))
    out[0] = seed * np.sqrt(one - x * x) ** m if m else seed
    if dim > 1:
        out[1] = np.sqrt(x.dtype.type(2 * m + 3)) * x * out[0]
    for i in range(2, dim):
        j = m + i
        a = np.sqrt(x.dtype.type(4 * j * j - 1) / x.dtype.type(j * j - m * m))
        b = np.sqrt(x.dtype.type((j - 1) ** 2 - m * m) / x.dtype.type(4 * (j - 1) ** 2 - 1))
        out[i] = a * (x * out[i - 1] - b * out[i - 2])
    return out


def normalized_assoc_legendre(j: int, m: int, x):
    """theta part of Y_{j,m} in x = cos(theta), unit-normalized on [-1, 1].

    Accepts a scalar or an array for ``x``; returns the same shape.
    """
    if j < abs(m):
        raise BasisError(f"j={j} must be >= |m|={abs(m)}")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xa) > 1):
        raise BasisError("x must lie in [-1, 1]")
    row = _assoc_legendre_rows(j, m, xa)[-1]
    return float(row[0]) if np.ndim(x) == 0 else row.reshape(np.shape(x))


def legendre_table(basis: BasisDescriptor, x) -> np.ndarray:
    """Matrix of N_J^M(x_k): rows follow the basis, columns follow ``x``."""
    return _assoc_legendre_rows(basis.j_max, basis.m, np.atleast_1d(np.asarray(x, dtype=float)))


def _legendre_and_derivative(n: int, x: np.ndarray):
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = n * (x * p - p_prev) / (x * x - 1)
    return p, dp


def _gauss_legendre_ld(n: int):
    x = leggauss(n)[0].astype(_LD)
    for _ in range(3):
        p, dp = _legendre_and_derivative(n, x)
        x = x - p / dp
    _, dp = _legendre_and_derivative(n, x)
    w = 2 / ((1 - x * x) * dp * dp)
    return x, w


def gauss_legendre(n: int):
    """n-point Gauss-Legendre nodes (ascending) and weights on [-1, 1].

    Nodes are polished by Newton steps in extended precision before rounding, so the
    weights sum to 2 and the discrete Legendre Gram matrix equals the identity to
    rounding of the stored values rather than to the ~1e-14 of a double-precision
    construction.
    """
    if n < 1:
        raise QuadratureError("need at least one quadrature node")
    x, w = _gauss_legendre_ld(n)
    return x.astype(float), w.astype(float)


@dataclass(frozen=True, eq=False)
class AngularGrid:
    """Gauss-Legendre grid in x = cos(theta) carrying the basis tables.

    ``scaled_table[k, i] = sqrt(weights[k]) * legendre_table[i, k]`` has orthonormal
    columns; the propagator maps coefficients to weighted grid values with it and back
    with its transpose.
    """

    basis: BasisDescriptor
    nodes: np.ndarray
    weights: np.ndarray
    legendre_table: np.ndarray
    scaled_table: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size


def build_quadrature(n_nodes: int, basis: BasisDescriptor) -> AngularGrid:
    if n_nodes < basis.j_max + 1:
        raise QuadratureError(
            f"n_nodes={n_nodes} too small for j_max={basis.j_max}; need >= {basis.j_max + 1}"
        )
    x, w = _gauss_legendre_ld(n_nodes)
    table = _assoc_legendre_rows(basis.j_max, basis.m, x)
    scaled = (table * np.sqrt(w)).T
    return AngularGrid(
        basis=basis,
        nodes=_readonly(x.astype(float)),
        weights=_readonly(w.astype(float)),
        legendre_table=_readonly(table.astype(float)),
        scaled_table=_readonly(scaled.astype(float)),
    )


def spectral_to_grid(state: SpectralState, grid: AngularGrid) -> np.ndarray:
    """psi(x_k) = sum_J c_J N_J^M(x_k)."""
    c = state.coefficients
    if c.size != grid.legendre_table.shape[0]:
        raise QuadratureError(
            f"state has {c.size} coefficients, grid serves {grid.legendre_table.shape[0]}"
        )
    return grid.legendre_table.T @ c


def grid_to_spectral(values, grid: AngularGrid) -> SpectralState:
    """c_J = sum_k w_k N_J^M(x_k) psi(x_k); inverts spectral_to_grid on band-limited data."""
    v = np.asarray(values, dtype=np.complex128)
    if v.shape != (grid.n_nodes,):
        raise QuadratureError(f"expected {grid.n_nodes} grid values, got shape {v.shape}")
    return SpectralState(grid.legendre_table @ (grid.weights * v), grid.basis)
