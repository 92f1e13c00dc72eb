"""Cell-centered radial grids, parity-aware stencils and the diagnostic norms."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import ContractError, DomainError, UndefinedRatioError
from .logging_config import get_logger

logger = get_logger(__name__)

HARDY_BOUNDARY_TOL = 1e-8


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class RadialGrid:
    """Nodes r_j = (j + 1/2) h, j = 0..N-1, h = R/N, on a radial slice of R^d."""
    N: int
    R: float
    d: int = 5

    def __post_init__(self) -> None:
        if self.N < 4:
            raise ContractError("a radial grid needs at least 4 nodes")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ContractError("R must be positive and finite")
        if self.d not in (3, 5):
            raise ContractError(f"dimension must be 3 or 5, got {self.d}")

    @property
    def h(self) -> float:
        return self.R / self.N

    @cached_property
    def r(self) -> np.ndarray:
        r = (np.arange(self.N) + 0.5) * self.h
        r.setflags(write=False)
        return r

    def with_dimension(self, d: int) -> "RadialGrid":
        return RadialGrid(self.N, self.R, d)

    def refined(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.N * factor, self.R, self.d)


@dataclass(frozen=True, eq=False)
class Field:
    values: np.ndarray
    parity: Optional[Parity] = Parity.EVEN

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def like(self, values: np.ndarray) -> "Field":
        return Field(values, self.parity)


FieldLike = Union[Field, np.ndarray]


def as_field(f: FieldLike, parity: Optional[Parity] = Parity.EVEN) -> Field:
    return f if isinstance(f, Field) else Field(np.asarray(f, dtype=float), parity)


def sphere_area(d: int) -> float:
    """Area of the unit sphere in R^d (8 pi^2 / 3 for d = 5, 4 pi for d = 3)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def _check(f: Field, grid: RadialGrid) -> np.ndarray:
    v = f.values
    if v.shape != (grid.N,):
        raise ContractError(f"field has shape {v.shape}, grid has {grid.N} nodes")
    return v


def padded(f: Field, grid: RadialGrid) -> np.ndarray:
    """Values with one ghost cell on each side.

    Inner ghost mirrors (even) or anti-mirrors (odd) the first node across
    r = 0; the outer ghost is the cubic extrapolation of the last four nodes.
    """
    if f.parity is None:
        raise ContractError("parity must be set before applying a stencil")
    v = _check(f, grid)
    sign = 1.0 if f.parity == Parity.EVEN else -1.0
    inner = sign * v[0]
    outer = 4.0 * v[-1] - 6.0 * v[-2] + 4.0 * v[-3] - v[-4]
    return np.concatenate(([inner], v, [outer]))


def gradient(f: Field, grid: RadialGrid) -> Field:
    """Central first difference; the result has the opposite parity."""
    p = padded(f, grid)
    out = (p[2:] - p[:-2]) / (2.0 * grid.h)
    parity = Parity.ODD if f.parity == Parity.EVEN else Parity.EVEN
    return Field(out, parity)


def face_differences(f: Field, grid: RadialGrid) -> np.ndarray:
    """(f_(j+1) - f_j) / h on the N + 1 faces r = j h, j = 0..N, ghosts included."""
    p = padded(f, grid)
    return np.diff(p) / grid.h


def face_averaged_square(f: Field, grid: RadialGrid) -> np.ndarray:
    """Mean of the squared face differences on either side of each node."""
    df = face_differences(f, grid)
    sq = df * df
    return 0.5 * (sq[1:] + sq[:-1])


@lru_cache(maxsize=32)
def flux_weights(grid: RadialGrid, d: int) -> Tuple[np.ndarray, np.ndarray]:
    """Face weights a and cell weights w of the conservative Delta_d.

    a = r_f^(d-3) r_j r_(j+1) on the face between nodes j and j+1 (zero at the
    origin), w_j = (a r_f |_(j+1/2) - a r_f |_(j-1/2)) / (d h). Both are
    r^(d-1) up to O(h^2); for d = 5 the pair makes the quadratic part of the
    discrete hedgehog energy an exact invariant of the linear wave equation.
    """
    h = grid.h
    faces = np.arange(grid.N + 1) * h
    nodes = (np.arange(-1, grid.N + 1) + 0.5) * h
    a = faces ** (d - 3) * nodes[:-1] * nodes[1:]
    a[0] = 0.0
    ar = a * faces
    w = (ar[1:] - ar[:-1]) / (d * h)
    a.setflags(write=False)
    w.setflags(write=False)
    return a, w


def laplacian(f: Field, grid: RadialGrid, d: Optional[int] = None) -> Field:
    """Second-order conservative Delta_d f = r^(1-d) (r^(d-1) f')'.

    Exact on constants and r^2; self-adjoint and non-positive in the
    w-weighted inner product apart from the extrapolated outer face.
    """
    d = grid.d if d is None else d
    if f.parity == Parity.ODD:
        raise ContractError("the radial Laplacian acts on even fields")
    a, w = flux_weights(grid, d)
    flux = a * face_differences(f, grid)
    return f.like((flux[1:] - flux[:-1]) / (w * grid.h))


def kreiss_oliger(u: np.ndarray, grid: RadialGrid, sigma: float) -> np.ndarray:
    """Sixth-difference dissipation sigma/(64 h) D^6 u for an even field.

    Damps the grid-scale mode at rate sigma/h and smooth data at O(h^5).
    """
    if sigma == 0.0:
        return np.zeros_like(u)
    p = np.pad(u, 3, mode="symmetric")
    d6 = (p[6:] - 6.0 * p[5:-1] + 15.0 * p[4:-2] - 20.0 * p[3:-3]
          + 15.0 * p[2:-4] - 6.0 * p[1:-5] + p[:-6])
    return sigma / (64.0 * grid.h) * d6


def _weights(grid: RadialGrid, d: int) -> np.ndarray:
    return sphere_area(d) * grid.r ** (d - 1) * grid.h


def _finite_values(f: FieldLike, grid: RadialGrid) -> np.ndarray:
    v = _check(as_field(f), grid)
    if not np.all(np.isfinite(v)):
        raise DomainError("field contains non-finite values")
    return v


def integrate_radial(density: np.ndarray, grid: RadialGrid, d: Optional[int] = None) -> float:
    """Midpoint rule for the integral of a radial density over R^d."""
    d = grid.d if d is None else d
    return float(np.sum(density * _weights(grid, d)))


def norm_L2(f: FieldLike, grid: RadialGrid, d: Optional[int] = None) -> float:
    v = _finite_values(f, grid)
    return math.sqrt(integrate_radial(v * v, grid, d))


def norm_H1(f: FieldLike, grid: RadialGrid, d: Optional[int] = None) -> float:
    f = as_field(f)
    v = _finite_values(f, grid)
    dv = gradient(f, grid).values
    return math.sqrt(integrate_radial(v * v + dv * dv, grid, d))


def japanese_bracket(r: np.ndarray) -> np.ndarray:
    return np.sqrt(1.0 + r * r)


def weighted_sup(f: FieldLike, grid: RadialGrid,
                 weight: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> float:
    v = _finite_values(f, grid)
    w = (weight or japanese_bracket)(grid.r)
    return float(np.max(w * np.abs(v)))


def regional_l2(f: FieldLike, grid: RadialGrid, r_lo: float, r_hi: float,
                d: Optional[int] = None) -> float:
    v = _finite_values(f, grid)
    mask = (grid.r >= r_lo) & (grid.r < r_hi)
    return math.sqrt(integrate_radial(np.where(mask, v * v, 0.0), grid, d))


# Hardy-type functionals use differences on cell faces r = (j+1) h so that
# the discrete gradient of a field singular at the origin stays meaningful.

def dirichlet_energy(f: FieldLike, grid: RadialGrid, d: Optional[int] = None) -> float:
    """integral |grad f|^2 dx from face differences."""
    d = grid.d if d is None else d
    v = _finite_values(f, grid)
    faces = np.arange(1, grid.N) * grid.h
    diff = np.diff(v) / grid.h
    return float(np.sum(sphere_area(d) * faces ** (d - 1) * grid.h * diff * diff))


def inverse_square_mass(f: FieldLike, grid: RadialGrid, d: Optional[int] = None) -> float:
    """integral f^2 / r^2 dx."""
    v = _finite_values(f, grid)
    return integrate_radial(v * v / grid.r ** 2, grid, d)


def hardy_ratio(f: FieldLike, grid: RadialGrid, d: Optional[int] = None) -> float:
    """integral f^2/r^2 over integral |grad f|^2; at most 4/(d-2)^2 up to O(h)."""
    v = _finite_values(f, grid)
    peak = float(np.max(np.abs(v))) if v.size else 0.0
    if peak > 0 and np.max(np.abs(v[-4:])) > HARDY_BOUNDARY_TOL * peak:
        logger.warning("hardy_ratio: field does not decay at R=%g", grid.R)
    den = dirichlet_energy(v, grid, d)
    if den == 0.0:
        raise UndefinedRatioError("Hardy ratio is undefined for a field with zero gradient")
    return inverse_square_mass(v, grid, d) / den


def hardy_constant(d: int) -> float:
    return 4.0 / (d - 2) ** 2


def coercivity_functional(phi: FieldLike, grid: RadialGrid) -> float:
    """integral (|grad Phi|^2 - (9/4) Phi^2 / r^2) dx on R^5."""
    if grid.d != 5:
        raise ContractError("the coercivity functional lives on a d=5 grid")
    return dirichlet_energy(phi, grid, 5) - 2.25 * inverse_square_mass(phi, grid, 5)


def restrict(values: np.ndarray) -> np.ndarray:
    """Average pairs of children onto the next-coarser cell-centered grid."""
    values = np.asarray(values, dtype=float)
    if values.size % 2:
        raise ContractError("restriction needs an even number of nodes")
    return 0.5 * (values[0::2] + values[1::2])


def origin_parity_defect(f: FieldLike, grid: RadialGrid) -> float:
    """Relative size of the linear term of a cubic fit through the first nodes.

    Zero for an exactly even profile; scales like h for a profile with a kink
    at the origin.
    """
    v = _finite_values(f, grid)
    peak = float(np.max(np.abs(v)))
    if peak == 0.0:
        return 0.0
    r = grid.r[:4]
    coeffs = np.polyfit(r, v[:4], 3)
    return abs(float(coeffs[2])) * grid.h / peak
