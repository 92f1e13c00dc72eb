"""The nonlocal chain f -> Phi1 -> Phi2 -> Phi and the diagnostics built on it."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import grid_ops, kernel
from .dynamics import SimState, boundary_energy_fraction, continuation_G, energy_density, reconstruct_f
from .errors import ContractError, QuadratureError
from .grid_ops import Field, Parity, RadialGrid
from .kernel import DEFAULT_QUADRATURE, KernelTable, QuadratureSpec
from .logging_config import get_logger

logger = get_logger(__name__)


@lru_cache(maxsize=32)
def _static(grid: RadialGrid, n1: int, spec: QuadratureSpec, table: KernelTable) -> kernel.StaticProfile:
    return kernel.static_profile(np.asarray(grid.r), n1, spec, table)


def static_profile(state: SimState, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> kernel.StaticProfile:
    return _static(state.grid, state.params.N1, spec, state.params.kernel)


def _phi_r(state: SimState) -> np.ndarray:
    return state.params.kernel.phi(state.grid.r, state.params.N1)


def _integral_of_B(state: SimState, fn: Callable[[np.ndarray], np.ndarray],
                   spec: QuadratureSpec, what: str) -> np.ndarray:
    """Per node: integral_0^{g(r)} fn(B(r, y)) dy."""
    r = np.asarray(state.grid.r)
    phi = _phi_r(state)
    table = state.params.kernel

    def integrand(y, rows):
        return fn(1.0 + kernel.b_excess(r[rows][:, None], y, phi[rows][:, None], table))

    g = state.g.values
    try:
        return kernel.integrate_batch(np.zeros_like(g), g, integrand, spec)
    except QuadratureError as exc:
        nodes = [] if exc.rows is None else list(exc.rows[:5])
        logger.error("%s: quadrature failed at node(s) %s, t=%g", what, nodes, state.t)
        raise


def compute_Phi(state: SimState, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> Field:
    head = _integral_of_B(state, np.sqrt, spec, "Phi")
    return Field(head + static_profile(state, spec).s0, Parity.EVEN)


def compute_Phi1(state: SimState, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> Field:
    """integral_{N1 pi}^{f(r)} (1 + 2 sin^2 y / r^2)^(1/2) dy."""
    r = np.asarray(state.grid.r)
    f, _, _ = reconstruct_f(state)

    def integrand(y, rows):
        return np.sqrt(1.0 + 2.0 * np.sin(y) ** 2 / r[rows][:, None] ** 2)

    start = np.full(r.shape, state.params.N1 * np.pi)
    return Field(kernel.integrate_batch(start, f, integrand, spec), Parity.ODD)


def compute_Phi2(state: SimState, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                 phi1: Optional[Field] = None) -> Field:
    phi1 = phi1 if phi1 is not None else compute_Phi1(state, spec)
    return Field(phi1.values / state.grid.r, Parity.EVEN)


def compute_dtPhi(state: SimState) -> Field:
    """A^(1/2) dg/dt with A = B(r, g)."""
    a = 1.0 + kernel.b_excess(state.grid.r, state.g.values, _phi_r(state), state.params.kernel)
    return Field(np.sqrt(a) * state.gt.values, Parity.EVEN)


def skyrme_energy(state: SimState) -> float:
    return float(np.sum(energy_density(state)) * state.grid.h)


def g3_integral(state: SimState, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> Field:
    """(1/2) integral_0^g (3 B^(3/2) + B^(-1/2) - B^(-3/2)) dy per node."""
    def fn(b):
        root = np.sqrt(b)
        return 0.5 * (3.0 * b * root + 1.0 / root - 1.0 / (b * root))
    return Field(_integral_of_B(state, fn, spec, "G3"), Parity.EVEN)


def _small_r_nodes(state: SimState, r0: float) -> np.ndarray:
    idx = np.flatnonzero(state.grid.r <= r0)
    if idx.size == 0:
        raise ContractError(f"no grid node lies in (0, r0={r0}]")
    return idx


def corollary1_margin(state: SimState, r0: float,
                      spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """min over nodes r <= r0 of (9/8) G2(r, g)^2 / r^2 - |G1(r, g)|."""
    idx = _small_r_nodes(state, r0)
    r = state.grid.r[idx]
    g = state.g.values[idx]
    table = state.params.kernel
    g2 = np.asarray(kernel.eval_G2(r, g, spec, table))
    g1 = np.asarray(kernel.eval_G1(r, g, spec, table))
    return float(np.min(1.125 * g2 ** 2 / r ** 2 - np.abs(g1)))


def modified_energy(state: SimState, r0: float, phi: Optional[Field] = None,
                    dt_phi: Optional[Field] = None,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """integral (1/2 (dPhi/dt)^2 + 1/2 |grad Phi|^2 - phi_<r0 G1(r, g)) dx."""
    grid = state.grid
    phi = phi if phi is not None else compute_Phi(state, spec)
    dt_phi = dt_phi if dt_phi is not None else compute_dtPhi(state)
    kinetic = 0.5 * grid_ops.norm_L2(dt_phi, grid) ** 2
    gradient = 0.5 * grid_ops.dirichlet_energy(phi, grid)
    cut = state.params.kernel.phi_lt_r0(grid.r, r0)
    idx = np.flatnonzero(cut > 0.0)
    potential = 0.0
    if idx.size:
        g1 = np.zeros(grid.N)
        g1[idx] = kernel.eval_G1(grid.r[idx], state.g.values[idx], spec, state.params.kernel)
        potential = grid_ops.integrate_radial(cut * g1, grid)
    return kinetic + gradient - potential


def ge62_residual(state: SimState, phi: Optional[Field] = None,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """max over r <= 1/2 of |dPhi/dr + 2 Phi / r - A1^(1/2) f_r / r - (1/r) int_0^g B^(-1/2)|."""
    grid = state.grid
    phi = phi if phi is not None else compute_Phi(state, spec)
    idx = np.flatnonzero(grid.r <= 0.5)
    if idx.size == 0:
        return 0.0
    r = grid.r
    dphi = grid_ops.gradient(phi, grid).values
    _, fr, _ = reconstruct_f(state)
    a1 = 1.0 + kernel.b_excess(r, state.g.values, _phi_r(state), state.params.kernel)
    inv = _integral_of_B(state, lambda b: 1.0 / np.sqrt(b), spec, "ge62")
    lhs = dphi + 2.0 * phi.values / r
    rhs = np.sqrt(a1) * fr / r + inv / r
    return float(np.max(np.abs(lhs - rhs)[idx]))


@dataclass(frozen=True, eq=False)
class PhiSnapshot:
    t: float
    phi: Field
    phi1: Field
    phi2: Field
    dt_phi: Field


def snapshot(state: SimState, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> PhiSnapshot:
    phi1 = compute_Phi1(state, spec)
    return PhiSnapshot(
        t=state.t,
        phi=compute_Phi(state, spec),
        phi1=phi1,
        phi2=compute_Phi2(state, spec, phi1),
        dt_phi=compute_dtPhi(state),
    )


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    E: float
    G: float
    l2_phi: float
    l2_dtphi: float
    h1_phi: float
    coercivity: float
    g1_margin: float
    dt: float = 0.0

    COLUMNS = ("t", "E", "G", "l2_phi", "l2_dtphi", "h1_phi", "coercivity", "g1_margin", "dt")

    def row(self) -> Tuple[float, ...]:
        return tuple(getattr(self, c) for c in self.COLUMNS)


@dataclass(frozen=True)
class MonitorRecord:
    t: float
    modified_energy: float
    r2g_sup: float
    g3_ratio: float
    f_h1: float
    g_h1: float
    phi_decay: float
    parity_defect: float
    ge62_residual: float
    boundary_fraction: float

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def diagnostics(state: SimState, r0: float, dt: float = 0.0,
                spec: QuadratureSpec = DEFAULT_QUADRATURE,
                phi: Optional[Field] = None) -> DiagnosticsRecord:
    grid = state.grid
    phi = phi if phi is not None else compute_Phi(state, spec)
    dt_phi = compute_dtPhi(state)
    return DiagnosticsRecord(
        t=state.t,
        E=skyrme_energy(state),
        G=continuation_G(state),
        l2_phi=grid_ops.norm_L2(phi, grid),
        l2_dtphi=grid_ops.norm_L2(dt_phi, grid),
        h1_phi=grid_ops.norm_H1(phi, grid),
        coercivity=grid_ops.coercivity_functional(phi, grid),
        g1_margin=corollary1_margin(state, r0, spec),
        dt=dt,
    )


def monitors(state: SimState, r0: float, spec: QuadratureSpec = DEFAULT_QUADRATURE,
             phi: Optional[Field] = None, boundary_cells: Optional[int] = None) -> MonitorRecord:
    grid = state.grid
    r = grid.r
    phi = phi if phi is not None else compute_Phi(state, spec)
    g = state.g.values

    near = r < 0.5
    ratio = 0.0
    if np.any(near):
        g3 = g3_integral(state, spec).values
        den = phi.values ** 2 + np.abs(phi.values)
        ok = near & (den > 1e-300)
        if np.any(ok):
            ratio = float(np.max(np.abs(g3[ok]) / den[ok]))

    f, fr, _ = reconstruct_f(state)
    f_h1 = math.sqrt(grid_ops.integrate_radial(f * f + fr * fr, grid, 3))
    return MonitorRecord(
        t=state.t,
        modified_energy=modified_energy(state, r0, phi, None, spec),
        r2g_sup=float(np.max(r * r * np.abs(g))),
        g3_ratio=ratio,
        f_h1=f_h1,
        g_h1=grid_ops.norm_H1(state.g, grid),
        phi_decay=float(np.max(r ** 1.5 * np.abs(phi.values))),
        parity_defect=grid_ops.origin_parity_defect(state.g, grid),
        ge62_residual=ge62_residual(state, phi, spec),
        boundary_fraction=boundary_energy_fraction(state, boundary_cells),
    )
