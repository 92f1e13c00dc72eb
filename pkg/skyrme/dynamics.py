"""Method-of-lines evolution of the regularized hedgehog field g on R^5.

f = phi(r) + r g. For r < 1 the right-hand side uses the regular form in
F_0..F_4(r^2 g^2); for r > 1/2 it uses the original nonlinearity N of f. The
two pieces are blended with phi_<1 + phi_>1 = 1. Spatial derivatives come from
the conservative Laplacian of grid_ops; the squared radial derivative in the
null forms is the face-averaged one that the discrete energy uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterable, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from . import grid_ops
from .config import DataConfig, EvolutionConfig
from .errors import BlowupSuspected, ContractError, DomainError
from .grid_ops import Field, Parity, RadialGrid
from .kernel import DEFAULT_KERNEL, KernelTable, transition
from .logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ModelParams:
    N1: int = 0
    contrast: bool = False
    kernel: KernelTable = field(default=DEFAULT_KERNEL)


@dataclass(frozen=True, eq=False)
class SimState:
    t: float
    g: Field
    gt: Field
    grid: RadialGrid
    params: ModelParams = field(default_factory=ModelParams)

    def __post_init__(self) -> None:
        if self.grid.d != 5:
            raise ContractError("g lives on a d=5 grid")
        if self.params.N1 < 0:
            raise ContractError("N1 must be non-negative")
        for name, fld in (("g", self.g), ("gt", self.gt)):
            if fld.parity != Parity.EVEN:
                raise ContractError(f"{name} must have even parity")
            if fld.values.shape != (self.grid.N,):
                raise ContractError(f"{name} does not live on the grid")
            if not np.all(np.isfinite(fld.values)):
                raise ContractError(f"{name} contains non-finite values")


def zero_state(grid: RadialGrid, params: Optional[ModelParams] = None, t: float = 0.0) -> SimState:
    z = np.zeros(grid.N)
    return SimState(t, Field(z), Field(z.copy()), grid, params or ModelParams())


@dataclass(frozen=True, eq=False)
class Background:
    """Time-independent arrays of a (grid, N1, kernel) triple."""
    r: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    source: np.ndarray
    lt1: np.ndarray
    gt1: np.ndarray
    near: np.ndarray
    far: np.ndarray


@lru_cache(maxsize=32)
def background(grid: RadialGrid, n1: int, kernel: KernelTable = DEFAULT_KERNEL) -> Background:
    r = np.asarray(grid.r)
    phi = kernel.phi(r, n1)
    dphi = kernel.phi(r, n1, 1)
    ddphi = kernel.phi(r, n1, 2)
    lt1 = kernel.phi_lt1(r)
    gt1 = kernel.phi_gt1(r)
    return Background(
        r=r, phi=phi, dphi=dphi,
        source=(ddphi + 2.0 * dphi / r) / r,
        lt1=lt1, gt1=gt1, near=lt1 > 0.0, far=gt1 > 0.0,
    )


def reconstruct_f(state: SimState) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(f, df/dr, df/dt) from g."""
    bg = background(state.grid, state.params.N1, state.params.kernel)
    g = state.g.values
    gr = grid_ops.gradient(state.g, state.grid).values
    f = bg.phi + bg.r * g
    return f, bg.dphi + g + bg.r * gr, bg.r * state.gt.values


def nonlinearity_N(r: np.ndarray, f: np.ndarray, fr: np.ndarray, ft: np.ndarray,
                   fr2: Optional[np.ndarray] = None) -> np.ndarray:
    """Nonlinear part of the f equation, quasilinear factor A_1 divided out.

    fr2 replaces fr**2 in the null form when given.
    """
    fr2 = fr * fr if fr2 is None else fr2
    s = np.sin(f)
    s2f = np.sin(2.0 * f)
    a1 = 1.0 + 2.0 * s * s / (r * r)
    bracket = (4.0 * s * s / r ** 3 * fr + s2f / (r * r) * (ft * ft - fr2)
               + s2f / (r * r) + s * s * s2f / r ** 4)
    return -bracket / a1


def _near_force(r, g, gt, gr, gr2, kernel: KernelTable, contrast: bool) -> np.ndarray:
    u = (r * g) ** 2
    g2 = g * g
    f1 = kernel.f_of_u(1, u)
    if contrast:
        return f1 * g2 * g
    f0 = kernel.f_of_u(0, u)
    f2 = kernel.f_of_u(2, u)
    f3 = kernel.f_of_u(3, u)
    f4 = kernel.f_of_u(4, u)
    num = f1 * g2 * g + f2 * g2 * g2 * g - f3 * g * (gt * gt - gr2) + f4 * g2 * g2 * r * gr
    return num / (1.0 + f0 * g2)


def _far_force(r, phi, dphi, g, gt, gr, gr2) -> np.ndarray:
    f = phi + r * g
    lower = dphi + g
    fr = lower + r * gr
    fr2 = lower * lower + 2.0 * lower * r * gr + r * r * gr2
    return 2.0 * g / (r * r) + nonlinearity_N(r, f, fr, r * gt, fr2) / r


def _radial_derivatives(g: np.ndarray, grid: RadialGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Central dg/dr and the face-averaged (dg/dr)**2 used in the null forms."""
    field = Field(g)
    return grid_ops.gradient(field, grid).values, grid_ops.face_averaged_square(field, grid)


def split_force(state: SimState) -> np.ndarray:
    """d^2g/dt^2 - Delta_5 g, blended from the near and far forms."""
    return _split_force(state.g.values, state.gt.values, state.grid, state.params)


def _split_force(g: np.ndarray, gt: np.ndarray, grid: RadialGrid, params: ModelParams) -> np.ndarray:
    bg = background(grid, params.N1, params.kernel)
    gr, gr2 = _radial_derivatives(g, grid)
    out = bg.source.copy()
    n = bg.near
    if np.any(n):
        out[n] += bg.lt1[n] * _near_force(bg.r[n], g[n], gt[n], gr[n], gr2[n],
                                          params.kernel, params.contrast)
    m = bg.far
    if np.any(m):
        out[m] += bg.gt1[m] * _far_force(bg.r[m], bg.phi[m], bg.dphi[m], g[m], gt[m], gr[m], gr2[m])
    return out


def direct_force(state: SimState, mask: Optional[np.ndarray] = None) -> np.ndarray:
    """The same force assembled from the f form alone (valid for every r > 0).

    Loses accuracy as r -> 0; used to cross-check the blended form where both
    are well conditioned.
    """
    bg = background(state.grid, state.params.N1, state.params.kernel)
    m = np.ones(state.grid.N, dtype=bool) if mask is None else mask
    gr, gr2 = _radial_derivatives(state.g.values, state.grid)
    out = np.zeros(state.grid.N)
    out[m] = bg.source[m] + _far_force(bg.r[m], bg.phi[m], bg.dphi[m], state.g.values[m],
                                       state.gt.values[m], gr[m], gr2[m])
    return out


def _accel(g: np.ndarray, gt: np.ndarray, grid: RadialGrid, params: ModelParams,
           t: float) -> np.ndarray:
    lap = grid_ops.laplacian(Field(g), grid).values
    with np.errstate(all="ignore"):
        try:
            dgt = lap + _split_force(g, gt, grid, params)
        except DomainError:
            dgt = np.where(np.isfinite(g * g * grid.r * grid.r) & np.isfinite(gt), 0.0, np.nan)
            if np.all(np.isfinite(dgt)):
                dgt[:] = np.nan
    bad = ~np.isfinite(dgt)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise BlowupSuspected(f"non-finite right-hand side at r={grid.r[j]:.6g}, t={t:.6g}",
                              index=j, r=float(grid.r[j]), t=t)
    return dgt


def rhs(state: SimState) -> Tuple[Field, Field]:
    return state.gt, Field(_accel(state.g.values, state.gt.values, state.grid, state.params, state.t))


def step(state: SimState, dt: float, cfl_max: float = 0.5, dissipation: float = 0.0) -> SimState:
    """One classical RK4 step; dt may be negative.

    dissipation > 0 adds Kreiss-Oliger damping sigma/(64 h) D^6 to both
    equations of the first-order system.
    """
    if not math.isfinite(dt) or abs(dt) > cfl_max * state.grid.h * (1.0 + 1e-6):
        raise ContractError(f"|dt|={abs(dt):.3g} exceeds {cfl_max} h")
    grid, params, t = state.grid, state.params, state.t

    def deriv(g, v, tt):
        dg, dv = v, _accel(g, v, grid, params, tt)
        if dissipation:
            dg = dg + grid_ops.kreiss_oliger(g, grid, dissipation)
            dv = dv + grid_ops.kreiss_oliger(v, grid, dissipation)
        return dg, dv

    g0 = state.g.values
    v0 = state.gt.values
    k1g, k1v = deriv(g0, v0, t)
    k2g, k2v = deriv(g0 + 0.5 * dt * k1g, v0 + 0.5 * dt * k1v, t + 0.5 * dt)
    k3g, k3v = deriv(g0 + 0.5 * dt * k2g, v0 + 0.5 * dt * k2v, t + 0.5 * dt)
    k4g, k4v = deriv(g0 + dt * k3g, v0 + dt * k3v, t + dt)
    g = g0 + dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
    gt = v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    bad = ~(np.isfinite(g) & np.isfinite(gt))
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise BlowupSuspected(f"non-finite state after step at r={grid.r[j]:.6g}",
                              index=j, r=float(grid.r[j]), t=t + dt)
    return replace(state, t=t + dt, g=Field(g), gt=Field(gt))


def continuation_G(state: SimState) -> float:
    """sup <x>|g| + sup <x>(|dg/dt| + |grad g|)."""
    grid = state.grid
    gr = grid_ops.gradient(state.g, grid).values
    first = grid_ops.weighted_sup(state.g.values, grid)
    second = grid_ops.weighted_sup(np.abs(state.gt.values) + np.abs(gr), grid)
    return first + second


def energy_density(state: SimState) -> np.ndarray:
    """Per-node Skyrme energy density; E = h * sum(e).

    Gradient terms live on the interior faces and are shared between their
    two nodes; the kinetic term uses the cell weights of the Laplacian in
    place of r^4. With these quadratures the quadratic part of E is conserved
    exactly by the semi-discrete linear evolution.
    """
    f, _, _ = reconstruct_f(state)
    grid = state.grid
    r = grid.r
    _, w = grid_ops.flux_weights(grid, 5)
    s2 = np.sin(f) ** 2
    gt = state.gt.values
    kinetic = 0.5 * (1.0 + 2.0 * s2 / (r * r)) * w * gt * gt
    potential = s2 * (1.0 + s2 / (2.0 * r * r))
    faces = np.arange(1, grid.N) * grid.h
    df = np.diff(f) / grid.h
    sf2 = np.sin(0.5 * (f[1:] + f[:-1])) ** 2
    gradient = 0.5 * (faces * faces + 2.0 * sf2) * df * df
    e = kinetic + potential
    e[:-1] += 0.5 * gradient
    e[1:] += 0.5 * gradient
    return e


def boundary_cells(grid: RadialGrid, requested: Optional[int] = None) -> int:
    return requested or max(4, grid.N // 100)


def boundary_energy_fraction(state: SimState, cells: Optional[int] = None) -> float:
    e = energy_density(state)
    total = float(np.sum(e))
    if total <= 0.0:
        return 0.0
    k = boundary_cells(state.grid, cells)
    return float(np.sum(e[-k:])) / total


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

def windowed_gaussian(r: np.ndarray, a: float, r_c: float, sigma: float) -> np.ndarray:
    """a exp(-(r - r_c)^2 / sigma^2), smoothly cut to [r_c - 3 sigma, r_c + 3 sigma]."""
    if a == 0.0:
        return np.zeros_like(r)
    window = 1.0 - transition(r, r_c + 2.0 * sigma, r_c + 3.0 * sigma)
    if r_c - 3.0 * sigma > 0.0:
        window = window * transition(r, r_c - 3.0 * sigma, r_c - 2.0 * sigma)
    return a * np.exp(-((r - r_c) / sigma) ** 2) * window


def initial_state(grid: RadialGrid, data: DataConfig, params: Optional[ModelParams] = None) -> SimState:
    r = np.asarray(grid.r)
    return SimState(
        t=0.0,
        g=Field(windowed_gaussian(r, data.a, data.r_c, data.sigma)),
        gt=Field(windowed_gaussian(r, data.a1, data.r_c1, data.sigma1)),
        grid=grid,
        params=params or ModelParams(),
    )


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

Sink = Callable[[SimState, int, float], None]


class RunOutcome(BaseModel):
    status: Literal["completed", "blowup_flagged", "boundary_contaminated"]
    t: float
    steps: int
    G: float
    max_G: float
    message: str = ""


def run(initial: SimState, config: EvolutionConfig, sinks: Iterable[Sink] = (),
        boundary_cell_count: Optional[int] = None, boundary_fraction: float = 1e-10) -> RunOutcome:
    """Advance to config.t_end with fixed dt = cfl h (last step shortened).

    Sinks are called as sink(state, step, dt) at step 0, every record_every
    steps and at the final step. G is checked after every step.
    """
    sinks = list(sinks)
    grid = initial.grid
    dt = config.cfl * grid.h
    n_steps = int(math.ceil(config.t_end / dt - 1e-9)) if config.t_end > 0 else 0
    state = initial
    G = continuation_G(state)
    max_G = G
    logger.info("run start: N=%d R=%g N1=%d dt=%.6g steps=%d", grid.N, grid.R,
                initial.params.N1, dt, n_steps)
    for sink in sinks:
        sink(state, 0, dt)

    def outcome(status, message=""):
        logger.info("run end: %s at t=%.6g (G=%.6g, max G=%.6g) %s", status, state.t, G, max_G, message)
        return RunOutcome(status=status, t=state.t, steps=k, G=G, max_G=max_G, message=message)

    k = 0
    for k in range(1, n_steps + 1):
        h_step = dt if k < n_steps else config.t_end - state.t
        try:
            state = step(state, h_step, cfl_max=config.cfl, dissipation=config.dissipation)
        except BlowupSuspected as exc:
            G = math.inf
            max_G = math.inf
            return outcome("blowup_flagged", str(exc))
        G = continuation_G(state)
        max_G = max(max_G, G)
        if not math.isfinite(G) or G > config.blowup_threshold:
            for sink in sinks:
                sink(state, k, h_step)
            return outcome("blowup_flagged", f"G={G:.6g} exceeds {config.blowup_threshold:g}")
        if k % config.record_every == 0 or k == n_steps:
            for sink in sinks:
                sink(state, k, h_step)
            frac = boundary_energy_fraction(state, boundary_cell_count)
            if frac > boundary_fraction:
                logger.warning("energy reached the outer boundary: fraction %.3g", frac)
                return outcome("boundary_contaminated", f"boundary energy fraction {frac:.3g}")
    return outcome("completed")
