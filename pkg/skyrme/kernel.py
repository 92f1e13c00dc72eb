"""Closed-form auxiliary functions, smooth cutoffs and the quadrature engine.

F~0..F~4 have removable singularities at x = 0. Below the switch radius they
are evaluated from exact Taylor coefficients in u = x**2 (Horner), above it
from the closed forms. Every function of x goes through |x| and x**2 so the
results are bitwise even.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit, roots_legendre

from .errors import DomainError, QuadratureError
from .logging_config import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray, Sequence[float]]
Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

# limits at x = 0, pinned from the exact series
FTILDE_AT_ZERO = (2.0, 4.0 / 3.0, 2.0 / 3.0, 2.0, -4.0 / 3.0)
LEMMA1_SINE_CONSTANT = 1.0 / 6.0
FE1_LOWER_BOUND = 1.0 / 12.0


# ---------------------------------------------------------------------------
# exact Taylor coefficients
# ---------------------------------------------------------------------------

Series = Dict[int, Fraction]


def _sin_series(scale: int, degree: int) -> Series:
    """sin(scale*x) up to x**degree."""
    out: Series = {}
    for k in range(degree // 2 + 1):
        p = 2 * k + 1
        if p > degree:
            break
        out[p] = Fraction((-1) ** k * scale ** p, math.factorial(p))
    return out


def _sin_squared_series(degree: int) -> Series:
    # sin^2 x = (1 - cos 2x) / 2
    out: Series = {}
    for k in range(1, degree // 2 + 1):
        out[2 * k] = Fraction((-1) ** (k + 1) * 2 ** (2 * k - 1), math.factorial(2 * k))
    return out


def _mul(a: Series, b: Series, degree: int) -> Series:
    out: Series = {}
    for pa, ca in a.items():
        for pb, cb in b.items():
            if pa + pb <= degree:
                out[pa + pb] = out.get(pa + pb, Fraction(0)) + ca * cb
    return out


def _combine(*terms: Tuple[Fraction, Series, int]) -> Series:
    """Sum of coeff * series * x**(-shift)."""
    out: Series = {}
    for coeff, series, shift in terms:
        for p, c in series.items():
            out[p - shift] = out.get(p - shift, Fraction(0)) + coeff * c
    return out


def _even_coefficients(series: Series, n_terms: int, name: str) -> np.ndarray:
    for p, c in series.items():
        if c != 0 and (p < 0 or p % 2):
            raise ArithmeticError(f"{name}: unexpected x**{p} term in series")
    return np.array([float(series.get(2 * k, Fraction(0))) for k in range(n_terms)])


def build_series(n_terms: int) -> Tuple[np.ndarray, ...]:
    """Coefficients c_k with F_i(u) = sum_k c_k u**k for i = 0..4."""
    degree = 2 * n_terms + 5
    s2 = _sin_series(2, degree + 5)
    sq = _sin_squared_series(degree + 5)
    sq_s2 = _mul(sq, s2, degree + 5)
    one = {0: Fraction(1)}
    one_ = Fraction(1)
    raw = (
        _combine((Fraction(2), sq, 2)),
        _combine((Fraction(2), one, 2), (-one_, s2, 3)),
        _combine((one_, s2, 3), (-one_, sq_s2, 5)),
        _combine((one_, s2, 1)),
        _combine((Fraction(-4), sq, 4), (Fraction(2), s2, 3)),
    )
    return tuple(_even_coefficients(s, n_terms, f"F{i}") for i, s in enumerate(raw))


def _horner(coeffs: np.ndarray, u: np.ndarray) -> np.ndarray:
    acc = np.full_like(u, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * u + c
    return acc


def _closed_form(i: int, x: np.ndarray) -> np.ndarray:
    s = np.sin(x)
    s2x = np.sin(2.0 * x)
    if i == 0:
        return 2.0 * (s / x) ** 2
    if i == 1:
        return 2.0 / x ** 2 - s2x / x ** 3
    if i == 2:
        return s2x / x ** 3 - s * s * s2x / x ** 5
    if i == 3:
        return s2x / x
    return -4.0 * s * s / x ** 4 + 2.0 * s2x / x ** 3


# ---------------------------------------------------------------------------
# cutoffs
# ---------------------------------------------------------------------------

def smooth_step(t: ArrayLike, derivative: int = 0) -> np.ndarray:
    """C-infinity transition: 0 for t <= 0, 1 for t >= 1.

    Equal to q(t)/(q(t)+q(1-t)) with q(t) = exp(-1/t), written as
    expit(1/(1-t) - 1/t). `derivative` selects d^k/dt^k, k in {0, 1, 2}.
    """
    t = np.asarray(t, dtype=float)
    if derivative == 0:
        out = np.where(t >= 1.0, 1.0, 0.0)
    elif derivative in (1, 2):
        out = np.zeros_like(t)
    else:
        raise DomainError(f"smooth_step derivative must be 0, 1 or 2, got {derivative}")
    inside = (t > 0.0) & (t < 1.0)
    if np.any(inside):
        tc = np.clip(t[inside], 1e-40, None)
        w = 1.0 - tc
        u = 1.0 / w - 1.0 / tc
        sig = expit(u)
        if derivative == 0:
            out[inside] = sig
        else:
            ds = sig * expit(-u)
            du = 1.0 / w ** 2 + 1.0 / tc ** 2
            if derivative == 1:
                out[inside] = ds * du
            else:
                ddu = 2.0 / w ** 3 - 2.0 / tc ** 3
                out[inside] = ds * (1.0 - 2.0 * sig) * du * du + ds * ddu
    return out


def transition(r: ArrayLike, lo: float, hi: float, derivative: int = 0) -> np.ndarray:
    """smooth_step rescaled to rise on [lo, hi], with r-derivatives."""
    width = hi - lo
    return smooth_step((np.asarray(r, dtype=float) - lo) / width, derivative) / width ** derivative


@dataclass(frozen=True)
class CutoffParams:
    """Transition intervals of the cutoffs.

    phi falls from N1*pi to 0 on [phi_lo, phi_hi]; phi_<1 falls from 1 to 0 on
    [near_lo, near_hi] (phi_>1 = 1 - phi_<1); phi_~>1 rises on
    [tail_lo, tail_hi].
    """
    phi_lo: float = 1.0
    phi_hi: float = 2.0
    near_lo: float = 0.5
    near_hi: float = 1.0
    tail_lo: float = 1.0
    tail_hi: float = 2.0


@dataclass(frozen=True)
class KernelTable:
    switch_radius: float = 0.5
    n_terms: int = 20
    cutoff_params: CutoffParams = field(default_factory=CutoffParams)
    series_coeffs: Tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.switch_radius <= 1.0:
            raise DomainError("switch_radius must lie in (0, 1]")
        if self.n_terms < 12:
            raise DomainError("at least 12 series terms are required")
        coeffs = build_series(self.n_terms)
        for c in coeffs:
            c.setflags(write=False)
        object.__setattr__(self, "series_coeffs", coeffs)

    # -- F~ / F -----------------------------------------------------------
    def ftilde(self, i: int, x: ArrayLike) -> np.ndarray:
        _check_index(i)
        x = _finite(x, "x")
        ax = np.abs(x)
        out = np.empty_like(ax)
        small = ax < self.switch_radius
        if np.any(small):
            out[small] = _horner(self.series_coeffs[i], ax[small] * ax[small])
        big = ~small
        if np.any(big):
            out[big] = _closed_form(i, ax[big])
        return out

    def f_of_u(self, i: int, u: ArrayLike) -> np.ndarray:
        """F_i(u) with F~_i(x) = F_i(x**2); u >= 0."""
        _check_index(i)
        u = _finite(u, "u")
        if np.any(u < 0):
            raise DomainError("F_i is evaluated at u = x**2 >= 0")
        out = np.empty_like(u)
        small = u < self.switch_radius ** 2
        if np.any(small):
            out[small] = _horner(self.series_coeffs[i], u[small])
        big = ~small
        if np.any(big):
            out[big] = _closed_form(i, np.sqrt(u[big]))
        return out

    # -- cutoffs ------------------------------------------------------------
    def phi(self, r: ArrayLike, n1: int, derivative: int = 0) -> np.ndarray:
        c = self.cutoff_params
        s = transition(r, c.phi_lo, c.phi_hi, derivative)
        if derivative == 0:
            return n1 * np.pi * (1.0 - s)
        return -n1 * np.pi * s

    def phi_lt1(self, r: ArrayLike) -> np.ndarray:
        c = self.cutoff_params
        return 1.0 - transition(r, c.near_lo, c.near_hi)

    def phi_gt1(self, r: ArrayLike) -> np.ndarray:
        c = self.cutoff_params
        return transition(r, c.near_lo, c.near_hi)

    def phi_gtrsim1(self, r: ArrayLike) -> np.ndarray:
        c = self.cutoff_params
        return transition(r, c.tail_lo, c.tail_hi)

    def phi_lt_r0(self, r: ArrayLike, r0: float) -> np.ndarray:
        if r0 <= 0:
            raise DomainError("r0 must be positive")
        return self.phi_lt1(np.asarray(r, dtype=float) / r0)


DEFAULT_KERNEL = KernelTable()


def _check_index(i: int) -> None:
    if i not in (0, 1, 2, 3, 4):
        raise DomainError(f"function index must be 0..4, got {i}")


def _finite(x: ArrayLike, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _positive_radius(r: ArrayLike) -> np.ndarray:
    arr = _finite(r, "r")
    if np.any(arr <= 0):
        raise DomainError("r must be positive")
    return arr


def _out(arr: np.ndarray) -> Union[float, np.ndarray]:
    return float(arr) if arr.ndim == 0 else arr


def eval_Ftilde(i: int, x: ArrayLike, table: Optional[KernelTable] = None):
    return _out((table or DEFAULT_KERNEL).ftilde(i, x))


def eval_F(i: int, u: ArrayLike, table: Optional[KernelTable] = None):
    return _out((table or DEFAULT_KERNEL).f_of_u(i, u))


# ---------------------------------------------------------------------------
# A, B and friends
# ---------------------------------------------------------------------------

def eval_A1(r: ArrayLike, f: ArrayLike):
    r = _positive_radius(r)
    f = _finite(f, "f")
    return _out(1.0 + 2.0 * np.sin(f) ** 2 / r ** 2)


def eval_B1(r: ArrayLike, y: ArrayLike):
    return eval_A1(r, y)


def b2_excess(r: ArrayLike, y: ArrayLike, table: Optional[KernelTable] = None) -> np.ndarray:
    """B2 - 1 = 2 sin^2(r y) / r^2, smooth down to r = 0."""
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    return y * y * (table or DEFAULT_KERNEL).f_of_u(0, (r * y) ** 2)


def eval_B2(r: ArrayLike, y: ArrayLike, table: Optional[KernelTable] = None):
    r = _finite(r, "r")
    if np.any(r < 0):
        raise DomainError("r must be non-negative")
    return _out(1.0 + b2_excess(r, _finite(y, "y"), table))


def is_reducible(phi_r: ArrayLike) -> np.ndarray:
    """True where phi_r is exactly an integer multiple of pi."""
    phi_r = np.asarray(phi_r, dtype=float)
    return phi_r == np.round(phi_r / np.pi) * np.pi


def b_excess(r: ArrayLike, y: ArrayLike, phi_r: ArrayLike,
             table: Optional[KernelTable] = None) -> np.ndarray:
    """B - 1 = 2 sin^2(r y + phi_r) / r^2 (series form where phi_r = k pi)."""
    r, y, phi_r = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(y, dtype=float),
                                      np.asarray(phi_r, dtype=float))
    reducible = is_reducible(phi_r)
    out = np.empty(r.shape)
    if np.any(reducible):
        out[reducible] = b2_excess(r[reducible], y[reducible], table)
    rest = ~reducible
    if np.any(rest):
        rr = r[rest]
        out[rest] = 2.0 * np.sin(rr * y[rest] + phi_r[rest]) ** 2 / (rr * rr)
    return out


def eval_B(r: ArrayLike, y: ArrayLike, phi_r: ArrayLike, table: Optional[KernelTable] = None):
    r = _positive_radius(r)
    return _out(1.0 + b_excess(r, _finite(y, "y"), _finite(phi_r, "phi_r"), table))


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    order: int = 16
    min_panels: int = 1
    max_panels: int = 2 ** 14
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10


DEFAULT_QUADRATURE = QuadratureSpec()

# points per evaluation chunk; bounds the temporary arrays of batched calls
_CHUNK_POINTS = 2 ** 21


@lru_cache(maxsize=16)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _composite(lo: np.ndarray, hi: np.ndarray, rows: np.ndarray, panels: int,
               integrand: Integrand, order: int) -> np.ndarray:
    x, w = gauss_legendre(order)
    t = ((np.arange(panels)[:, None] + 0.5 * (x[None, :] + 1.0)) / panels).ravel()
    weights = np.tile(w, panels) / (2.0 * panels)
    out = np.empty(rows.size)
    step = max(1, _CHUNK_POINTS // t.size)
    for start in range(0, rows.size, step):
        sub = rows[start:start + step]
        a = lo[sub][:, None]
        width = hi[sub] - lo[sub]
        y = a + width[:, None] * t[None, :]
        vals = np.asarray(integrand(y, sub), dtype=float)
        out[start:start + step] = width * np.sum(vals * weights, axis=1)
    return out


def integrate_batch(lower: ArrayLike, upper: ArrayLike, integrand: Integrand,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> np.ndarray:
    """Signed integrals of `integrand` over many intervals at once.

    `integrand(y, rows)` receives nodes `y` of shape (len(rows), m) and the
    flat indices of the intervals they belong to. Each row doubles its panel
    count until two successive composite rules agree to
    abs_tol + rel_tol*|I|.
    """
    lo, hi = np.broadcast_arrays(np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))
    shape = lo.shape
    lo = np.ascontiguousarray(lo).ravel()
    hi = np.ascontiguousarray(hi).ravel()
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise DomainError("integration limits must be finite")
    result = np.zeros(lo.size)
    active = np.flatnonzero(hi != lo)
    if active.size == 0:
        return result.reshape(shape)
    panels = spec.min_panels
    prev = _composite(lo, hi, active, panels, integrand, spec.order)
    while panels < spec.max_panels:
        panels *= 2
        cur = _composite(lo, hi, active, panels, integrand, spec.order)
        if not np.all(np.isfinite(cur)):
            bad = active[~np.isfinite(cur)]
            raise DomainError(f"integrand is not finite on interval(s) {bad[:5].tolist()}")
        err = np.abs(cur - prev)
        done = err <= spec.abs_tol + spec.rel_tol * np.abs(cur)
        result[active[done]] = cur[done]
        active = active[~done]
        prev = cur[~done]
        if active.size == 0:
            return result.reshape(shape)
        if panels >= 256:
            logger.debug("quadrature: %d interval(s) still refining at %d panels",
                         active.size, panels)
    result[active] = prev
    logger.warning("quadrature: %d interval(s) unconverged at %d panels", active.size, panels)
    raise QuadratureError(
        f"quadrature did not converge on {active.size} interval(s) at {panels} panels",
        best_estimate=result.reshape(shape) if shape else float(result[0]),
        error=err[~done],
        rows=active,
    )


def integrate(a: float, b: float, f: Callable[[np.ndarray], np.ndarray],
              spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    try:
        out = integrate_batch(a, b, lambda y, rows: f(y), spec)
    except QuadratureError as exc:
        exc.best_estimate = float(np.asarray(exc.best_estimate).ravel()[0])
        raise
    return float(out)


def integrate_0_to(g_val: float, f: Callable[[np.ndarray], np.ndarray],
                   spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Signed integral of f over [0, g_val]."""
    return integrate(0.0, g_val, f, spec)


def cumulative_integral(edges: ArrayLike, f: Callable[[np.ndarray], np.ndarray],
                        spec: QuadratureSpec = DEFAULT_QUADRATURE) -> np.ndarray:
    """Antiderivative table: out[k] = integral of f from edges[0] to edges[k]."""
    edges = _finite(edges, "edges")
    pieces = integrate_batch(edges[:-1], edges[1:], lambda y, rows: f(y), spec)
    return np.concatenate(([0.0], np.cumsum(pieces)))


# ---------------------------------------------------------------------------
# G0, G1, G2 and the F(r, beta) scan integral
# ---------------------------------------------------------------------------

def _g2_integrand(r_flat: np.ndarray, table: Optional[KernelTable]) -> Integrand:
    def integrand(y, rows):
        return np.sqrt(1.0 + b2_excess(r_flat[rows][:, None], y, table))
    return integrand


def _g0_integrand(r_flat: np.ndarray, table: Optional[KernelTable]) -> Integrand:
    def integrand(y, rows):
        ex = b2_excess(r_flat[rows][:, None], y, table)
        return np.sqrt(1.0 + ex) * ex
    return integrand


def _rw(r: ArrayLike, w: ArrayLike) -> Tuple[np.ndarray, np.ndarray, Tuple[int, ...]]:
    r = _positive_radius(r)
    w = _finite(w, "w")
    r, w = np.broadcast_arrays(r, w)
    return np.ascontiguousarray(r).ravel(), np.ascontiguousarray(w).ravel(), r.shape


def eval_G2(r: ArrayLike, w: ArrayLike, spec: QuadratureSpec = DEFAULT_QUADRATURE,
            table: Optional[KernelTable] = None):
    """G2(r, w) = integral_0^w B2(r, y)^(1/2) dy."""
    rf, wf, shape = _rw(r, w)
    out = integrate_batch(np.zeros_like(wf), wf, _g2_integrand(rf, table), spec)
    return _out(out.reshape(shape))


def eval_G0(r: ArrayLike, w: ArrayLike, spec: QuadratureSpec = DEFAULT_QUADRATURE,
            table: Optional[KernelTable] = None):
    """G0(r, w) = integral_0^w B2^(1/2) * 2 sin^2(r y)/r^2 dy."""
    rf, wf, shape = _rw(r, w)
    out = integrate_batch(np.zeros_like(wf), wf, _g0_integrand(rf, table), spec)
    return _out(out.reshape(shape))


def eval_G1(r: ArrayLike, z: ArrayLike, spec: QuadratureSpec = DEFAULT_QUADRATURE,
            table: Optional[KernelTable] = None):
    """G1(r, z) = (3/2) integral_0^z G0(r, w) B2(r, w)^(1/2) dw."""
    rf, zf, shape = _rw(r, z)

    def outer(w, rows):
        rr = np.broadcast_to(rf[rows][:, None], w.shape)
        inner = eval_G0(rr, w, spec, table)
        return 1.5 * np.asarray(inner) * np.sqrt(1.0 + b2_excess(rr, w, table))

    out = integrate_batch(np.zeros_like(zf), zf, outer, spec)
    return _out(out.reshape(shape))


@dataclass(frozen=True, eq=False)
class GTable:
    """G0, G1, G2 at fixed r tabulated on monotone edges starting at 0."""
    r: float
    edges: np.ndarray
    g0: np.ndarray
    g1: np.ndarray
    g2: np.ndarray


def g_function_table(r: float, edges: ArrayLike, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                     table: Optional[KernelTable] = None, max_width: float = 0.25) -> GTable:
    """Cumulative G0/G1/G2 along `edges` (edges[0] must be 0).

    G1 uses one Gauss-Legendre rule per sub-interval of width <= max_width
    whose node values of G0 come from inner quadratures.
    """
    r = float(_positive_radius(r))
    edges = _finite(edges, "edges")
    if edges.ndim != 1 or edges.size < 2 or edges[0] != 0.0:
        raise DomainError("edges must be a 1-D array starting at 0")
    widest = float(np.max(np.abs(np.diff(edges))))
    n_sub = max(1, int(math.ceil(widest / max_width)))
    frac = np.arange(n_sub) / n_sub
    fine = np.concatenate(
        ((edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * frac[None, :]).ravel(),
         edges[-1:]))

    def b2(y):
        return 1.0 + b2_excess(r, y, table)

    g2 = cumulative_integral(fine, lambda y: np.sqrt(b2(y)), spec)
    g0 = cumulative_integral(fine, lambda y: np.sqrt(b2(y)) * b2_excess(r, y, table), spec)

    x, w = gauss_legendre(spec.order)
    a = fine[:-1, None]
    width = (fine[1:] - fine[:-1])[:, None]
    nodes = a + 0.5 * width * (x[None, :] + 1.0)
    lows = np.broadcast_to(a, nodes.shape)
    ex_integrand = _g0_integrand(np.full(nodes.size, r), table)
    partial = integrate_batch(lows, nodes, ex_integrand, spec)
    g0_nodes = g0[:-1, None] + partial
    pieces = 1.5 * 0.5 * width[:, 0] * np.sum(w * g0_nodes * np.sqrt(b2(nodes)), axis=1)
    g1 = np.concatenate(([0.0], np.cumsum(pieces)))
    pick = slice(None, None, n_sub)
    return GTable(r=r, edges=edges, g0=g0[pick], g1=g1[pick], g2=g2[pick])


def lemma1_integrand(r: float) -> Callable[[np.ndarray], np.ndarray]:
    def integrand(y):
        s2 = np.sin(y) ** 2
        return np.sqrt(r * r + 2.0 * s2) * (0.75 - s2)
    return integrand


def lemma1_F(r: float, beta: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """F(beta) = integral_0^beta (r^2 + 2 sin^2 y)^(1/2) (3/4 - sin^2 y) dy.

    The integrand has a kink of width ~r at multiples of pi, so the interval is
    split there before integrating.
    """
    if r < 0 or beta < 0 or not (math.isfinite(r) and math.isfinite(beta)):
        raise DomainError("lemma1_F needs finite r >= 0 and beta >= 0")
    if beta == 0.0:
        return 0.0
    marks = np.arange(1, int(beta // np.pi) + 1) * np.pi
    edges = np.concatenate(([0.0], marks[marks < beta], [beta]))
    return float(cumulative_integral(edges, lemma1_integrand(r), spec)[-1])


def lemma1_sine_integral(spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """integral_0^pi sin y (3/4 - sin^2 y) dy, which is exactly 1/6."""
    return integrate(0.0, np.pi, lambda y: np.sin(y) * (0.75 - np.sin(y) ** 2), spec)


# ---------------------------------------------------------------------------
# time-independent part of Phi
# ---------------------------------------------------------------------------

def _b1_rows(r_flat: np.ndarray, power: float) -> Integrand:
    def integrand(y, rows):
        b1 = 1.0 + 2.0 * np.sin(y) ** 2 / r_flat[rows][:, None] ** 2
        return b1 ** power
    return integrand


def tail_integrand(r_flat: np.ndarray) -> Integrand:
    """3 B1^(3/2) + B1^(-1/2) - B1^(-3/2)."""
    def integrand(y, rows):
        b1 = 1.0 + 2.0 * np.sin(y) ** 2 / r_flat[rows][:, None] ** 2
        root = np.sqrt(b1)
        return 3.0 * b1 * root + 1.0 / root - 1.0 / (b1 * root)
    return integrand


@dataclass(frozen=True, eq=False)
class StaticProfile:
    """Phi = integral_0^g B^(1/2) dy + s0, with s0 = (1/r) int_{N1 pi}^{phi} B1^(1/2) + tail.

    `w` is the extra source of the Phi equation coming from the static part:
    (1/(2r)) phi_>1 int_{N1 pi}^{phi} (3 B1^(3/2) + B1^(-1/2) - B1^(-3/2)) dy.
    """
    r: np.ndarray
    s0: np.ndarray
    tail: np.ndarray
    w: np.ndarray


def static_profile(r: ArrayLike, n1: int, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                   table: Optional[KernelTable] = None) -> StaticProfile:
    table = table or DEFAULT_KERNEL
    r = _positive_radius(r)
    r = np.atleast_1d(r).astype(float)
    start = np.full(r.shape, n1 * np.pi)
    phi = table.phi(r, n1)
    gt1 = table.phi_gt1(r)
    head = integrate_batch(start, phi, _b1_rows(r, 0.5), spec) / r
    tail_full = np.zeros_like(r)
    partial = np.zeros_like(r)
    on = gt1 > 0
    if n1 and np.any(on):
        idx = np.flatnonzero(on)
        rr = r[idx]
        tail_full[idx] = integrate_batch(np.zeros(idx.size), start[idx], tail_integrand(rr), spec)
        partial[idx] = integrate_batch(start[idx], phi[idx], tail_integrand(rr), spec)
    tail = gt1 * tail_full / (3.0 * r)
    w = gt1 * partial / (2.0 * r)
    return StaticProfile(r=r, s0=head + tail, tail=tail, w=w)


def graded_edges(a: float, b: float, scale: float, reach: float = np.pi / 2) -> np.ndarray:
    """Breakpoints for integrands with features of width `scale` at multiples of pi.

    Returns sorted edges covering [min(a, b), max(a, b)]: every k*pi inside,
    plus k*pi +- scale * 2**j out to `reach`.
    """
    lo, hi = (a, b) if a <= b else (b, a)
    pts = [lo, hi]
    if scale > 0:
        offsets = []
        step = 0.5 * scale
        while step < reach:
            offsets.append(step)
            step *= 2.0
        offsets = np.array(offsets)
        for k in range(int(math.floor(lo / np.pi)), int(math.ceil(hi / np.pi)) + 1):
            c = k * np.pi
            pts.extend([c, *(c - offsets), *(c + offsets)])
    pts = np.unique(np.array(pts, dtype=float))
    return pts[(pts >= lo) & (pts <= hi)]


def integrate_graded(a: float, b: float, f: Callable[[np.ndarray], np.ndarray], scale: float,
                     spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Signed integral over [a, b] split on `graded_edges`."""
    if a == b:
        return 0.0
    edges = graded_edges(a, b, scale)
    total = float(cumulative_integral(edges, f, spec)[-1])
    return total if a <= b else -total
