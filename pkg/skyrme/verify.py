"""Verification harness: identity residuals, inequality scans, refinement studies.

Every entry of a report names the equation it checks (`eq_tag`) and carries a
machine-readable pass flag. Scans are floating-point evidence, not proofs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PField

from . import dynamics, grid_ops, kernel, transforms
from .config import DataConfig, EvolutionConfig, RunConfig
from .errors import ContractError, QuadratureError, SkyrmeError
from .export import json_text
from .grid_ops import Field, RadialGrid
from .kernel import DEFAULT_QUADRATURE, QuadratureSpec
from .logging_config import get_logger
from .parallel import map_in_threads

logger = get_logger(__name__)

SCAN_NOTE = "floating-point scan, not a proof"
SUITES = ("identities", "inequalities", "convergence", "regularity", "all")
MIN_SCAN_RESOLUTION = 256
IDENTITY_TOL = 1e-9
LEMMA1_TOL = 1e-12
FE1_TOL = 1e-10
COR1_TOL = 1e-10
COERCIVITY_TOL = 1e-8


# ---------------------------------------------------------------------------
# report types
# ---------------------------------------------------------------------------

class CheckEntry(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    check_name: str
    eq_tag: str
    value: Optional[float]
    tol: float
    passed: bool = PField(alias="pass")
    detail: Dict[str, Any] = PField(default_factory=dict)


class VerificationReport(BaseModel):
    suite: str
    entries: List[CheckEntry] = PField(default_factory=list)
    provenance: Dict[str, Any] = PField(default_factory=dict)
    notes: List[str] = PField(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> List[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def merged(self, other: "VerificationReport") -> "VerificationReport":
        provenance = dict(self.provenance)
        provenance.update(other.provenance)
        notes = self.notes + [n for n in other.notes if n not in self.notes]
        return VerificationReport(suite=self.suite, entries=self.entries + other.entries,
                                  provenance=provenance, notes=notes)

    def to_json(self) -> str:
        body = self.model_dump(by_alias=True)
        body["pass"] = self.passed
        return json_text(body)


def _entry(name: str, tag: str, value: float, tol: float, passed: bool, **detail) -> CheckEntry:
    value = None if value is None else float(value)
    return CheckEntry(check_name=name, eq_tag=tag, value=value, tol=tol, passed=bool(passed),
                      detail=detail)


def _spec_provenance(spec: QuadratureSpec) -> Dict[str, Any]:
    return {"quadrature": {"order": spec.order, "abs_tol": spec.abs_tol,
                           "rel_tol": spec.rel_tol, "max_panels": spec.max_panels}}


def render_table(report: VerificationReport) -> str:
    """Fixed-width text table of a report."""
    rows = [("check", "eq", "value", "tol", "status")]
    for e in report.entries:
        value = "n/a" if e.value is None else f"{e.value:.3e}"
        rows.append((e.check_name, e.eq_tag, value, f"{e.tol:.1e}", "PASS" if e.passed else "FAIL"))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    lines.append(f"suite={report.suite} passed={sum(e.passed for e in report.entries)}"
                 f"/{len(report.entries)}")
    lines.extend(f"note: {n}" for n in report.notes)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# sample sets
# ---------------------------------------------------------------------------

def default_identity_samples(n_r: int = 9, n_offsets: int = 7,
                             n1_values: Sequence[int] = (0, 1)) -> List[Tuple[float, float, int]]:
    """(r, f, N1) on log-spaced r in [1e-3, 10] and f - N1 pi in [-3 pi, 3 pi]."""
    out = []
    for r in np.logspace(-3.0, 1.0, n_r):
        for off in np.linspace(-3.0 * np.pi, 3.0 * np.pi, n_offsets):
            for n1 in n1_values:
                out.append((float(r), float(n1 * np.pi + off), int(n1)))
    return out


def random_identity_samples(seed: int, count: int = 16) -> List[Tuple[float, float, int]]:
    rng = np.random.default_rng(seed)
    r = 10.0 ** rng.uniform(-3.0, 1.0, count)
    off = rng.uniform(-3.0 * np.pi, 3.0 * np.pi, count)
    n1 = rng.integers(0, 3, count)
    return [(float(a), float(k * np.pi + b), int(k)) for a, b, k in zip(r, off, n1)]


# ---------------------------------------------------------------------------
# pointwise identities
# ---------------------------------------------------------------------------

_CS = 1e-30  # complex-step size


def _sqrt_b1(rho, z):
    return np.sqrt(1.0 + 2.0 * np.sin(z) ** 2 / rho ** 2)


def _d_rho_sqrt_b1(rho, z):
    b = 1.0 + 2.0 * np.sin(z) ** 2 / rho ** 2
    return -2.0 * np.sin(z) ** 2 / rho ** 3 / np.sqrt(b)


def ge14a_residuals(r: float, f: float) -> Tuple[float, float]:
    """Both cancellation identities, normalized by their largest term."""
    a1 = float(kernel.eval_A1(r, f))
    dz = math.sqrt(a1)
    dzz = float(np.imag(_sqrt_b1(complex(r), complex(f, _CS)))) / _CS
    drz = float(np.imag(_sqrt_b1(complex(r, _CS), complex(f)))) / _CS
    t1 = dz * (-1.0 / a1) * math.sin(2.0 * f) / r ** 2
    t2 = -dz / a1 * 4.0 * math.sin(f) ** 2 / r ** 3
    res1 = abs(dzz + t1) / max(1.0, abs(dzz), abs(t1))
    res2 = abs(-2.0 * drz + t2) / max(1.0, abs(2.0 * drz), abs(t2))
    return res1, res2


def check_identity_ge14a(samples: Iterable[Tuple[float, float]]) -> VerificationReport:
    worst = [0.0, 0.0]
    where = [None, None]
    count = 0
    for r, f in samples:
        res = ge14a_residuals(r, f)
        count += 1
        for k in (0, 1):
            if res[k] > worst[k]:
                worst[k], where[k] = res[k], (r, f)
    entries = [
        _entry("ge14a_zz_identity", "ge14a", worst[0], 1e-10, worst[0] <= 1e-10,
               worst_sample=where[0], samples=count),
        _entry("ge14a_rho_z_identity", "ge14a", worst[1], 1e-10, worst[1] <= 1e-10,
               worst_sample=where[1], samples=count),
    ]
    return VerificationReport(suite="identities", entries=entries)


def _b1(r, y):
    return 1.0 + 2.0 * np.sin(y) ** 2 / r ** 2


def integrand_ge16(r: float):
    def f(y):
        b = _b1(r, y)
        return (1.0 / np.sqrt(b) - 1.0 / (b * np.sqrt(b))) / r ** 2
    return f


def integrand_ge17(r: float):
    def f(y):
        b = _b1(r, y)
        return (2.0 - r * r * (b * b - 1.0)) / (b * np.sqrt(b)) / r ** 2
    return f


def integrand_ge18(r: float):
    def f(y):
        b = _b1(r, y)
        root = np.sqrt(b)
        first = (2.0 * root - 1.0 / (b * root) - 1.0 / root) / r ** 2
        second = 0.5 * (-3.0 * b ** 3 + 5.0 * b * b - b - 1.0) / (b * root)
        return first + second
    return f


def lhs_ge17(r: float, f) -> np.ndarray:
    return np.sin(2.0 * f) / np.sqrt(_b1(r, f)) / r ** 2


def lhs_ge18(r: float, f) -> np.ndarray:
    return np.sin(f) ** 2 * np.sin(2.0 * f) / np.sqrt(_b1(r, f)) / r ** 4


def _scale_along(fn: Callable, r: float, a: float, b: float) -> float:
    ys = np.linspace(a, b, 1025)
    return float(np.max(np.abs(fn(r, ys))))


def ge16_pointwise_residual(r: float, ys: np.ndarray) -> float:
    """Delta_3 in r of B1^(1/2) against (B1^(-1/2) - B1^(-3/2)) / r^2."""
    d1 = _d_rho_sqrt_b1(r, ys)
    d2 = np.imag(_d_rho_sqrt_b1(complex(r, _CS), ys.astype(complex))) / _CS
    lap = d2 + 2.0 / r * d1
    rhs = integrand_ge16(r)(ys)
    scale = np.maximum(1.0, np.maximum(np.abs(d2), np.abs(rhs)))
    return float(np.max(np.abs(lap - rhs) / scale))


def ge20_pointwise_residual(r: float, ys: np.ndarray) -> float:
    """-(ge16 + ge17 + ge18 integrands) against the integrand of the Phi1 equation."""
    b = _b1(r, ys)
    root = np.sqrt(b)
    assembled = -(integrand_ge16(r)(ys) + integrand_ge17(r)(ys) + integrand_ge18(r)(ys))
    target = -2.0 / r ** 2 * root + 0.5 * (3.0 * b * root - 3.0 * root + 1.0 / root - 1.0 / (b * root))
    scale = np.maximum(1.0, np.maximum(np.abs(target), 2.0 * root / r ** 2))
    return float(np.max(np.abs(assembled - target) / scale))


def check_identity_ge17_ge18(samples: Iterable[Tuple[float, float, int]],
                             spec: QuadratureSpec = DEFAULT_QUADRATURE,
                             workers: Optional[int] = None) -> VerificationReport:
    samples = list(samples)

    def one(sample):
        r, f, n1 = sample
        a = n1 * np.pi
        out = {}
        for tag, lhs, integrand, floor in (("ge17", lhs_ge17, integrand_ge17, 1.0 / (r * (1.0 + r))),
                                           ("ge18", lhs_ge18, integrand_ge18, 1.0 / (r ** 3 * (1.0 + r)))):
            try:
                rhs = kernel.integrate_graded(a, f, integrand(r), r, spec)
            except QuadratureError as exc:
                rhs = float(exc.best_estimate)
            left = float(lhs(r, f))
            scale = max(abs(left), _scale_along(lhs, r, a, f), floor)
            out[tag] = abs(left - rhs) / scale
        ys = np.linspace(min(a, f), max(a, f), 257)
        out["ge16"] = ge16_pointwise_residual(r, ys)
        out["ge20"] = ge20_pointwise_residual(r, ys)
        return out

    results = map_in_threads(one, samples, workers)
    entries = []
    for tag, name in (("ge16", "ge16_laplacian_of_B1_root"), ("ge17", "ge17_integral_identity"),
                      ("ge18", "ge18_integral_identity"), ("ge20", "ge20_integrand_assembly")):
        vals = [res[tag] for res in results]
        k = int(np.argmax(vals)) if vals else 0
        worst = float(vals[k]) if vals else 0.0
        entries.append(_entry(name, tag, worst, IDENTITY_TOL, worst <= IDENTITY_TOL,
                              worst_sample=samples[k] if samples else None, samples=len(samples)))
    return VerificationReport(suite="identities", entries=entries, provenance=_spec_provenance(spec))


def he9_residual(r: float, g: float, gt: float, phi_r: float, tau: float = 1e-3,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Richardson time difference of integral_0^g B^(1/2) against A^(1/2) dg/dt."""
    def root_b(y):
        return np.sqrt(1.0 + kernel.b_excess(r, y, phi_r))

    def diff(t):
        return kernel.integrate(g - t * gt, g + t * gt, root_b, spec) / (2.0 * t)

    fd = (4.0 * diff(0.5 * tau) - diff(tau)) / 3.0
    exact = float(np.sqrt(1.0 + kernel.b_excess(r, g, phi_r))) * gt
    return abs(fd - exact) / max(1.0, abs(exact))


def ge62_pointwise_residual(r: float, g: float, n1: int,
                            spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """For r <= 1/2: int_0^g (d_r B^(1/2) + (2/r) B^(1/2) - B^(-1/2)/r) dy = g B(g)^(1/2) / r.

    d_r B^(1/2) by complex step, independent of the closed-form rewriting.
    """
    def root_b(rr, y):
        return np.sqrt(1.0 + 2.0 * np.sin(rr * y + n1 * np.pi) ** 2 / rr ** 2)

    def integrand(y):
        dr = np.imag(root_b(complex(r, _CS), y.astype(complex))) / _CS
        b = root_b(r, y)
        return dr + (2.0 * b - 1.0 / b) / r

    left = kernel.integrate_0_to(g, integrand, spec)
    right = g * float(root_b(r, np.array(g))) / r
    return abs(left - right) / max(1.0, abs(right))


def kernel_self_checks(table: Optional[kernel.KernelTable] = None,
                       spec: QuadratureSpec = DEFAULT_QUADRATURE) -> VerificationReport:
    table = table or kernel.DEFAULT_KERNEL
    xs = table.switch_radius
    band = np.linspace(xs / 2.0, 2.0 * xs, 1000)
    entries = []
    worst = 0.0
    for i in range(5):
        series = kernel._horner(table.series_coeffs[i], band * band)
        closed = kernel._closed_form(i, band)
        worst = max(worst, float(np.max(np.abs(series - closed) / np.maximum(1e-300, np.abs(closed)))))
    entries.append(_entry("ftilde_series_vs_closed_form", "ge7", worst, 1e-13, worst <= 1e-13))

    x = np.concatenate((np.linspace(0.0, 3.0, 301), np.logspace(-8, 2, 101)))
    odd = max(float(np.max(np.abs(table.ftilde(i, x) - table.ftilde(i, -x)))) for i in range(5))
    entries.append(_entry("ftilde_evenness", "ge7", odd, 0.0, odd == 0.0))

    limits = max(abs(float(table.ftilde(i, 0.0)) - kernel.FTILDE_AT_ZERO[i]) for i in range(5))
    entries.append(_entry("ftilde_limits_at_zero", "ge7", limits, 1e-15, limits <= 1e-15))

    r = np.logspace(-3, 1, 40)[:, None]
    y = np.linspace(-10.0, 10.0, 81)[None, :]
    b_min = float(np.min(kernel.eval_B(r, y, np.pi * np.array([[0.0, 1.0, 0.3]]).reshape(3, 1, 1))))
    a_min = float(np.min(kernel.eval_A1(r, y)))
    entries.append(_entry("B_and_A1_at_least_one", "ge37", min(b_min, a_min) - 1.0, 0.0,
                          b_min >= 1.0 and a_min >= 1.0))

    # d/dw G2 by central differences at two step sizes; error ratio ~ 4
    errs = []
    for step in (4e-2, 2e-2):
        worst_fd = 0.0
        for rr in (0.1, 1.0, 3.0):
            for w in (0.3, 1.7, -2.2):
                fd = (kernel.eval_G2(rr, w + step, spec) - kernel.eval_G2(rr, w - step, spec)) / (2 * step)
                exact = float(kernel.eval_B2(rr, w)) ** 0.5
                worst_fd = max(worst_fd, abs(fd - exact))
        errs.append(worst_fd)
    ratio = errs[0] / errs[1] if errs[1] > 0 else math.inf
    entries.append(_entry("G2_derivative_second_order", "ge45", ratio, 0.5,
                           abs(ratio - 4.0) <= 0.5 or errs[0] < 1e-12, errors=errs))

    g2s = kernel.eval_G2(0.2, np.linspace(0.0, 8.0, 65), spec)
    mono = float(np.min(np.diff(g2s)))
    entries.append(_entry("G2_strictly_increasing", "ge45", mono, 0.0, mono > 0.0))

    closed = math.sqrt(3.0) / 2.0 + math.asinh(math.sqrt(2.0)) / (2.0 * math.sqrt(2.0))
    got = kernel.integrate_0_to(1.0, lambda t: np.sqrt(1.0 + 2.0 * t * t), spec)
    entries.append(_entry("quadrature_antiderivative", "ge38", abs(got - closed), 1e-12,
                          abs(got - closed) <= 1e-12))

    sine = kernel.lemma1_sine_integral(spec)
    err = abs(sine - kernel.LEMMA1_SINE_CONSTANT)
    entries.append(_entry("lemma1_sine_constant", "Lemma1", err, 1e-12, err <= 1e-12, integral=sine))
    return VerificationReport(suite="identities", entries=entries, provenance=_spec_provenance(spec))


def identities_suite(spec: QuadratureSpec = DEFAULT_QUADRATURE, seed: int = 0,
                     workers: Optional[int] = None) -> VerificationReport:
    samples = default_identity_samples() + random_identity_samples(seed)
    report = kernel_self_checks(spec=spec)
    report = report.merged(check_identity_ge14a([(r, f) for r, f, _ in samples]))
    report = report.merged(check_identity_ge17_ge18(samples, spec, workers))

    he9_samples = [(r, g, gt, n1) for r in (1e-3, 0.05, 0.3, 1.5, 5.0)
                   for g in (-2.0, 0.4, 3.0) for gt in (-1.0, 0.7) for n1 in (0, 1)]

    def he9_one(s):
        r, g, gt, n1 = s
        phi_r = float(kernel.DEFAULT_KERNEL.phi(r, n1))
        return he9_residual(r, g, gt, phi_r, spec=spec)

    he9 = map_in_threads(he9_one, he9_samples, workers)
    worst = float(max(he9))
    report.entries.append(_entry("he9_time_derivative_of_Phi", "he9", worst, IDENTITY_TOL,
                                 worst <= IDENTITY_TOL, samples=len(he9_samples)))

    ge62_samples = [(r, g, n1) for r in (1e-3, 0.01, 0.1, 0.5) for g in (-3.0, -0.5, 0.8, 4.0)
                    for n1 in (0, 1)]
    ge62 = map_in_threads(lambda s: ge62_pointwise_residual(*s, spec=spec), ge62_samples, workers)
    worst = float(max(ge62))
    report.entries.append(_entry("ge62_radial_identity", "ge62", worst, IDENTITY_TOL,
                                 worst <= IDENTITY_TOL, samples=len(ge62_samples)))
    report.provenance["seed"] = seed
    report.provenance["identity_samples"] = len(samples)
    return report


# ---------------------------------------------------------------------------
# Phi equation residual
# ---------------------------------------------------------------------------

REGIONS = (("r<0.5", 0.0, 0.5), ("0.5<=r<1", 0.5, 1.0), ("1<=r<2", 1.0, 2.0), ("r>=2", 2.0, math.inf))


@dataclass(frozen=True, eq=False)
class ResidualReport:
    residual: Field
    l2: float
    linf: float
    regions: Dict[str, float]


def residual_phi_equation(states: Sequence[dynamics.SimState],
                          spec: QuadratureSpec = DEFAULT_QUADRATURE) -> ResidualReport:
    """box_5 Phi + (3/2) Phi - G3 - (static source) at the middle of three states.

    The static source is (3/2) T - Delta_5 T + W with T, W from the
    time-independent part of Phi.
    """
    prev, mid, nxt = states
    dt1 = mid.t - prev.t
    dt2 = nxt.t - mid.t
    if dt1 <= 0 or abs(dt1 - dt2) > 1e-12 * max(1.0, abs(dt1)):
        raise ContractError("residual_phi_equation needs three equally spaced times")
    grid = mid.grid
    phis = [transforms.compute_Phi(s, spec).values for s in (prev, mid, nxt)]
    static = transforms.static_profile(mid, spec)
    tail = Field(static.tail)
    dtt = (phis[2] - 2.0 * phis[1] + phis[0]) / (dt1 * dt2)
    lap_phi = grid_ops.laplacian(Field(phis[1]), grid).values
    lap_tail = grid_ops.laplacian(tail, grid).values
    g3 = transforms.g3_integral(mid, spec).values
    res = dtt - lap_phi + 1.5 * phis[1] - g3 - 1.5 * static.tail + lap_tail - static.w
    field = Field(res)
    regions = {name: grid_ops.regional_l2(field, grid, lo, hi) for name, lo, hi in REGIONS}
    return ResidualReport(residual=field, l2=grid_ops.norm_L2(field, grid),
                          linf=float(np.max(np.abs(res))), regions=regions)


def residual_around(state: dynamics.SimState, dt: float,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> ResidualReport:
    before = dynamics.step(state, -dt)
    after = dynamics.step(state, dt)
    return residual_phi_equation((before, state, after), spec)


# ---------------------------------------------------------------------------
# F(r, beta) sign scan and the small-r bound on G1
# ---------------------------------------------------------------------------

class Lemma1Scan(BaseModel):
    r0: float
    min_value: float
    argmin: Tuple[float, float]
    r1: float
    fe1_min: float
    increment_min: float
    extrema_ok: bool
    passed: bool
    r_max: float
    beta_max: float
    resolution: int
    r_samples: int
    note: str = SCAN_NOTE

    def report(self) -> VerificationReport:
        entries = [
            _entry("lemma1_scan_minimum", "Lemma1", self.min_value, LEMMA1_TOL,
                   self.min_value >= -LEMMA1_TOL and self.r0 > 0, r0=self.r0, argmin=list(self.argmin)),
            _entry("lemma1_fe1_bound", "fe1", self.fe1_min - kernel.FE1_LOWER_BOUND, FE1_TOL,
                   self.r1 > 0 and self.fe1_min >= kernel.FE1_LOWER_BOUND - FE1_TOL, r1=self.r1),
            _entry("lemma1_period_increment", "fe1", self.increment_min - kernel.FE1_LOWER_BOUND,
                   FE1_TOL, self.increment_min >= kernel.FE1_LOWER_BOUND - FE1_TOL),
            _entry("lemma1_critical_points", "Lemma1", 0.0 if self.extrema_ok else 1.0, 0.0,
                   self.extrema_ok),
        ]
        return VerificationReport(
            suite="inequalities", entries=entries, notes=[SCAN_NOTE],
            provenance={"lemma1": {"r_max": self.r_max, "beta_max": self.beta_max,
                                   "resolution": self.resolution, "r_samples": self.r_samples}})


def lemma1_scan(r_max: float = 0.5, beta_max: float = 20.0 * np.pi,
                resolution: int = MIN_SCAN_RESOLUTION, r_samples: int = 64,
                spec: QuadratureSpec = DEFAULT_QUADRATURE,
                workers: Optional[int] = None) -> Lemma1Scan:
    """Tabulate F(r, beta) on (0, r_max] x [0, beta_max], resolution samples per pi."""
    if resolution < MIN_SCAN_RESOLUTION:
        raise ContractError(f"resolution must be at least {MIN_SCAN_RESOLUTION} per pi")
    if r_max <= 0 or beta_max < np.pi or r_samples < 1:
        raise ContractError("need r_max > 0, beta_max >= pi and r_samples >= 1")
    spacing = np.pi / resolution
    n_beta = int(math.ceil(beta_max / spacing - 1e-9))
    beta = np.arange(n_beta + 1) * spacing
    r_values = r_max * np.arange(1, r_samples + 1) / r_samples

    rows = map_in_threads(lambda r: kernel.cumulative_integral(beta, kernel.lemma1_integrand(r), spec),
                          list(r_values), workers)
    F = np.vstack(rows)

    row_min = F.min(axis=1)
    ok = (row_min >= -LEMMA1_TOL) & (r_values <= 0.5)
    prefix = int(np.argmin(ok)) if not np.all(ok) else ok.size
    r0 = float(r_values[prefix - 1]) if prefix > 0 else 0.0
    k = int(np.argmin(F))
    i, j = np.unravel_index(k, F.shape)

    at_pi = F[:, resolution]
    fe1_ok = at_pi >= kernel.FE1_LOWER_BOUND - FE1_TOL
    n1 = int(np.argmin(fe1_ok)) if not np.all(fe1_ok) else fe1_ok.size
    r1 = float(r_values[n1 - 1]) if n1 > 0 else 0.0
    fe1_min = float(at_pi[:n1].min()) if n1 > 0 else float(at_pi.min())
    increments = F[:, resolution:] - F[:, :-resolution]
    inc_min = float(increments[:max(n1, 1)].min())

    d = np.diff(F, axis=1)
    turning = np.flatnonzero(np.any(d[:, :-1] * d[:, 1:] < 0, axis=0)) + 1
    phase = np.mod(beta[turning], np.pi)
    near = np.minimum(np.abs(phase - np.pi / 3.0), np.abs(phase - 2.0 * np.pi / 3.0))
    extrema_ok = bool(np.all(near <= spacing * 1.0001))

    passed = (r0 > 0 and float(F[:prefix].min()) >= -LEMMA1_TOL and fe1_min >= kernel.FE1_LOWER_BOUND - FE1_TOL
              and extrema_ok and inc_min >= kernel.FE1_LOWER_BOUND - FE1_TOL)
    logger.info("lemma1 scan: r0=%.6g min=%.3e r1=%.6g extrema_ok=%s", r0, F.min(), r1, extrema_ok)
    return Lemma1Scan(r0=r0, min_value=float(F.min()), argmin=(float(r_values[i]), float(beta[j])),
                      r1=r1, fe1_min=fe1_min, increment_min=inc_min, extrema_ok=extrema_ok,
                      passed=bool(passed), r_max=r_max, beta_max=float(beta[-1]),
                      resolution=resolution, r_samples=r_samples)


def corollary1_scan(r0: float, z_max: float = 8.0 * np.pi, resolution: int = 512,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE,
                    workers: Optional[int] = None) -> VerificationReport:
    """(9/8) G2^2 / r^2 - |G1| on an r0-by-[-z_max, z_max] grid of resolution^2 cells."""
    if r0 <= 0:
        raise ContractError("r0 must be positive")
    if resolution < 2 or resolution % 2:
        raise ContractError("resolution must be an even number >= 2")
    r_values = r0 * np.arange(1, resolution + 1) / resolution
    z_pos = np.linspace(0.0, z_max, resolution // 2 + 1)

    def one(r):
        pos = kernel.g_function_table(r, z_pos, spec)
        neg = kernel.g_function_table(r, -z_pos, spec)
        out = []
        for t in (pos, neg):
            scale = 1.125 * t.g2 ** 2 / r ** 2
            out.append(((scale - np.abs(t.g1)) / np.maximum(1.0, scale), scale - np.abs(t.g1), scale))
        return out

    rows = map_in_threads(one, list(r_values), workers)
    norm_min = min(float(min(p[0].min(), n[0].min())) for p, n in rows)
    raw_min = min(float(min(p[1].min(), n[1].min())) for p, n in rows)
    even = max(float(np.max(np.abs(p[1] - n[1]) / np.maximum(1.0, p[2]))) for p, n in rows)
    z0 = max(max(abs(float(p[1][0])), abs(float(n[1][0]))) for p, n in rows)
    entries = [
        _entry("cor1_margin", "ge46", norm_min, COR1_TOL, norm_min >= -COR1_TOL,
               raw_min=raw_min, constant=9.0 / 8.0),
        _entry("cor1_evenness_in_z", "ge46", even, 1e-8, even <= 1e-8),
        _entry("cor1_zero_row", "ge46", z0, 0.0, z0 == 0.0),
    ]
    logger.info("corollary1 scan: r0=%.6g min normalized margin=%.3e", r0, norm_min)
    return VerificationReport(
        suite="inequalities", entries=entries, notes=[SCAN_NOTE],
        provenance={"corollary1": {"r0": r0, "z_max": z_max, "resolution": resolution},
                    **_spec_provenance(spec)})


# ---------------------------------------------------------------------------
# Hardy and coercivity
# ---------------------------------------------------------------------------

def hardy_family_profile(r: np.ndarray, n: int, lo: float = 1.0, hi: float = 2.0) -> np.ndarray:
    """r^(-3/2 + 1/n), smoothly cut off on [lo, hi]."""
    return r ** (-1.5 + 1.0 / n) * (1.0 - kernel.transition(r, lo, hi))


def hardy_family_exact_ratio(n: int, lo: float = 1.0, hi: float = 2.0,
                             spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Continuum Hardy ratio of `hardy_family_profile` on R^5 (only [lo, hi] needs quadrature)."""
    a = 1.5 - 1.0 / n
    p = 2.0 / n

    def chi(r):
        return 1.0 - kernel.transition(r, lo, hi)

    def dchi(r):
        return -kernel.transition(r, lo, hi, 1)

    inner_num = lo ** p / p
    J = kernel.integrate(lo, hi, lambda r: r ** (p - 1.0) * chi(r) ** 2, spec)
    K = kernel.integrate(lo, hi, lambda r: r ** (1.0 + p) * dchi(r) ** 2, spec)
    M = kernel.integrate(lo, hi, lambda r: r ** p * chi(r) * dchi(r), spec)
    num = inner_num + J
    den = a * a * (inner_num + J) - 2.0 * a * M + K
    return num / den


def hardy_family_check(n_grid: Sequence[int] = (2, 4, 8),
                       n_oracle: Sequence[int] = (2, 4, 8, 16, 32, 64, 128),
                       N: int = 4096, R: float = 4.0,
                       spec: QuadratureSpec = DEFAULT_QUADRATURE) -> VerificationReport:
    grid = RadialGrid(N, R, 5)
    bound = grid_ops.hardy_constant(5)
    discrete = [grid_ops.hardy_ratio(hardy_family_profile(grid.r, n), grid) for n in n_grid]
    exact = [hardy_family_exact_ratio(n, spec=spec) for n in n_oracle]
    gauss5 = grid_ops.hardy_ratio(np.exp(-grid.r ** 2), grid)
    grid3 = grid.with_dimension(3)
    gauss3 = grid_ops.hardy_ratio(np.exp(-grid3.r ** 2), grid3)
    top = max(discrete + exact + [gauss5])
    entries = [
        _entry("hardy_bound", "lem_Hardy", top - bound, 10 * grid.h, top <= bound + 10 * grid.h,
               discrete=discrete, gaussian=gauss5),
        _entry("hardy_bound_d3", "lem_Hardy", gauss3 - 4.0, 10 * grid.h, gauss3 <= 4.0 + 10 * grid.h),
        _entry("hardy_family_monotone_grid", "lem_Hardy", float(np.min(np.diff(discrete))), 0.0,
               bool(np.all(np.diff(discrete) > 0)), n=list(n_grid), ratios=discrete),
        _entry("hardy_family_monotone_exact", "lem_Hardy", float(np.min(np.diff(exact))), 0.0,
               bool(np.all(np.diff(exact) > 0)), n=list(n_oracle), ratios=exact),
        _entry("hardy_family_sharpness", "lem_Hardy", exact[-1], 0.42, exact[-1] > 0.42,
               n=int(n_oracle[-1]), gap=bound - exact[-1]),
    ]
    return VerificationReport(suite="inequalities", entries=entries,
                              provenance={"hardy_grid": {"N": N, "R": R}})


def gaussian_coercivity_exact() -> float:
    """integral (|grad e^{-r^2}|^2 - (9/4) e^{-2 r^2} / r^2) dx over R^5."""
    omega = grid_ops.sphere_area(5)

    def moment(k):  # integral_0^inf r^(2k) e^(-2 r^2) dr
        return math.gamma(k + 0.5) / (2.0 * 2.0 ** (k + 0.5))

    return omega * (4.0 * moment(3) - 2.25 * moment(1))


def coercivity_samples(N: int = 2 ** 15, R: float = 8.0) -> VerificationReport:
    grid = RadialGrid(N, R, 5)
    r = grid.r
    fields = {
        "gaussian": np.exp(-r ** 2),
        "shell": dynamics.windowed_gaussian(r, 1.0, 2.0, 0.5),
        "r2_gaussian": r ** 2 * np.exp(-r ** 2),
        "bump": 1.0 - kernel.transition(r, 0.5, 3.0),
    }
    worst = math.inf
    for name, v in fields.items():
        c = grid_ops.coercivity_functional(v, grid)
        worst = min(worst, c / grid_ops.dirichlet_energy(v, grid))
    exact = gaussian_coercivity_exact()
    got = grid_ops.coercivity_functional(fields["gaussian"], grid)
    rel = abs(got - exact) / abs(exact)
    return VerificationReport(suite="inequalities", entries=[
        _entry("coercivity_sampled_fields", "ge56", worst, COERCIVITY_TOL, worst >= -COERCIVITY_TOL,
               fields=sorted(fields)),
        _entry("coercivity_gaussian_oracle", "ge55", rel, 1e-6, rel <= 1e-6, exact=exact),
    ], provenance={"coercivity_grid": {"N": N, "R": R}})


def inequalities_suite(spec: QuadratureSpec = DEFAULT_QUADRATURE, lemma1_resolution: int = 256,
                       lemma1_r_samples: int = 64, corollary_resolution: int = 512,
                       workers: Optional[int] = None) -> VerificationReport:
    scan = lemma1_scan(resolution=lemma1_resolution, r_samples=lemma1_r_samples, spec=spec,
                       workers=workers)
    report = scan.report()
    if scan.r0 > 0:
        report = report.merged(corollary1_scan(scan.r0, resolution=corollary_resolution, spec=spec,
                                               workers=workers))
    report = report.merged(hardy_family_check(spec=spec))
    report = report.merged(coercivity_samples())
    report.provenance["r0"] = scan.r0
    return report


# ---------------------------------------------------------------------------
# refinement studies
# ---------------------------------------------------------------------------

PROBLEMS: Dict[str, DataConfig] = {
    "zero": DataConfig(a=0.0),
    "tiny": DataConfig(a=0.01),
    "large": DataConfig(a=5.0),
}

# The a=5 front reaches r < 1 near t = 0.6; the suite stops that study before it.
STUDY_T_END: Dict[str, float] = {"large": 0.5}


class ConvergenceResult(BaseModel):
    problem: str
    n_values: List[int]
    errors: Dict[str, List[float]]
    orders: Dict[str, Optional[float]]
    status: Dict[str, str]


def observed_order(errors: Sequence[float]) -> Tuple[Optional[float], str]:
    """Least-squares order of errors on grids halved at each level."""
    e = np.asarray(errors, dtype=float)
    if e.size < 2:
        return None, "inconclusive"
    if np.any(e == 0.0):
        return None, "inconclusive-by-zero"
    if not np.all(np.isfinite(e)) or np.any(np.diff(e) >= 0):
        return None, "inconclusive"
    slope = np.polyfit(np.arange(e.size), np.log2(e), 1)[0]
    return float(-slope), "ok"


def _level(args) -> Dict[str, Any]:
    n, R, data, t_end, cfl, n1, spec = args
    grid = RadialGrid(n, R, 5)
    state = dynamics.initial_state(grid, data, dynamics.ModelParams(N1=n1))
    e0 = transforms.skyrme_energy(state)
    evo = EvolutionConfig(cfl=cfl, t_end=t_end, record_every=10 ** 9, blowup_threshold=1e12)
    final: List[dynamics.SimState] = []
    outcome = dynamics.run(state, evo, sinks=[lambda s, k, dt: final.append(s)])
    last = final[-1]
    dt = cfl * grid.h
    before = dynamics.step(last, -dt)
    after = dynamics.step(last, dt)
    res = residual_phi_equation((before, last, after), spec)
    fd = (transforms.compute_Phi(after, spec).values - transforms.compute_Phi(before, spec).values) / (2 * dt)
    he9 = float(np.max(np.abs(fd - transforms.compute_dtPhi(last).values)))
    e1 = transforms.skyrme_energy(last)
    return {"g": last.g.values, "drift": abs(e1 - e0) / e0 if e0 > 0 else 0.0,
            "residual": res.l2, "he9": he9, "status": outcome.status}


def convergence_study(problem: str, levels: int = 3, base_n: int = 1024, R: float = 16.0,
                      t_end: float = 1.0, cfl: float = 0.25, n1: int = 0,
                      spec: QuadratureSpec = DEFAULT_QUADRATURE,
                      workers: Optional[int] = None) -> ConvergenceResult:
    if problem not in PROBLEMS:
        raise ContractError(f"unknown problem '{problem}', expected one of {sorted(PROBLEMS)}")
    if levels < 3:
        raise ContractError("a refinement study needs at least 3 levels")
    data = PROBLEMS[problem]
    n_values = [base_n * 2 ** k for k in range(levels)]
    out = map_in_threads(_level, [(n, R, data, t_end, cfl, n1, spec) for n in n_values], workers)
    self_err = []
    for k in range(levels - 1):
        coarse = RadialGrid(n_values[k], R, 5)
        diff = out[k]["g"] - grid_ops.restrict(out[k + 1]["g"])
        self_err.append(grid_ops.norm_L2(diff, coarse))
    errors = {
        "solution": self_err,
        "energy_drift": [o["drift"] for o in out],
        "residual": [o["residual"] for o in out],
        "he9": [o["he9"] for o in out],
    }
    orders, status = {}, {}
    for name, vals in errors.items():
        orders[name], status[name] = observed_order(vals)
        if status[name] == "inconclusive":
            logger.warning("convergence %s/%s inconclusive: %s", problem, name, vals)
    return ConvergenceResult(problem=problem, n_values=n_values, errors=errors, orders=orders,
                             status=status)


def _order_entry(result: ConvergenceResult, metric: str, tag: str, target: float,
                 band: float) -> CheckEntry:
    order, status = result.orders[metric], result.status[metric]
    if result.problem == "zero":
        # zero data must stay at round-off on every level
        ok = max(result.errors[metric]) <= 1e-12
    else:
        ok = status != "ok" or abs(order - target) <= band
    return _entry(f"order_{metric}_{result.problem}", tag, order, band, ok, status=status,
                  errors=result.errors[metric], n=result.n_values)


def energy_conservation_check(config: Optional[RunConfig] = None) -> CheckEntry:
    config = config or RunConfig()
    grid = RadialGrid(config.grid.N, config.grid.R, 5)
    params = dynamics.ModelParams(N1=config.model.N1)
    state = dynamics.initial_state(grid, config.data, params)
    energies: List[float] = []
    outcome = dynamics.run(state, config.evolution,
                           sinks=[lambda s, k, dt: energies.append(transforms.skyrme_energy(s))],
                           boundary_fraction=config.diagnostics.boundary_fraction)
    e0 = energies[0]
    drift = max(abs(e - e0) for e in energies) / e0 if e0 > 0 else 0.0
    return _entry("energy_drift_default_run", "ge11", drift, 1e-6,
                  outcome.status == "completed" and drift <= 1e-6, outcome=outcome.status,
                  N=grid.N, t_end=config.evolution.t_end)


def convergence_suite(spec: QuadratureSpec = DEFAULT_QUADRATURE, base_n: int = 1024,
                      t_end: float = 1.0, energy_config: Optional[RunConfig] = None,
                      workers: Optional[int] = None) -> VerificationReport:
    entries = []
    horizons = {}
    for problem, band in (("zero", 0.0), ("tiny", 0.2), ("large", 0.3)):
        horizons[problem] = min(t_end, STUDY_T_END.get(problem, t_end))
        result = convergence_study(problem, base_n=base_n, t_end=horizons[problem], spec=spec,
                                   workers=workers)
        entries.append(_order_entry(result, "residual", "ge36", 2.0, band))
        entries.append(_order_entry(result, "solution", "ge8", 2.0, band))
        for metric, tag in (("energy_drift", "ge11"), ("he9", "he9")):
            order, status = result.orders[metric], result.status[metric]
            entries.append(_entry(f"order_{metric}_{problem}", tag, order, 0.0, True, status=status,
                                  errors=result.errors[metric], n=result.n_values))
    entries.append(energy_conservation_check(energy_config))
    return VerificationReport(suite="convergence", entries=entries,
                              provenance={"base_n": base_n, "t_end": horizons, **_spec_provenance(spec)})


def regularity_sweep(amplitudes: Sequence[float] = (1.0, 5.0, 10.0), windings: Sequence[int] = (0, 1),
                     N: int = 4096, R: float = 64.0, t_end: float = 50.0, r0: float = 0.25,
                     record_every: int = 256, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                     workers: Optional[int] = None) -> VerificationReport:
    """Large-data runs must finish unflagged with coercive Phi; the contrast run is reported only."""
    grid = RadialGrid(N, R, 5)
    cases = [(a, n1, False) for a in amplitudes for n1 in windings] + [(max(amplitudes), 0, True)]

    def one(case):
        a, n1, contrast = case
        state = dynamics.initial_state(grid, DataConfig(a=a), dynamics.ModelParams(N1=n1, contrast=contrast))
        worst = [math.inf]

        def sink(s, k, dt):
            if contrast:
                return
            phi = transforms.compute_Phi(s, spec)
            d = grid_ops.dirichlet_energy(phi, grid)
            c = grid_ops.coercivity_functional(phi, grid)
            worst[0] = min(worst[0], c / d if d > 0 else 0.0)

        evo = EvolutionConfig(t_end=t_end, record_every=record_every)
        outcome = dynamics.run(state, evo, sinks=[sink])
        return outcome, worst[0]

    results = map_in_threads(one, cases, workers)
    threshold = EvolutionConfig().blowup_threshold
    entries = []
    for (a, n1, contrast), (outcome, worst) in zip(cases, results):
        if contrast:
            entries.append(_entry(f"contrast_a{a:g}", "ge8", outcome.max_G, 0.0, True,
                                  outcome=outcome.status, note="quasilinear terms disabled for r<1"))
            continue
        entries.append(_entry(f"regularity_a{a:g}_N1{n1}", "ge10", outcome.max_G, threshold,
                              outcome.status == "completed", outcome=outcome.status))
        entries.append(_entry(f"coercivity_a{a:g}_N1{n1}", "ge56", worst, COERCIVITY_TOL,
                              worst >= -COERCIVITY_TOL))
    return VerificationReport(suite="regularity", entries=entries,
                              provenance={"N": N, "R": R, "t_end": t_end})


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

class SuiteSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    lemma1_resolution: int = PField(256, ge=MIN_SCAN_RESOLUTION)
    lemma1_r_samples: int = PField(64, ge=1)
    corollary_resolution: int = PField(512, ge=2)
    convergence_base_n: int = PField(1024, ge=64)
    convergence_t_end: float = PField(1.0, gt=0)
    workers: Optional[int] = PField(None, ge=1)


def run_suite(name: str, settings: Optional[SuiteSettings] = None,
              spec: QuadratureSpec = DEFAULT_QUADRATURE) -> VerificationReport:
    if name not in SUITES:
        raise ContractError(f"unknown suite '{name}', expected one of {', '.join(SUITES)}")
    s = settings or SuiteSettings()
    logger.info("verify suite '%s' started", name)
    parts: List[VerificationReport] = []
    try:
        if name in ("identities", "all"):
            parts.append(identities_suite(spec, s.seed, s.workers))
        if name in ("inequalities", "all"):
            parts.append(inequalities_suite(spec, s.lemma1_resolution, s.lemma1_r_samples,
                                            s.corollary_resolution, s.workers))
        if name in ("convergence", "all"):
            parts.append(convergence_suite(spec, s.convergence_base_n, s.convergence_t_end,
                                           workers=s.workers))
        if name == "regularity":
            parts.append(regularity_sweep(spec=spec, workers=s.workers))
    except SkyrmeError as exc:
        logger.error("verify suite '%s' aborted: %s", name, exc)
        parts.append(VerificationReport(suite=name, entries=[
            _entry("suite_aborted", "n/a", None, 0.0, False, error=str(exc))]))
    report = VerificationReport(suite=name)
    for part in parts:
        report = report.merged(part)
    report.provenance.update(_spec_provenance(spec))
    report.provenance["settings"] = s.model_dump()
    logger.info("verify suite '%s': %d/%d passed", name,
                sum(e.passed for e in report.entries), len(report.entries))
    return report
