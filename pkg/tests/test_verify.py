import json
import math

import numpy as np
import pytest

from skyrme import grid_ops, verify
from skyrme.dynamics import initial_state
from skyrme.config import DataConfig
from skyrme.errors import ContractError
from skyrme.grid_ops import RadialGrid


SAMPLES = [(1e-3, 0.7, 0), (0.05, -2.0, 0), (1.0, np.pi + 1.3, 1), (7.0, -5.0, 0), (0.3, 2 * np.pi - 0.4, 2)]


@pytest.mark.parametrize("r,f,n1", SAMPLES)
def test_ge14a_cancellations(r, f, n1):
    res = verify.ge14a_residuals(r, f)
    assert max(res) <= 1e-10


@pytest.mark.parametrize("r", [0.01, 1.0, 5.0])
def test_pointwise_integrand_identities(r):
    ys = np.linspace(-3.0 * np.pi, 3.0 * np.pi, 101)
    assert verify.ge16_pointwise_residual(r, ys) <= 1e-9
    assert verify.ge20_pointwise_residual(r, ys) <= 1e-12


def test_ge17_ge18_integral_identities():
    report = verify.check_identity_ge17_ge18(SAMPLES, workers=1)
    assert {e.eq_tag for e in report.entries} == {"ge16", "ge17", "ge18", "ge20"}
    assert report.passed, [e.model_dump() for e in report.failures()]


@pytest.mark.parametrize("r,n1", [(1e-3, 1), (1e-3, 2), (0.05, 1), (10.0, 3)])
def test_ge17_ge18_empty_range_is_not_rounding_noise(r, n1):
    report = verify.check_identity_ge17_ge18([(r, n1 * np.pi, n1)], workers=1)
    for entry in report.entries:
        if entry.eq_tag in ("ge17", "ge18"):
            assert entry.value <= 1e-12, entry.check_name


def test_default_identity_samples_pass_ge17_ge18():
    report = verify.check_identity_ge17_ge18(verify.default_identity_samples(), workers=1)
    assert report.passed, [(e.check_name, e.value, e.detail.get("worst_sample")) for e in report.failures()]


@pytest.mark.parametrize("r,g,gt,phi_r", [(0.01, 1.5, 0.7, 0.0), (0.8, -2.0, -1.0, np.pi), (3.0, 0.4, 0.3, 0.5)])
def test_he9_time_derivative(r, g, gt, phi_r):
    assert verify.he9_residual(r, g, gt, phi_r) <= 1e-9


@pytest.mark.parametrize("r,g,n1", [(1e-3, 0.8, 0), (0.1, -3.0, 1), (0.5, 4.0, 0)])
def test_ge62_radial_identity(r, g, n1):
    assert verify.ge62_pointwise_residual(r, g, n1) <= 1e-9


def test_kernel_self_checks_pass():
    report = verify.kernel_self_checks()
    assert report.passed, [e.check_name for e in report.failures()]
    sine = next(e for e in report.entries if e.check_name == "lemma1_sine_constant")
    assert sine.detail["integral"] == pytest.approx(1.0 / 6.0, abs=1e-12)


def test_observed_order():
    order, status = verify.observed_order([1e-2, 2.5e-3, 6.25e-4])
    assert status == "ok" and order == pytest.approx(2.0)
    assert verify.observed_order([0.0, 0.0, 0.0]) == (None, "inconclusive-by-zero")
    assert verify.observed_order([1e-3, 2e-3, 1e-4])[1] == "inconclusive"


def test_hardy_family_oracle_approaches_the_constant():
    ratios = [verify.hardy_family_exact_ratio(n) for n in (2, 8, 32, 128)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert 0.42 < ratios[-1] < 4.0 / 9.0


def test_hardy_family_on_grid_matches_oracle():
    grid = RadialGrid(4096, 4.0, 5)
    discrete = grid_ops.hardy_ratio(verify.hardy_family_profile(grid.r, 2), grid)
    assert discrete == pytest.approx(verify.hardy_family_exact_ratio(2), rel=1e-2)


def test_gaussian_coercivity_oracle():
    grid = RadialGrid(8192, 8.0, 5)
    got = grid_ops.coercivity_functional(np.exp(-grid.r ** 2), grid)
    assert got == pytest.approx(verify.gaussian_coercivity_exact(), rel=1e-4)


def test_lemma1_scan_small():
    scan = verify.lemma1_scan(beta_max=2 * math.pi, r_samples=4, workers=1)
    assert scan.r0 == pytest.approx(0.5)
    assert scan.passed and scan.extrema_ok
    assert scan.min_value >= -1e-12
    assert scan.fe1_min >= 1.0 / 12.0
    report = scan.report()
    assert report.passed and verify.SCAN_NOTE in report.notes


def test_lemma1_scan_rejects_coarse_resolution():
    with pytest.raises(ContractError):
        verify.lemma1_scan(resolution=128)


def test_corollary1_scan_small():
    report = verify.corollary1_scan(0.25, z_max=2 * math.pi, resolution=8, workers=1)
    names = {e.check_name: e for e in report.entries}
    assert names["cor1_zero_row"].value == 0.0
    assert report.passed


def test_report_json_and_table():
    report = verify.VerificationReport(suite="identities", entries=[
        verify.CheckEntry(check_name="x", eq_tag="ge17", value=1e-12, tol=1e-9, passed=True)])
    body = json.loads(report.to_json())
    assert body["pass"] is True
    assert body["entries"][0]["pass"] is True and "passed" not in body["entries"][0]
    table = verify.render_table(report)
    assert "PASS" in table and "ge17" in table


def test_run_suite_unknown_name():
    with pytest.raises(ContractError):
        verify.run_suite("everything")


def test_residual_around_state():
    grid = RadialGrid(128, 8.0, 5)
    state = initial_state(grid, DataConfig(a=0.2))
    report = verify.residual_around(state, 0.25 * grid.h)
    assert set(report.regions) == {name for name, _, _ in verify.REGIONS}
    assert np.isfinite(report.l2) and report.linf >= 0.0


def test_residual_needs_equal_spacing():
    grid = RadialGrid(32, 8.0, 5)
    s = initial_state(grid, DataConfig(a=0.0))
    with pytest.raises(ContractError):
        verify.residual_phi_equation((s, s, s))


def test_convergence_study_zero_data():
    result = verify.convergence_study("zero", base_n=64, R=8.0, t_end=0.1, workers=1)
    assert result.n_values == [64, 128, 256]
    assert all(s == "inconclusive-by-zero" for s in result.status.values())
    with pytest.raises(ContractError):
        verify.convergence_study("huge")


def test_convergence_suite_stops_large_data_before_focusing(monkeypatch):
    zero = verify.convergence_study("zero", base_n=64, R=8.0, t_end=0.05, workers=1)
    seen = {}

    def study(problem, **kwargs):
        seen[problem] = kwargs["t_end"]
        return zero

    monkeypatch.setattr(verify, "convergence_study", study)
    monkeypatch.setattr(verify, "energy_conservation_check",
                        lambda config=None: verify._entry("energy_drift_default_run", "ge11", 0.0, 1e-6, True))
    report = verify.convergence_suite(base_n=64, t_end=1.0, workers=1)
    assert seen == {"zero": 1.0, "tiny": 1.0, "large": verify.STUDY_T_END["large"]}
    assert report.provenance["t_end"]["large"] == 0.5
    assert report.passed
