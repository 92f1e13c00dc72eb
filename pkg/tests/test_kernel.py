import math

import numpy as np
import pytest

from skyrme import kernel
from skyrme.errors import DomainError, QuadratureError
from skyrme.kernel import DEFAULT_KERNEL, QuadratureSpec


@pytest.mark.parametrize("i", range(5))
def test_ftilde_limit_at_zero(i):
    assert kernel.eval_Ftilde(i, 0.0) == pytest.approx(kernel.FTILDE_AT_ZERO[i], abs=1e-15)


@pytest.mark.parametrize("i", range(5))
def test_series_matches_closed_form_around_switch(i):
    x = np.linspace(0.25, 1.0, 400)
    series = kernel._horner(DEFAULT_KERNEL.series_coeffs[i], x * x)
    closed = kernel._closed_form(i, x)
    assert np.max(np.abs(series - closed) / np.abs(closed)) <= 1e-13


@pytest.mark.parametrize("i", range(5))
def test_ftilde_is_even_and_continuous_at_switch(i):
    x = np.linspace(0.0, 4.0, 200)
    assert np.array_equal(DEFAULT_KERNEL.ftilde(i, x), DEFAULT_KERNEL.ftilde(i, -x))
    xs = DEFAULT_KERNEL.switch_radius
    left, right = DEFAULT_KERNEL.ftilde(i, np.array([np.nextafter(xs, 0.0), xs]))
    assert left == pytest.approx(right, rel=1e-13)


def test_f_of_u_agrees_with_ftilde():
    x = np.array([0.0, 0.1, 0.49, 0.5, 2.0, 7.5])
    for i in range(5):
        np.testing.assert_allclose(kernel.eval_F(i, x * x), kernel.eval_Ftilde(i, x), rtol=1e-14)


def test_kernel_domain_errors():
    with pytest.raises(DomainError):
        kernel.eval_Ftilde(5, 0.3)
    with pytest.raises(DomainError):
        kernel.eval_Ftilde(0, np.nan)
    with pytest.raises(DomainError):
        kernel.eval_F(0, -1.0)
    with pytest.raises(DomainError):
        kernel.eval_A1(0.0, 1.0)


def test_smooth_step_shape():
    t = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    np.testing.assert_allclose(kernel.smooth_step(t), [0.0, 0.0, 0.5, 1.0, 1.0], atol=1e-15)
    s = np.linspace(0.05, 0.95, 19)
    h = 1e-6
    fd = (kernel.smooth_step(s + h) - kernel.smooth_step(s - h)) / (2 * h)
    np.testing.assert_allclose(kernel.smooth_step(s, 1), fd, rtol=1e-6, atol=1e-8)
    fd2 = (kernel.smooth_step(s + h, 1) - kernel.smooth_step(s - h, 1)) / (2 * h)
    np.testing.assert_allclose(kernel.smooth_step(s, 2), fd2, rtol=1e-5, atol=1e-6)


def test_cutoffs_partition_unity():
    r = np.linspace(0.01, 3.0, 300)
    np.testing.assert_allclose(DEFAULT_KERNEL.phi_lt1(r) + DEFAULT_KERNEL.phi_gt1(r), 1.0)
    assert np.all(DEFAULT_KERNEL.phi(r[r < 1.0], 2) == 2 * np.pi)
    assert np.all(DEFAULT_KERNEL.phi(r[r >= 2.0], 2) == 0.0)
    with pytest.raises(DomainError):
        DEFAULT_KERNEL.phi_lt_r0(r, 0.0)


def test_a_and_b_are_at_least_one():
    r = np.logspace(-3, 1, 30)[:, None]
    y = np.linspace(-9.0, 9.0, 61)[None, :]
    assert np.min(kernel.eval_A1(r, y)) >= 1.0
    assert np.min(kernel.eval_B2(r, y)) >= 1.0
    assert np.min(kernel.eval_B(r, y, 0.7)) >= 1.0


def test_reducible_b_matches_direct_formula():
    r = np.array([0.1, 0.7, 3.0])[:, None]
    y = np.linspace(-5.0, 5.0, 41)[None, :]
    series = kernel.b_excess(r, y, np.pi)
    direct = 2.0 * np.sin(r * y + np.pi) ** 2 / r ** 2
    np.testing.assert_allclose(series, direct, rtol=1e-11, atol=1e-14)
    assert kernel.is_reducible(np.array([0.0, np.pi, 3 * np.pi])).all()
    assert not kernel.is_reducible(np.array([0.5])).any()


def test_integrate_closed_form_and_sign():
    f = lambda t: np.sqrt(1.0 + 2.0 * t * t)
    exact = math.sqrt(3.0) / 2.0 + math.asinh(math.sqrt(2.0)) / (2.0 * math.sqrt(2.0))
    assert kernel.integrate(0.0, 1.0, f) == pytest.approx(exact, abs=1e-12)
    assert kernel.integrate(1.0, 0.0, f) == pytest.approx(-exact, abs=1e-12)
    assert kernel.integrate_0_to(0.0, f) == 0.0


def test_cumulative_integral_is_antiderivative():
    edges = np.linspace(0.0, 2.0, 9)
    table = kernel.cumulative_integral(edges, np.cos)
    np.testing.assert_allclose(table, np.sin(edges), atol=1e-13)


def test_quadrature_error_carries_best_estimate():
    spec = QuadratureSpec(order=2, max_panels=4, abs_tol=1e-16, rel_tol=1e-16)
    with pytest.raises(QuadratureError) as info:
        kernel.integrate(0.0, 10.0, lambda y: np.sin(50.0 * y), spec)
    assert isinstance(info.value.best_estimate, float)
    assert info.value.error is not None


def test_lemma1_constants():
    assert kernel.lemma1_sine_integral() == pytest.approx(1.0 / 6.0, abs=1e-12)
    assert kernel.lemma1_F(0.1, np.pi) >= kernel.FE1_LOWER_BOUND
    assert kernel.lemma1_F(0.2, 0.0) == 0.0
    with pytest.raises(DomainError):
        kernel.lemma1_F(-0.1, 1.0)


def test_g2_derivative_and_oddness():
    r, w, h = 0.3, 1.2, 1e-3
    fd = (kernel.eval_G2(r, w + h) - kernel.eval_G2(r, w - h)) / (2 * h)
    assert fd == pytest.approx(math.sqrt(kernel.eval_B2(r, w)), rel=1e-6)
    assert kernel.eval_G2(r, -w) == pytest.approx(-kernel.eval_G2(r, w), rel=1e-12)
    assert kernel.eval_G1(r, 0.0) == 0.0


def test_g_function_table_matches_pointwise():
    edges = np.linspace(0.0, 2.0, 5)
    table = kernel.g_function_table(0.2, edges)
    np.testing.assert_allclose(table.g2, kernel.eval_G2(0.2, edges), rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(table.g0, kernel.eval_G0(0.2, edges), rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(table.g1, kernel.eval_G1(0.2, edges), rtol=1e-8, atol=1e-12)
    with pytest.raises(DomainError):
        kernel.g_function_table(0.2, np.array([0.5, 1.0]))


def test_static_profile_without_winding_is_zero():
    prof = kernel.static_profile(np.linspace(0.1, 3.0, 12), 0)
    assert np.all(prof.s0 == 0.0) and np.all(prof.w == 0.0)


def test_static_profile_tail_vanishes_near_origin():
    r = np.array([0.2, 0.4, 1.5, 3.0])
    prof = kernel.static_profile(r, 1)
    assert prof.tail[0] == 0.0 and prof.tail[1] == 0.0
    assert prof.tail[-1] > 0.0


def test_graded_edges_cover_interval():
    edges = kernel.graded_edges(-1.0, 7.0, 0.01)
    assert edges[0] == -1.0 and edges[-1] == 7.0
    assert np.all(np.diff(edges) > 0)
    for c in (0.0, np.pi, 2 * np.pi):
        assert np.any(np.isclose(edges, c))
    val = kernel.integrate_graded(7.0, -1.0, np.cos, 0.01)
    assert val == pytest.approx(np.sin(-1.0) - np.sin(7.0), abs=1e-12)
