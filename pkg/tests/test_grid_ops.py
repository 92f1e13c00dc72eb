import numpy as np
import pytest

from skyrme import grid_ops
from skyrme.errors import ContractError, UndefinedRatioError
from skyrme.grid_ops import Field, Parity, RadialGrid


def test_grid_contract():
    grid = RadialGrid(8, 2.0, 5)
    assert grid.h == 0.25
    np.testing.assert_allclose(grid.r, (np.arange(8) + 0.5) * 0.25)
    assert not grid.r.flags.writeable
    assert grid.refined().N == 16
    assert grid.with_dimension(3).d == 3
    for bad in ((2, 1.0, 5), (8, 0.0, 5), (8, 1.0, 4), (8, float("inf"), 5)):
        with pytest.raises(ContractError):
            RadialGrid(*bad)


def test_laplacian_of_r_squared_is_exact():
    grid = RadialGrid(50, 3.0, 5)
    lap = grid_ops.laplacian(Field(grid.r ** 2), grid)
    np.testing.assert_allclose(lap.values, 10.0, rtol=1e-10)
    lap3 = grid_ops.laplacian(Field(grid.r ** 2), grid, d=3)
    np.testing.assert_allclose(lap3.values, 6.0, rtol=1e-10)


def test_gradient_flips_parity():
    grid = RadialGrid(40, 2.0, 5)
    grad = grid_ops.gradient(Field(grid.r ** 2, Parity.EVEN), grid)
    assert grad.parity == Parity.ODD
    np.testing.assert_allclose(grad.values, 2.0 * grid.r, rtol=1e-10)
    back = grid_ops.gradient(Field(grid.r, Parity.ODD), grid)
    assert back.parity == Parity.EVEN
    np.testing.assert_allclose(back.values, 1.0, rtol=1e-10)


def test_stencil_needs_parity():
    grid = RadialGrid(16, 1.0, 5)
    with pytest.raises(ContractError):
        grid_ops.laplacian(Field(np.zeros(16), None), grid)
    with pytest.raises(ContractError):
        grid_ops.gradient(Field(np.zeros(15)), grid)


def test_norms_of_simple_fields():
    grid = RadialGrid(2000, 1.0, 5)
    ones = np.ones(grid.N)
    ball = grid_ops.sphere_area(5) / 5.0
    assert grid_ops.norm_L2(ones, grid) ** 2 == pytest.approx(ball, rel=1e-5)
    assert grid_ops.regional_l2(ones, grid, 0.0, np.inf) == pytest.approx(grid_ops.norm_L2(ones, grid))
    assert grid_ops.regional_l2(ones, grid, 2.0, 3.0) == 0.0
    assert grid_ops.weighted_sup(ones, grid) == pytest.approx(np.sqrt(1.0 + grid.r[-1] ** 2))
    assert grid_ops.sphere_area(3) == pytest.approx(4 * np.pi)


def test_hardy_ratio_of_gaussian():
    grid = RadialGrid(4096, 8.0, 5)
    ratio = grid_ops.hardy_ratio(np.exp(-grid.r ** 2), grid)
    assert ratio == pytest.approx(4.0 / 15.0, rel=1e-3)
    assert ratio < grid_ops.hardy_constant(5)
    assert grid_ops.coercivity_functional(np.exp(-grid.r ** 2), grid) > 0.0


def test_hardy_ratio_undefined_for_constant():
    grid = RadialGrid(32, 1.0, 5)
    with pytest.raises(UndefinedRatioError):
        grid_ops.hardy_ratio(np.full(32, 2.0), grid)


def test_coercivity_requires_five_dimensions():
    grid = RadialGrid(32, 1.0, 3)
    with pytest.raises(ContractError):
        grid_ops.coercivity_functional(np.zeros(32), grid)


def test_hardy_constants():
    assert grid_ops.hardy_constant(5) == pytest.approx(4.0 / 9.0)
    assert grid_ops.hardy_constant(3) == 4.0


def test_restrict():
    np.testing.assert_allclose(grid_ops.restrict(np.array([1.0, 3.0, 5.0, 9.0])), [2.0, 7.0])
    with pytest.raises(ContractError):
        grid_ops.restrict(np.ones(5))


def test_origin_parity_defect():
    grid = RadialGrid(1000, 10.0, 5)
    even = grid_ops.origin_parity_defect(np.exp(-grid.r ** 2), grid)
    kinked = grid_ops.origin_parity_defect(grid.r * np.exp(-grid.r ** 2), grid)
    assert even < 1e-6
    assert kinked > 0.5 * grid.h
    assert grid_ops.origin_parity_defect(np.zeros(grid.N), grid) == 0.0


def _gaussian_laplacian_error(n):
    grid = RadialGrid(n, 6.0, 5)
    r = grid.r
    lap = grid_ops.laplacian(Field(np.exp(-r ** 2)), grid).values
    return np.max(np.abs(lap - (4.0 * r ** 2 - 10.0) * np.exp(-r ** 2)))


def test_laplacian_is_second_order_on_a_gaussian():
    errs = [_gaussian_laplacian_error(n) for n in (200, 400, 800)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.1)


def test_laplacian_is_self_adjoint_in_cell_weights():
    grid = RadialGrid(128, 8.0, 5)
    r = grid.r
    a, w = grid_ops.flux_weights(grid, 5)
    assert a[0] == 0.0 and np.all(a[1:] > 0.0) and np.all(w > 0.0)
    np.testing.assert_allclose(w[64:], r[64:] ** 4, rtol=1e-3)
    u = np.exp(-(r - 2.0) ** 2)
    v = (1.0 + r ** 2) * np.exp(-r ** 2)
    lu = grid_ops.laplacian(Field(u), grid).values
    lv = grid_ops.laplacian(Field(v), grid).values
    assert np.sum(w * u * lv) == pytest.approx(np.sum(w * v * lu), rel=1e-10)
    assert np.sum(w * u * lu) < 0.0


def test_laplacian_rejects_odd_fields():
    grid = RadialGrid(16, 1.0, 5)
    with pytest.raises(ContractError):
        grid_ops.laplacian(Field(grid.r, Parity.ODD), grid)


def test_face_averaged_square_of_a_line():
    grid = RadialGrid(32, 4.0, 5)
    sq = grid_ops.face_averaged_square(Field(grid.r ** 2), grid)
    # faces carry exact derivatives 2 r_f; node 0 also sees the mirrored face
    np.testing.assert_allclose(sq[1:-1], 4.0 * grid.r[1:-1] ** 2 + grid.h ** 2, rtol=1e-12)
    assert sq[0] == pytest.approx(0.5 * (2.0 * grid.h) ** 2)


def test_kreiss_oliger_damps_the_grid_mode_only():
    grid = RadialGrid(64, 4.0, 5)
    assert np.all(grid_ops.kreiss_oliger(np.ones(64), grid, 0.5) == 0.0)
    assert np.all(grid_ops.kreiss_oliger(np.arange(64.0), grid, 0.0) == 0.0)
    saw = (-1.0) ** np.arange(64)
    damp = grid_ops.kreiss_oliger(saw, grid, 0.5)
    np.testing.assert_allclose(damp[3:-3], -0.5 / grid.h * saw[3:-3])
    smooth = grid_ops.kreiss_oliger(np.exp(-grid.r ** 2), grid, 0.5)
    assert np.max(np.abs(smooth)) < 1e-3


def test_gaussian_l2_norm():
    grid = RadialGrid(2000, 8.0, 5)
    exact = grid_ops.sphere_area(5) * 3.0 / 32.0 * np.sqrt(np.pi / 2.0)
    assert grid_ops.norm_L2(np.exp(-grid.r ** 2), grid) ** 2 == pytest.approx(exact, rel=1e-10)
