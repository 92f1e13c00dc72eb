import numpy as np
import pytest
from scipy.integrate import quad

from skyrme import grid_ops, transforms
from skyrme.config import DataConfig
from skyrme.dynamics import SimState, initial_state, zero_state
from skyrme.errors import ContractError
from skyrme.grid_ops import Field, Parity, RadialGrid


def test_zero_state_has_zero_phi(small_grid):
    state = zero_state(small_grid)
    assert np.all(transforms.compute_Phi(state).values == 0.0)
    assert np.all(transforms.compute_dtPhi(state).values == 0.0)
    assert transforms.skyrme_energy(state) == 0.0


def test_phi_chain_parities(bump_state):
    assert transforms.compute_Phi(bump_state).parity == Parity.EVEN
    assert transforms.compute_Phi1(bump_state).parity == Parity.ODD
    assert transforms.compute_Phi2(bump_state).parity == Parity.EVEN


def test_phi_minus_phi2_is_the_static_tail(wound_state):
    phi = transforms.compute_Phi(wound_state).values
    phi2 = transforms.compute_Phi2(wound_state).values
    tail = transforms.static_profile(wound_state).tail
    scale = np.maximum(1.0, np.abs(phi))
    assert np.max(np.abs(phi - phi2 - tail) / scale) < 1e-9
    near = wound_state.grid.r <= 0.5
    assert np.max(np.abs(phi - phi2)[near] / scale[near]) < 1e-9


def test_dtphi_scales_with_velocity(small_grid):
    state = initial_state(small_grid, DataConfig(a=0.3, a1=0.7))
    dt_phi = transforms.compute_dtPhi(state).values
    assert np.all(np.abs(dt_phi) >= np.abs(state.gt.values))


def test_energy_positive_for_nonzero_data(bump_state):
    assert transforms.skyrme_energy(bump_state) > 0.0


def test_corollary_margin_and_contract(bump_state):
    margin = transforms.corollary1_margin(bump_state, 0.25)
    assert margin >= -1e-10
    with pytest.raises(ContractError):
        transforms.corollary1_margin(bump_state, 1e-6)


def test_diagnostics_record_shape(bump_state):
    rec = transforms.diagnostics(bump_state, 0.25, dt=0.01)
    row = rec.row()
    assert len(row) == len(transforms.DiagnosticsRecord.COLUMNS)
    assert rec.coercivity >= -1e-8 * grid_ops.dirichlet_energy(transforms.compute_Phi(bump_state), bump_state.grid)
    assert np.all(np.isfinite(row))


def test_monitors_are_finite(wound_state):
    mon = transforms.monitors(wound_state, 0.25)
    values = mon.as_dict()
    assert set(values) >= {"modified_energy", "r2g_sup", "ge62_residual", "boundary_fraction"}
    assert all(np.isfinite(v) for v in values.values())


def test_ge62_grid_residual_converges():
    data = DataConfig(a=0.5, r_c=0.0, sigma=1.0)
    res = []
    for n in (128, 256):
        state = initial_state(RadialGrid(n, 8.0, 5), data)
        res.append(transforms.ge62_residual(state))
    assert res[1] < res[0] / 2.0


def test_snapshot_fields(bump_state):
    snap = transforms.snapshot(bump_state)
    assert snap.t == 0.0
    np.testing.assert_allclose(snap.phi2.values * bump_state.grid.r, snap.phi1.values)


def test_g3_integral_small_r_limit():
    grid = RadialGrid(4, 4e-4, 5)
    g = 1.5
    state = SimState(0.0, Field(np.full(grid.N, g)), Field(np.zeros(grid.N)), grid)

    def limit(y):
        b = 1.0 + 2.0 * y * y
        return 0.5 * (3.0 * b ** 1.5 + b ** -0.5 - b ** -1.5)

    exact, _ = quad(limit, 0.0, g, epsabs=1e-13, epsrel=1e-13)
    np.testing.assert_allclose(transforms.g3_integral(state).values, exact, rtol=1e-6)


def test_g3_integral_of_zero_field(small_grid):
    g3 = transforms.g3_integral(zero_state(small_grid))
    assert g3.parity == Parity.EVEN
    assert np.all(g3.values == 0.0)


def test_dtphi_is_the_time_derivative_of_phi(small_grid):
    state = initial_state(small_grid, DataConfig(a=0.5, a1=0.8, r_c1=2.0))
    tau = 1e-3

    def shifted(sign):
        g = state.g.values + sign * tau * state.gt.values
        return SimState(0.0, Field(g), state.gt, small_grid)

    fd = (transforms.compute_Phi(shifted(1.0)).values - transforms.compute_Phi(shifted(-1.0)).values) / (2 * tau)
    np.testing.assert_allclose(fd, transforms.compute_dtPhi(state).values, rtol=1e-5, atol=1e-6)
