import pytest

from skyrme.config import DataConfig
from skyrme.dynamics import ModelParams, initial_state
from skyrme.grid_ops import RadialGrid


@pytest.fixture
def small_grid():
    return RadialGrid(64, 8.0, 5)


@pytest.fixture
def bump_state(small_grid):
    """Small Gaussian bump, no winding."""
    return initial_state(small_grid, DataConfig(a=0.5, r_c=2.0, sigma=0.5))


@pytest.fixture
def wound_state(small_grid):
    return initial_state(small_grid, DataConfig(a=0.5, r_c=2.0, sigma=0.5), ModelParams(N1=1))
