import numpy as np
import pytest

from boltzlab.phase_grid import DistributionFunction, PhaseGrid


@pytest.fixture
def grid2d_small():
    return PhaseGrid(dim=2, x_period=4.0, n_x=8, v_max=3.0, n_v=8)


@pytest.fixture
def grid2d_tiny():
    return PhaseGrid(dim=2, x_period=4.0, n_x=4, v_max=3.0, n_v=6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_distribution(grid, rng, nonnegative=True):
    vals = rng.uniform(0.0, 1.0, size=grid.shape)
    if not nonnegative:
        vals = vals - 0.5
    return DistributionFunction(grid, vals, nonnegative=nonnegative)
