"""Shared fixtures and field builders for the test suite."""

import numpy as np
import pytest

import decaylab as dl

TWO_PI = 2.0 * np.pi


@pytest.fixture
def grid2():
    """Small 2D grid: 32 points on a box of 8 periods."""
    return dl.make_grid(2, 32, 8.0 * TWO_PI)


@pytest.fixture
def grid3():
    """Small 3D grid: 16 points on a box of 4 periods."""
    return dl.make_grid(3, 16, 4.0 * TWO_PI)


def random_real_field(grid, components=1, seed=0, band_limited=True):
    """Random mean-zero field built from physical white noise."""
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((components,) + grid.shape)
    field = dl.from_physical(grid, values)
    field.coeffs[(slice(None),) + (0,) * grid.dim] = 0.0
    if band_limited:
        field = dl.dealias(field)
    return field


def single_mode_field(grid, mode, amplitude=1.0, components=1, component=0):
    """Real field with a cosine at integer mode index ``mode``."""
    x = grid.physical_coords()
    phase = sum(m * grid.xi_min * x[d] for d, m in enumerate(mode))
    values = np.zeros((components,) + grid.shape)
    values[component] = amplitude * np.cos(phase)
    return dl.from_physical(grid, values)
