import numpy as np
import pytest

import decaylab as dl

TWO_PI = 2.0 * np.pi


def test_grid_basic_quantities(grid2):
    assert grid2.dim == 2
    assert grid2.shape == (32, 32)
    assert grid2.xi_min == pytest.approx(1.0 / 8.0)
    assert grid2.xi_max == pytest.approx(16.0 / 8.0)
    assert grid2.cell_measure == pytest.approx((1.0 / 8.0) ** 2)
    assert grid2.dx == pytest.approx(8.0 * TWO_PI / 32)


def test_mode_index_layout(grid2):
    idx = grid2.mode_index
    assert len(idx) == grid2.dim
    for axis in idx:
        assert axis[0] == 0
        assert axis[1] == 1
        assert axis[-1] == -1
        assert axis.min() == -16


def test_wavenumber_magnitudes(grid2):
    ksq = grid2.ksq
    assert ksq.flat[0] == 0.0
    assert ksq.max() == pytest.approx(2.0 * (16.0 / 8.0) ** 2)


def test_dealias_mask_two_thirds(grid2):
    mask = grid2.dealias_mask
    kx, ky = grid2.mode_index
    # modes with any axis index beyond N/3 are dropped
    keep = (np.abs(kx)[:, None] <= 32 / 3.0) & (np.abs(ky)[None, :] <= 32 / 3.0)
    assert np.array_equal(mask, keep)


def test_physical_coords_span_box(grid2):
    x, y = grid2.physical_coords()
    assert x.shape == grid2.shape
    assert x.min() == 0.0
    assert x.max() == pytest.approx(grid2.box_length - grid2.dx)


@pytest.mark.parametrize("dim", [0, 1, 4])
def test_rejects_unsupported_dimension(dim):
    with pytest.raises(ValueError, match="dim"):
        dl.make_grid(dim, 32, TWO_PI)


@pytest.mark.parametrize("points", [6, 9, 20, 4])
def test_rejects_non_power_of_two(points):
    with pytest.raises(ValueError):
        dl.make_grid(2, points, TWO_PI)


def test_rejects_nonpositive_box():
    with pytest.raises(ValueError):
        dl.make_grid(2, 32, 0.0)


def test_grids_hash_and_compare():
    a = dl.make_grid(2, 32, TWO_PI)
    b = dl.make_grid(2, 32, TWO_PI)
    c = dl.make_grid(2, 64, TWO_PI)
    assert a == b and hash(a) == hash(b)
    assert a != c
