import numpy as np
import pytest

import decaylab as dl
from decaylab.dclb import FormatError, read_field, write_field

from conftest import random_real_field, single_mode_field


def test_round_trip_physical_spectral(grid2):
    field = random_real_field(grid2, seed=1, band_limited=False)
    values = dl.to_physical(field)
    again = dl.from_physical(grid2, values)
    assert np.abs(again.coeffs - field.coeffs).max() <= 1e-12


def test_single_cosine_coefficients(grid2):
    field = single_mode_field(grid2, (1, 0))
    coeffs = field.coeffs[0]
    # cos splits into two conjugate modes of weight 1/2 each
    assert coeffs[1, 0] == pytest.approx(0.5, abs=1e-14)
    assert coeffs[-1, 0] == pytest.approx(0.5, abs=1e-14)
    zeroed = coeffs.copy()
    zeroed[1, 0] = zeroed[-1, 0] = 0.0
    assert np.abs(zeroed).max() <= 1e-14


def test_plancherel_identity(grid2):
    field = random_real_field(grid2, seed=2, band_limited=False)
    spectral = dl.sobolev_norm_sq(field, 0.0)
    physical = dl.physical_energy(field)
    assert spectral == pytest.approx(physical, rel=1e-12)


def test_sobolev_weight_single_mode(grid2):
    # mode of physical wavenumber 1 and cosine amplitude 1
    field = single_mode_field(grid2, (8, 0))
    xi = 8 * grid2.xi_min
    assert xi == pytest.approx(1.0)
    expected = 2.0 * 0.25 * xi**2 * grid2.cell_measure
    assert dl.sobolev_norm_sq(field, 1.0) == pytest.approx(expected, rel=1e-12)


def test_shell_mass_counts_lattice_modes_exactly(grid2):
    flat = dl.SpectralField(grid2, np.ones((1,) + grid2.shape, dtype=np.complex128))
    mass = dl.shell_mass(flat, 0.0, 1.0)
    # Unit coefficients: the mass is (number of nonzero modes within the
    # ball) * cell_measure.  Count the lattice points by brute force.
    kx, ky = grid2.mode_index
    count = 0
    for a in kx:
        for b in ky:
            if (a, b) != (0, 0) and (a**2 + b**2) * grid2.xi_min**2 <= 1.0 + 1e-12:
                count += 1
    assert mass == pytest.approx(count * grid2.cell_measure, rel=1e-12)
    # ...and that count approximates the continuum disk area pi * rho^2.
    assert mass == pytest.approx(np.pi, rel=0.05)


def test_shell_mass_excludes_mean_mode(grid2):
    field = random_real_field(grid2, seed=3)
    field.coeffs[(0,) + (0,) * grid2.dim] = 123.0
    with_mean = dl.shell_mass(field, 0.0, grid2.xi_min / 2.0)
    assert with_mean == 0.0


def test_norm_includes_mean_mode_at_order_zero(grid2):
    coeffs = np.zeros((1,) + grid2.shape, dtype=np.complex128)
    coeffs[0, 0, 0] = 2.0
    field = dl.SpectralField(grid2, coeffs)
    assert dl.sobolev_norm_sq(field, 0.0) == pytest.approx(4.0 * grid2.cell_measure)
    assert dl.sobolev_norm_sq(field, 1.0) == 0.0


def test_hermitian_defect_zero_for_real_fields(grid2):
    field = random_real_field(grid2, seed=4, band_limited=False)
    assert dl.hermitian_defect(field) <= 1e-13
    field.coeffs[0, 1, 2] += 1.0  # break the symmetry
    assert dl.hermitian_defect(field) > 0.1


def test_dealias_idempotent(grid2):
    field = random_real_field(grid2, seed=5, band_limited=False)
    once = dl.dealias(field)
    twice = dl.dealias(once)
    assert np.array_equal(once.coeffs, twice.coeffs)
    kept = grid2.dealias_mask
    assert np.abs(once.coeffs[0][~kept]).max() == 0.0


def test_component_validation(grid2):
    with pytest.raises(ValueError):
        dl.SpectralField(grid2, np.zeros((2, 5, 5), dtype=np.complex128))


def test_dclb_round_trip(tmp_path, grid3):
    field = random_real_field(grid3, components=3, seed=6)
    path = tmp_path / "field.dclb"
    write_field(path, field)
    back = read_field(path)
    assert back.grid == grid3
    assert np.array_equal(back.coeffs, field.coeffs)


def test_dclb_rejects_bad_magic(tmp_path, grid2):
    path = tmp_path / "field.dclb"
    write_field(path, random_real_field(grid2))
    raw = bytearray(path.read_bytes())
    raw[:4] = b"NOPE"
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError, match="magic"):
        read_field(path)


def test_dclb_rejects_truncation(tmp_path, grid2):
    path = tmp_path / "field.dclb"
    write_field(path, random_real_field(grid2))
    path.write_bytes(path.read_bytes()[:50])
    with pytest.raises(FormatError):
        read_field(path)


def test_dclb_rejects_unknown_version(tmp_path, grid2):
    path = tmp_path / "field.dclb"
    write_field(path, random_real_field(grid2))
    raw = bytearray(path.read_bytes())
    raw[4] = 99
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError, match="version"):
        read_field(path)
