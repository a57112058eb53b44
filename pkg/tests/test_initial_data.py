"""Initial-datum constructors: moduli, validation, phases, projection."""

import numpy as np
import pytest

from decaylab import (
    Annulus,
    DatumSpec,
    Gaussian,
    PowerLaw,
    RandomPhasePowerLaw,
    SpectralField,
    estimate_field_character,
    generate,
    hermitian_defect,
    make_grid,
    sobolev_norm_sq,
    solenoidal_project,
)

TWO_PI = 2.0 * np.pi


@pytest.fixture()
def grid():
    return make_grid(2, 64, 16.0 * TWO_PI)


def test_power_law_modulus_at_modes(grid):
    field = generate(DatumSpec(kind=PowerLaw(1.0, cutoff=1.0)), grid)
    # |xi| = 3/16 at mode (3, 0): coefficient equals the modulus itself
    assert field.coeffs[0, 3, 0] == pytest.approx(3.0 / 16.0)
    # beyond the cutoff the coefficient vanishes
    assert field.coeffs[0, 17, 0] == 0.0
    assert field.coeffs[0, 16, 0] == pytest.approx(1.0)  # exactly at cutoff


def test_mean_mode_zeroed_by_default(grid):
    field = generate(DatumSpec(kind=Gaussian(width=1.0)), grid)
    assert field.coeffs[0, 0, 0] == 0.0
    kept = generate(DatumSpec(kind=Gaussian(width=1.0), mean_zero=False), grid)
    assert kept.coeffs[0, 0, 0] == pytest.approx(1.0)


def test_amplitude_scales_linearly(grid):
    base = generate(DatumSpec(kind=PowerLaw(0.5)), grid)
    scaled = generate(DatumSpec(kind=PowerLaw(0.5), amplitude=3.0), grid)
    assert np.array_equal(scaled.coeffs, 3.0 * base.coeffs)


def test_smooth_cutoff_tapers(grid):
    sharp = generate(DatumSpec(kind=PowerLaw(0.0, cutoff=1.0)), grid)
    smooth = generate(DatumSpec(kind=PowerLaw(0.0, cutoff=1.0), smooth_cutoff=True), grid)
    # below 0.7 * cutoff the taper is inactive: |xi| = 8/16 = 0.5
    assert smooth.coeffs[0, 8, 0] == sharp.coeffs[0, 8, 0]
    # inside the roll-off band the modulus is strictly between 0 and sharp:
    # |xi| = 14/16 = 0.875
    val = abs(smooth.coeffs[0, 14, 0])
    assert 0.0 < val < abs(sharp.coeffs[0, 14, 0])
    # beyond the cutoff both vanish (the cosine taper to double precision)
    assert abs(smooth.coeffs[0, 17, 0]) <= 1e-30


def test_integrability_edge_rejected(grid):
    with pytest.raises(ValueError, match="-dim/2"):
        generate(DatumSpec(kind=PowerLaw(-1.0)), grid)
    with pytest.raises(ValueError, match="-dim/2"):
        generate(DatumSpec(kind=RandomPhasePowerLaw(-1.5)), grid)


def test_unresolvable_cutoff_rejected(grid):
    with pytest.raises(ValueError, match="resolvable"):
        generate(DatumSpec(kind=PowerLaw(0.0, cutoff=2.5)), grid)


def test_degenerate_kind_parameters_rejected(grid):
    with pytest.raises(ValueError, match="width"):
        generate(DatumSpec(kind=Gaussian(width=0.0)), grid)
    with pytest.raises(ValueError, match="inner"):
        generate(DatumSpec(kind=Annulus(1.0, 0.5)), grid)


def test_spec_validation():
    with pytest.raises(ValueError, match="components"):
        DatumSpec(kind=PowerLaw(0.0), components=0)
    with pytest.raises(ValueError, match="amplitude"):
        DatumSpec(kind=PowerLaw(0.0), amplitude=-1.0)


def test_random_phases_are_hermitian(grid):
    field = generate(DatumSpec(kind=RandomPhasePowerLaw(0.5, seed=42)), grid)
    assert hermitian_defect(field) <= 1e-12


def test_random_phases_preserve_modulus(grid):
    det = generate(DatumSpec(kind=PowerLaw(0.5)), grid)
    rand = generate(DatumSpec(kind=RandomPhasePowerLaw(0.5, seed=42)), grid)
    assert np.allclose(np.abs(rand.coeffs), np.abs(det.coeffs), atol=1e-13)


def test_seed_determinism(grid):
    a = generate(DatumSpec(kind=RandomPhasePowerLaw(0.5, seed=7)), grid)
    b = generate(DatumSpec(kind=RandomPhasePowerLaw(0.5, seed=7)), grid)
    c = generate(DatumSpec(kind=RandomPhasePowerLaw(0.5, seed=8)), grid)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert not np.array_equal(a.coeffs, c.coeffs)


def test_components_independent_draws(grid):
    field = generate(DatumSpec(kind=RandomPhasePowerLaw(0.5, seed=7), components=2), grid)
    assert field.components == 2
    assert not np.array_equal(field.coeffs[0], field.coeffs[1])


def test_projection_divergence_free(grid):
    field = generate(
        DatumSpec(kind=RandomPhasePowerLaw(0.0, seed=3), components=2), grid
    )
    proj = solenoidal_project(field)
    div = np.zeros(grid.shape, dtype=np.complex128)
    for j, w in enumerate(grid.wavenumbers):
        div += w * proj.coeffs[j]
    assert np.abs(div).max() <= 1e-13 * np.abs(field.coeffs).max()


def test_projection_idempotent_and_contractive(grid):
    field = generate(
        DatumSpec(kind=RandomPhasePowerLaw(0.0, seed=3), components=2), grid
    )
    once = solenoidal_project(field)
    twice = solenoidal_project(once)
    assert np.allclose(once.coeffs, twice.coeffs, atol=1e-15)
    assert sobolev_norm_sq(once, 0.0) <= sobolev_norm_sq(field, 0.0) + 1e-12


def test_projection_annihilates_gradients(grid):
    rng = np.random.default_rng(0)
    potential = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    coeffs = np.stack([1j * w * potential for w in grid.wavenumbers])
    gradient = SpectralField(grid, coeffs)
    proj = solenoidal_project(gradient)
    assert np.abs(proj.coeffs).max() <= 1e-13 * np.abs(coeffs).max()


def test_projection_leaves_mean_mode(grid):
    field = generate(
        DatumSpec(kind=PowerLaw(0.0), components=2, mean_zero=False), grid
    )
    field.coeffs[:, 0, 0] = [2.0, -3.0]
    proj = solenoidal_project(field)
    assert proj.coeffs[0, 0, 0] == 2.0
    assert proj.coeffs[1, 0, 0] == -3.0


def test_projection_rejects_scalar(grid):
    field = generate(DatumSpec(kind=PowerLaw(0.0)), grid)
    with pytest.raises(ValueError, match="component"):
        solenoidal_project(field)


def test_projection_preserves_character():
    grid = make_grid(2, 128, 32.0 * TWO_PI)
    field = generate(
        DatumSpec(kind=RandomPhasePowerLaw(0.5, cutoff=1.0, seed=1), components=2),
        grid,
    )
    proj = solenoidal_project(field)
    estimate = estimate_field_character(proj)
    assert abs(estimate.exponent - 0.5) <= 0.15
