"""Decay-character estimation: recovery, endpoints, shift law, curve output."""

import math

import numpy as np
import pytest

from decaylab import (
    Annulus,
    Classification,
    DatumSpec,
    DecayIndicatorCurve,
    PowerLaw,
    RandomPhasePowerLaw,
    ResolutionError,
    estimate_character,
    estimate_field_character,
    indicator_curve,
    make_grid,
    max_fit_radius,
    shift_consistency,
)
from decaylab.initial_data import generate


@pytest.fixture(scope="module")
def wide_grid():
    """Five dyadic shells below the fit radius: enough to classify."""
    return make_grid(2, 128, 32.0 * 2.0 * np.pi)


def power_law_field(grid, q, *, cutoff=1.0, seed=None):
    kind = PowerLaw(q, cutoff) if seed is None else RandomPhasePowerLaw(q, cutoff, seed)
    return generate(DatumSpec(kind=kind), grid)


@pytest.mark.parametrize("q", [-0.5, 0.0, 0.5, 1.0, 2.0])
def test_power_law_character_recovery(wide_grid, q):
    estimate = estimate_field_character(power_law_field(wide_grid, q))
    assert estimate.classification is Classification.FINITE
    assert estimate.is_finite
    assert abs(estimate.exponent - q) <= 0.1
    assert estimate.base_exponent == estimate.exponent
    assert estimate.shells_used >= 3


def test_character_at_derivative_order(wide_grid):
    estimate = estimate_field_character(power_law_field(wide_grid, 0.5), s=1.0)
    assert abs(estimate.exponent - 1.5) <= 0.1
    assert estimate.base_exponent == pytest.approx(estimate.exponent - 1.0)


def test_character_amplitude_invariance(wide_grid):
    small = generate(DatumSpec(kind=PowerLaw(0.5), amplitude=1.0), wide_grid)
    large = generate(DatumSpec(kind=PowerLaw(0.5), amplitude=7.5), wide_grid)
    est_small = estimate_field_character(small)
    est_large = estimate_field_character(large)
    assert est_large.exponent == pytest.approx(est_small.exponent, abs=1e-9)
    assert est_large.slope == pytest.approx(est_small.slope, abs=1e-9)


def test_random_phases_match_deterministic_sibling(wide_grid):
    det = estimate_field_character(power_law_field(wide_grid, 0.5))
    rand = estimate_field_character(power_law_field(wide_grid, 0.5, seed=123))
    # Random phases leave the coefficient modulus untouched, so the mass
    # curve, and hence the fit, must agree to round-off.
    assert rand.exponent == pytest.approx(det.exponent, abs=1e-12)


def test_weighted_mass_dominated_by_ball_radius(wide_grid):
    field = power_law_field(wide_grid, 0.0, seed=7)
    curve0 = indicator_curve(field, 0.0)
    curve1 = indicator_curve(field, 1.0)
    # |xi|^2 <= rho^2 inside each ball, so the order-1 cumulative mass is
    # bounded by rho^2 times the order-0 one.
    assert np.all(curve1.masses <= curve1.radii**2 * curve0.masses + 1e-18)


def test_annulus_classified_infinite(wide_grid):
    field = generate(DatumSpec(kind=Annulus(0.5, 1.0)), wide_grid)
    estimate = estimate_field_character(field)
    assert estimate.classification is Classification.INFINITE
    assert math.isinf(estimate.exponent)
    assert not estimate.is_finite


def test_low_annulus_hits_lower_endpoint(wide_grid):
    xi_min = wide_grid.xi_min
    field = generate(DatumSpec(kind=Annulus(xi_min / 2.0, 2.0 * xi_min)), wide_grid)
    estimate = estimate_field_character(field)
    # All mass sits below the fit window, so the cumulative curve is flat
    # there: indistinguishable from the integrability endpoint.
    assert estimate.classification is Classification.LOWER_ENDPOINT
    assert estimate.exponent == pytest.approx(-wide_grid.dim / 2.0)


def test_lower_endpoint_exponent_shifts_with_order(wide_grid):
    xi_min = wide_grid.xi_min
    field = generate(DatumSpec(kind=Annulus(xi_min / 2.0, 2.0 * xi_min)), wide_grid)
    estimate = estimate_field_character(field, s=1.0)
    assert estimate.classification is Classification.LOWER_ENDPOINT
    assert estimate.exponent == pytest.approx(-wide_grid.dim / 2.0 + 1.0)


@pytest.mark.parametrize("s", [1.0, 2.0])
def test_shift_law(wide_grid, s):
    report = shift_consistency(power_law_field(wide_grid, 0.5), s)
    assert report.defect <= 0.1
    assert report.exponent_at_s == pytest.approx(
        s + report.exponent_at_zero, abs=report.defect + 1e-12
    )


def test_shift_law_refuses_endpoint_classes(wide_grid):
    field = generate(DatumSpec(kind=Annulus(0.5, 1.0)), wide_grid)
    with pytest.raises(ValueError, match="finite"):
        shift_consistency(field, 1.0)


def test_too_coarse_grid_raises():
    grid = make_grid(2, 16, 4.0 * 2.0 * np.pi)
    field = power_law_field(grid, 0.0)
    with pytest.raises(ResolutionError, match="points_per_axis"):
        indicator_curve(field)


def test_max_fit_radius_caps():
    assert max_fit_radius(make_grid(2, 128, 32.0 * 2.0 * np.pi)) == pytest.approx(0.5)
    # Large xi_min: the absolute cap at 1 wins over N/8 resolution cap.
    assert max_fit_radius(make_grid(2, 64, 2.0 * np.pi)) == pytest.approx(1.0)


def synthetic_curve(radii, masses):
    radii = np.asarray(radii, dtype=float)
    return DecayIndicatorCurve(
        s=0.0,
        radii=radii,
        masses=np.asarray(masses, dtype=float),
        weights=np.ones_like(radii),
        dim=2,
        xi_min=radii[0],
    )


def test_exact_power_curve_fits_exactly():
    radii = 0.03125 * 2.0 ** np.arange(5)
    r_true = 0.75
    curve = synthetic_curve(radii, 3.0 * radii ** (2.0 * r_true + 2.0))
    estimate = estimate_character(curve)
    assert estimate.classification is Classification.FINITE
    assert estimate.exponent == pytest.approx(r_true, abs=1e-12)
    assert estimate.slope_stderr == pytest.approx(0.0, abs=1e-9)


def test_empty_curve_classified_infinite():
    radii = 0.03125 * 2.0 ** np.arange(5)
    estimate = estimate_character(synthetic_curve(radii, np.zeros(5)))
    assert estimate.classification is Classification.INFINITE
    assert estimate.shells_used == 0


def test_local_slopes_of_exact_power_curve():
    radii = 0.0625 * 2.0 ** np.arange(4)
    curve = synthetic_curve(radii, radii**3.0)
    slopes = curve.local_slopes()
    assert math.isnan(slopes[0])
    assert np.allclose(slopes[1:], 3.0, atol=1e-12)


def test_curve_csv_round_trip(tmp_path, wide_grid):
    curve = indicator_curve(power_law_field(wide_grid, 1.0))
    path = tmp_path / "curve.csv"
    curve.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "rho,mass,slope_local"
    assert len(lines) == 1 + len(curve.radii)
    first = lines[1].split(",")
    assert float(first[0]) == curve.radii[0]
    assert float(first[1]) == curve.masses[0]
    assert first[2] == ""  # no slope before the first shell
    last = lines[-1].split(",")
    assert float(last[2]) == pytest.approx(curve.local_slopes()[-1], abs=1e-15)
