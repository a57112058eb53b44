"""Power-law fitting, proven bound tables, and bound checking."""

import math

import numpy as np
import pytest

from decaylab import (
    BoundPrediction,
    FitError,
    HypothesisError,
    Model,
    NormTimeSeries,
    RateFit,
    WindowError,
    box_validity_window,
    check_bounds,
    fit_power_law,
    geometric_sample_times,
    make_grid,
    predict_bounds,
)

TWO_PI = 2.0 * np.pi


def synthetic_series(exponent, prefactor=3.0, t_end=100.0, noise=None, seed=0):
    times = geometric_sample_times(t_end, t0=0.5, growth=1.2, include_zero=False)
    values = prefactor * (1.0 + times) ** (-exponent)
    if noise is not None:
        rng = np.random.default_rng(seed)
        values *= np.exp(noise * rng.standard_normal(len(times)))
    return NormTimeSeries(times=times, norms_sq={0.0: values})


# ---------------------------------------------------------------------------
# fitting


@pytest.mark.parametrize("exponent", [0.5, 1.0, 1.5, 2.5])
def test_fit_recovers_exact_power_law(exponent):
    fit = fit_power_law(synthetic_series(exponent), 0.0, (0.5, 100.0))
    assert abs(fit.exponent - exponent) <= 1e-10
    assert fit.prefactor == pytest.approx(3.0, rel=1e-10)
    assert fit.residual_rms <= 1e-12
    assert fit.n_samples >= 8


def test_fit_constant_series_is_flat():
    fit = fit_power_law(synthetic_series(0.0), 0.0, (0.5, 100.0))
    assert abs(fit.exponent) <= 1e-12


def test_fit_refuses_non_power_law():
    series = synthetic_series(1.0, noise=1.5, seed=3)
    with pytest.raises(FitError, match="not power-law"):
        fit_power_law(series, 0.0, (0.5, 100.0))


def test_fit_refuses_sparse_window():
    series = synthetic_series(1.0)
    with pytest.raises(FitError, match="need at least"):
        fit_power_law(series, 0.0, (40.0, 100.0))


def test_fit_refuses_nonpositive_values():
    times = np.arange(1.0, 16.0)
    values = np.ones(15)
    values[7] = 0.0
    series = NormTimeSeries(times=times, norms_sq={0.0: values})
    with pytest.raises(FitError, match="positive"):
        fit_power_law(series, 0.0, (1.0, 15.0))


def test_fit_validates_window_and_order():
    series = synthetic_series(1.0)
    with pytest.raises(WindowError, match="window"):
        fit_power_law(series, 0.0, (5.0, 2.0))
    with pytest.raises(KeyError, match="order"):
        fit_power_law(series, 1.0, (0.5, 100.0))


# ---------------------------------------------------------------------------
# proven bounds


def test_linear_prediction_two_sided():
    p = predict_bounds(Model.LINEAR, 1.0, 0.0, dim=2)
    assert (p.upper_exponent, p.lower_exponent) == (1.0, 1.0)
    assert p.two_sided and p.regime == "two-sided"
    with pytest.raises(HypothesisError, match="dimension"):
        predict_bounds(Model.LINEAR, 1.0, 0.0)
    with pytest.raises(HypothesisError, match="-dim/2"):
        predict_bounds(Model.LINEAR, 1.0, -1.5, dim=2)


def test_qg_l2_regimes():
    sharp = predict_bounds(Model.QG_L2, 1.0, 0.0)
    assert (sharp.upper_exponent, sharp.lower_exponent) == (1.0, 1.0)
    assert sharp.regime == "sharp"

    gap = predict_bounds(Model.QG_L2, 0.75, 0.5)
    assert gap.upper_exponent == pytest.approx((2.0 - 0.75) / 0.75)
    assert gap.lower_exponent == pytest.approx((1.0 + 0.5) / 0.75)
    assert gap.regime == "gap"
    assert gap.lower_exponent > gap.upper_exponent  # slower-decay bound above

    upper_only = predict_bounds(Model.QG_L2, 0.75, 1.8)
    assert upper_only.upper_exponent == pytest.approx((2.0 - 0.75) / 0.75)
    assert upper_only.lower_exponent is None
    assert upper_only.regime == "upper-only"
    assert not upper_only.two_sided


def test_qg_hypothesis_errors():
    with pytest.raises(HypothesisError, match="exceed -1"):
        predict_bounds(Model.QG_L2, 1.0, -1.2)
    with pytest.raises(HypothesisError, match="finite"):
        predict_bounds(Model.QG_L2, 1.0, math.inf)
    with pytest.raises(HypothesisError, match=r"\(1/2, 1\]"):
        predict_bounds(Model.QG_HS, 0.5, 0.0, s=1.0)
    with pytest.raises(HypothesisError, match="s >= alpha"):
        predict_bounds(Model.QG_HS, 0.75, 0.0, s=0.3)


def test_qg_derivative_and_difference_tables():
    hs = predict_bounds(Model.QG_HS, 0.75, 0.5, s=1.0)
    assert hs.upper_exponent == pytest.approx(3.0)
    assert hs.lower_exponent is None

    diff = predict_bounds(Model.QG_DIFFERENCE, 1.0, 0.0)
    assert diff.upper_exponent == pytest.approx(1.0)
    assert diff.lower_exponent is None


def test_compressible_tables():
    sharp = predict_bounds(Model.COMPRESSIBLE_L2, 1.0, 0.0, epsilon=1.0)
    assert (sharp.upper_exponent, sharp.lower_exponent) == (1.5, 1.5)
    assert sharp.regime == "sharp"

    capped = predict_bounds(Model.COMPRESSIBLE_L2, 1.0, 2.0, epsilon=1.0)
    assert capped.upper_exponent == pytest.approx(2.5)
    assert capped.lower_exponent is None

    diff = predict_bounds(Model.COMPRESSIBLE_DIFFERENCE, 1.0, 0.0)
    assert diff.upper_exponent == pytest.approx(1.75)

    hs = predict_bounds(Model.COMPRESSIBLE_HS, 1.0, 0.0, s=1.0)
    assert hs.upper_exponent == pytest.approx(2.5)

    with pytest.raises(HypothesisError, match="alpha = 1 only"):
        predict_bounds(Model.COMPRESSIBLE_L2, 0.75, 0.0)
    with pytest.raises(HypothesisError, match="-3/2"):
        predict_bounds(Model.COMPRESSIBLE_L2, 1.0, -1.6)
    with pytest.raises(HypothesisError, match="s >= 1"):
        predict_bounds(Model.COMPRESSIBLE_HS, 1.0, 0.0, s=0.5)


def test_qg_upper_bound_continuous_and_monotone():
    alpha = 0.75
    kink = 1.0 - alpha
    left = predict_bounds(Model.QG_L2, alpha, kink - 1e-9).upper_exponent
    right = predict_bounds(Model.QG_L2, alpha, kink + 1e-9).upper_exponent
    assert abs(left - right) <= 1e-6
    values = [
        predict_bounds(Model.QG_L2, alpha, r).upper_exponent
        for r in np.arange(-0.9, 2.0, 0.05)
    ]
    assert np.all(np.diff(values) >= -1e-12)


def test_prediction_container_validation():
    with pytest.raises(ValueError, match="at least one bound"):
        BoundPrediction(Model.QG_L2, 0.0, None, None, "none")
    with pytest.raises(ValueError, match="inconsistent"):
        BoundPrediction(Model.QG_L2, 0.0, 2.0, 1.0, "bad")


# ---------------------------------------------------------------------------
# validity windows and bound checks


def test_box_validity_window_values():
    qg_grid = make_grid(2, 256, 128.0 * TWO_PI)
    assert box_validity_window(qg_grid, 1.0) == pytest.approx((1.0, 1638.4))
    comp_grid = make_grid(3, 64, 16.0 * TWO_PI)
    assert box_validity_window(comp_grid, 1.0) == pytest.approx((1.0, 25.6))


def test_box_validity_window_refuses_small_box():
    grid = make_grid(2, 32, 8.0 * TWO_PI)
    with pytest.raises(WindowError, match="box_length >="):
        box_validity_window(grid, 1.0, kappa=1e9)
    with pytest.raises(HypothesisError, match="alpha"):
        box_validity_window(grid, 1.5)


def make_fit(exponent, window=(1.0, 100.0)):
    return RateFit(
        s=0.0,
        exponent=exponent,
        prefactor=1.0,
        residual_rms=0.01,
        n_samples=20,
        window=window,
    )


def test_check_bounds_two_sided():
    prediction = predict_bounds(Model.QG_L2, 1.0, 0.0)
    ok = check_bounds(make_fit(1.02), prediction, 0.1)
    assert ok.passed
    too_slow = check_bounds(make_fit(0.6), prediction, 0.1)
    assert not too_slow.passed
    assert "slower" in too_slow.explanation
    too_fast = check_bounds(make_fit(1.2), prediction, 0.1)
    assert not too_fast.passed
    assert "faster" in too_fast.explanation and "lower bound" in too_fast.explanation


def test_check_bounds_one_sided_upper():
    prediction = predict_bounds(Model.COMPRESSIBLE_DIFFERENCE, 1.0, 0.5)
    # upper bound 2.25: anything at least 2.25*(1-tol) passes, faster is fine
    fast = check_bounds(make_fit(3.0), prediction, 0.2)
    assert fast.passed
    assert "one-sided" in fast.explanation
    slow = check_bounds(make_fit(1.5), prediction, 0.2)
    assert not slow.passed


def test_check_bounds_window_containment():
    prediction = predict_bounds(Model.QG_L2, 1.0, 0.0)
    with pytest.raises(WindowError, match="mismatch"):
        check_bounds(make_fit(1.0, window=(1.0, 100.0)), prediction, 0.1, (1.0, 50.0))
    ok = check_bounds(make_fit(1.0, (2.0, 40.0)), prediction, 0.1, (1.0, 50.0))
    assert ok.passed
