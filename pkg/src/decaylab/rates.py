"""Power-law fits of norm series and the proven decay-exponent table.

The central objects are :func:`fit_power_law` (measure an algebraic decay
exponent over a trusted window), :func:`predict_bounds` (the proven
upper/lower exponents for each model and regime), and :func:`check_bounds`
(compare measurement against proof, honouring one-sidedness: a decay faster
than a proven upper bound is consistent with it).

All exponents refer to squared norms: "exponent sigma" means the squared
norm behaves like ``(1+t)^(-sigma)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .series import NormTimeSeries

#: Fits with RMS log-residual above this are refused as "not a power law".
MAX_FIT_RESIDUAL = 0.5

#: Fraction of the slowest mode's dissipation time still considered
#: unpolluted by the finite box.
BOX_SAFETY_FRACTION = 0.1

MIN_FIT_SAMPLES = 8


class FitError(ValueError):
    """Series does not admit a trustworthy power-law fit."""


class HypothesisError(ValueError):
    """Requested parameters sit outside a theorem's hypotheses."""


class WindowError(ValueError):
    """Fit/validity windows are inconsistent or unusable."""


@dataclass(frozen=True)
class RateFit:
    """Least-squares power law ``norm_sq ~ prefactor * (1+t)^(-exponent)``."""

    s: float
    exponent: float
    prefactor: float
    residual_rms: float
    n_samples: int
    window: tuple[float, float]


def fit_power_law(
    series: NormTimeSeries, s: float, window: tuple[float, float]
) -> RateFit:
    """Fit ``log norm_sq`` against ``log(1+t)`` over the window (inclusive)."""
    lo, hi = window
    if not (0.0 <= lo < hi):
        raise WindowError(f"bad fit window [{lo}, {hi}]")
    if s not in series.norms_sq:
        raise KeyError(f"series carries no order-{s} column")
    mask = (series.times >= lo) & (series.times <= hi)
    t = series.times[mask]
    y = series.column(s)[mask]
    if len(t) < MIN_FIT_SAMPLES:
        raise FitError(
            f"only {len(t)} samples inside [{lo:g}, {hi:g}], "
            f"need at least {MIN_FIT_SAMPLES}"
        )
    if np.any(y <= 0.0) or not np.all(np.isfinite(y)):
        raise FitError("norm series must be positive and finite inside the window")
    x = np.log1p(t)
    z = np.log(y)
    slope, intercept = np.polyfit(x, z, 1)
    resid = z - (intercept + slope * x)
    rms = float(np.sqrt(np.mean(resid**2)))
    if rms > MAX_FIT_RESIDUAL:
        raise FitError(
            f"series is not power-law over [{lo:g}, {hi:g}]: "
            f"RMS log-residual {rms:.3g} exceeds {MAX_FIT_RESIDUAL}"
        )
    return RateFit(
        s=float(s),
        exponent=float(-slope),
        prefactor=float(np.exp(intercept)),
        residual_rms=rms,
        n_samples=int(len(t)),
        window=(float(lo), float(hi)),
    )


class Model(enum.Enum):
    LINEAR = "linear"
    QG_L2 = "qg_l2"
    QG_HS = "qg_hs"
    QG_DIFFERENCE = "qg_difference"
    COMPRESSIBLE_L2 = "compressible_l2"
    COMPRESSIBLE_HS = "compressible_hs"
    COMPRESSIBLE_DIFFERENCE = "compressible_difference"


@dataclass(frozen=True)
class BoundPrediction:
    """Proven decay exponents for a squared norm.

    ``upper_exponent`` comes from an upper bound on the norm (the solution
    decays *at least* this fast); ``lower_exponent`` from a lower bound (at
    most this fast).  When both exist, ``lower_exponent >= upper_exponent``,
    with equality exactly in sharp regimes.
    """

    model: Model
    s: float
    upper_exponent: float | None
    lower_exponent: float | None
    regime: str

    def __post_init__(self) -> None:
        if self.upper_exponent is None and self.lower_exponent is None:
            raise ValueError("prediction must carry at least one bound")
        if (
            self.upper_exponent is not None
            and self.lower_exponent is not None
            and self.lower_exponent < self.upper_exponent - 1e-12
        ):
            raise ValueError(
                "inconsistent bounds: lower-bound exponent "
                f"{self.lower_exponent} below upper-bound exponent "
                f"{self.upper_exponent}"
            )

    @property
    def two_sided(self) -> bool:
        return self.upper_exponent is not None and self.lower_exponent is not None


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise HypothesisError(message)


def predict_bounds(
    model: Model,
    alpha: float,
    r_star: float,
    s: float = 0.0,
    epsilon: float | None = None,
    dim: int | None = None,
) -> BoundPrediction:
    """Proven decay exponents of the squared norm for the given model.

    ``r_star`` is the order-zero decay character of the datum and must be
    finite and inside the relevant theorem's hypotheses; violations raise
    :class:`HypothesisError` naming the failed condition.
    """
    _require(math.isfinite(r_star), "decay character must be finite for rate bounds")
    _require(0.0 < alpha <= 1.0, f"alpha out of range (0, 1], got {alpha}")

    if model is Model.LINEAR:
        _require(dim is not None, "linear predictions need the spatial dimension")
        _require(
            r_star > -dim / 2.0,
            f"character must exceed -dim/2 = {-dim / 2.0}, got {r_star}",
        )
        sigma = (dim / 2.0 + r_star + s) / alpha
        return BoundPrediction(model, s, sigma, sigma, "two-sided")

    if model in (Model.QG_L2, Model.QG_HS, Model.QG_DIFFERENCE):
        _require(r_star > -1.0, f"character must exceed -1, got {r_star}")

    if model is Model.QG_L2:
        _require(s == 0.0, "qg_l2 predicts the order-0 norm only")
        if r_star <= 1.0 - alpha:
            upper = (1.0 + r_star) / alpha
        else:
            upper = (2.0 - alpha) / alpha
        lower_max = min(1.0, 2.0 * (1.0 - alpha))
        lower = (1.0 + r_star) / alpha if r_star <= lower_max else None
        if r_star <= 1.0 - alpha:
            regime = "sharp"
        elif lower is not None:
            regime = "gap"
        else:
            regime = "upper-only"
        return BoundPrediction(model, s, upper, lower, regime)

    if model is Model.QG_HS:
        _require(0.5 < alpha <= 1.0, f"alpha out of range (1/2, 1], got {alpha}")
        _require(s >= alpha, f"derivative order must satisfy s >= alpha, got s={s}")
        if r_star <= 1.0 - alpha:
            upper = (s + 1.0 + r_star) / alpha
        else:
            upper = (s + 2.0 - alpha) / alpha
        return BoundPrediction(model, s, upper, None, "upper-only")

    if model is Model.QG_DIFFERENCE:
        _require(s == 0.0, "qg_difference predicts the order-0 norm only")
        if r_star >= 1.0 - alpha:
            upper = min(3.0 - 2.0 * alpha, 2.0) / alpha
        elif r_star >= alpha - 1.0:
            upper = min(2.0, 2.0 - alpha + r_star) / alpha
        else:
            upper = (2.0 - alpha + r_star) / alpha
        return BoundPrediction(model, s, upper, None, "upper-only")

    # Compressible family: three space dimensions, alpha fixed at 1.
    _require(alpha == 1.0, "compressible bounds hold for alpha = 1 only")
    if epsilon is not None:
        _require(epsilon > 0.0, f"epsilon must be positive, got {epsilon}")
    _require(r_star > -1.5, f"character must exceed -3/2, got {r_star}")

    if model is Model.COMPRESSIBLE_L2:
        _require(s == 0.0, "compressible_l2 predicts the order-0 norm only")
        upper = min(1.5 + r_star, 2.5)
        lower = 1.5 + r_star if r_star <= 1.0 else None
        regime = "sharp" if lower is not None else "upper-only"
        return BoundPrediction(model, s, upper, lower, regime)

    if model is Model.COMPRESSIBLE_DIFFERENCE:
        _require(s == 0.0, "compressible_difference predicts the order-0 norm only")
        upper = min(1.75 + r_star, 2.5)
        return BoundPrediction(model, s, upper, None, "upper-only")

    if model is Model.COMPRESSIBLE_HS:
        _require(s >= 1.0, f"derivative order must satisfy s >= 1, got {s}")
        upper = s + min(2.5, 1.5 + r_star)
        return BoundPrediction(model, s, upper, None, "upper-only")

    raise ValueError(f"unrecognised model {model!r}")


def box_validity_window(grid, alpha: float, kappa: float = 1.0) -> tuple[float, float]:
    """Time window on which the periodic box mimics whole-space decay.

    Below ``t_lo = 1`` the algebraic asymptotics have not set in; beyond
    ``t_hi`` the slowest resolved mode (at ``xi_min``) has itself decayed
    appreciably and the discrete spectrum floor takes over.
    """
    _require(0.0 < alpha <= 1.0, f"alpha out of range (0, 1], got {alpha}")
    _require(kappa > 0.0, f"kappa must be positive, got {kappa}")
    t_lo = 1.0
    t_hi = BOX_SAFETY_FRACTION / (kappa * grid.xi_min ** (2.0 * alpha))
    if t_hi / t_lo < 10.0:
        min_box = 2.0 * np.pi * (10.0 * kappa / BOX_SAFETY_FRACTION) ** (1.0 / (2.0 * alpha))
        raise WindowError(
            f"validity window [{t_lo:g}, {t_hi:g}] spans less than a decade; "
            f"need box_length >= {min_box:g}"
        )
    return t_lo, t_hi


@dataclass(frozen=True)
class BoundCheck:
    """Outcome of comparing a measured exponent with proven bounds."""

    passed: bool
    fit_exponent: float
    prediction: BoundPrediction
    tolerance: float
    margin_upper: float | None  # fit - upper*(1-tol); >= 0 passes
    margin_lower: float | None  # lower*(1+tol) - fit; >= 0 passes
    explanation: str


def check_bounds(
    fit: RateFit,
    prediction: BoundPrediction,
    tolerance: float,
    validity_window: tuple[float, float] | None = None,
) -> BoundCheck:
    """Compare a fitted exponent against proven bounds at a tolerance.

    An upper bound on the norm only demands the fit be at least that fast:
    decaying faster than the proven upper bound is a PASS and is reported as
    such.  A lower bound caps how fast the fit may be.
    """
    if validity_window is not None:
        lo, hi = validity_window
        if fit.window[0] < lo - 1e-9 or fit.window[1] > hi + 1e-9:
            raise WindowError(
                f"window mismatch: fit window {fit.window} not contained in "
                f"validity window [{lo:g}, {hi:g}]"
            )
    margin_upper = None
    margin_lower = None
    notes = []
    passed = True
    if prediction.upper_exponent is not None:
        margin_upper = fit.exponent - prediction.upper_exponent * (1.0 - tolerance)
        if margin_upper < 0.0:
            passed = False
            notes.append(
                f"measured {fit.exponent:.4g} is slower than the proven "
                f"upper bound {prediction.upper_exponent:.4g} beyond tolerance"
            )
        elif fit.exponent > prediction.upper_exponent:
            notes.append(
                f"measured {fit.exponent:.4g} decays faster than the proven "
                f"upper bound {prediction.upper_exponent:.4g}; consistent, the "
                "bound is one-sided"
            )
    if prediction.lower_exponent is not None:
        margin_lower = prediction.lower_exponent * (1.0 + tolerance) - fit.exponent
        if margin_lower < 0.0:
            passed = False
            notes.append(
                f"measured {fit.exponent:.4g} is faster than the proven "
                f"lower bound {prediction.lower_exponent:.4g} allows"
            )
    if passed and not notes:
        notes.append(
            f"measured {fit.exponent:.4g} consistent with "
            f"{prediction.regime} bounds at tolerance {tolerance:g}"
        )
    return BoundCheck(
        passed=passed,
        fit_exponent=fit.exponent,
        prediction=prediction,
        tolerance=tolerance,
        margin_upper=margin_upper,
        margin_lower=margin_lower,
        explanation="; ".join(notes),
    )
