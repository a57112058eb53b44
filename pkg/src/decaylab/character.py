"""Low-frequency decay character estimation from spectral shell masses.

For initial data whose weighted spectral mass near the origin scales like
``mass(rho) ~ C * rho^(2*r + dim)``, the exponent ``r`` controls the
algebraic decay rate of the dissipative evolution.  This module measures
``r`` from a field on a finite box: cumulative masses over dyadic balls,
log-log slope, and endpoint classification when the scaling degenerates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .field import SpectralField, shell_mass, modes_in_shell

#: Largest finite exponent the estimator will report; steeper curves are
#: classified as vanishing low-frequency mass.
R_RESOLVABLE = 10.0

#: Near-flat slope threshold below which data is classified at the lower
#: endpoint (slower-than-algebraic decay).
FLAT_SLOPE = 0.1

#: Relative mass floor: shells below ``MASS_FLOOR * max mass`` count as empty.
MASS_FLOOR = 1e-14


class ResolutionError(ValueError):
    """Grid cannot resolve enough dyadic shells for an estimate."""


class Classification(enum.Enum):
    FINITE = "finite"
    LOWER_ENDPOINT = "lower_endpoint"
    INFINITE = "infinite"


@dataclass(frozen=True)
class DecayIndicatorCurve:
    """Cumulative weighted shell masses over dyadic radii."""

    s: float
    radii: np.ndarray
    masses: np.ndarray
    weights: np.ndarray  # lattice mode count per ball
    dim: int
    xi_min: float

    def local_slopes(self) -> np.ndarray:
        """Log-log slope between consecutive shells (NaN where undefined)."""
        out = np.full(len(self.radii), np.nan)
        for j in range(1, len(self.radii)):
            lo, hi = self.masses[j - 1], self.masses[j]
            if lo > 0.0 and hi > 0.0:
                out[j] = math.log(hi / lo) / math.log(self.radii[j] / self.radii[j - 1])
        return out

    def write_csv(self, path) -> None:
        slopes = self.local_slopes()
        with open(path, "w", newline="") as fh:
            fh.write("rho,mass,slope_local\n")
            for rho, mass, slope in zip(self.radii, self.masses, slopes):
                stext = "" if math.isnan(slope) else f"{slope:.17g}"
                fh.write(f"{rho:.17g},{mass:.17g},{stext}\n")


@dataclass(frozen=True)
class DecayCharacterEstimate:
    """Fitted decay character at derivative order ``s``."""

    s: float
    classification: Classification
    exponent: float        # character at order s (shifted by s relative to base)
    base_exponent: float   # exponent - s, the order-zero character
    slope: float           # fitted log-log slope of the mass curve
    slope_stderr: float
    shells_used: int
    curve: DecayIndicatorCurve = dataclass_field(repr=False)

    @property
    def is_finite(self) -> bool:
        return self.classification is Classification.FINITE


def max_fit_radius(grid) -> float:
    """Upper end of the trustworthy shell ladder, ``min(1, N*xi_min/8)``.

    The cap at 1 keeps the fit in the low-frequency regime; the ``N/8``
    cap keeps it away from the resolution scale.
    """
    return min(1.0, grid.points_per_axis * grid.xi_min / 8.0)


def indicator_curve(field: SpectralField, s: float = 0.0) -> DecayIndicatorCurve:
    """Cumulative mass over dyadic balls ``rho_j = xi_min * 2^j <= rho_max``."""
    grid = field.grid
    rho_max = max_fit_radius(grid)
    n_shells = int(math.floor(math.log2(rho_max / grid.xi_min) + 1e-9)) + 1
    if n_shells < 4:
        need_n = 64
        need_box = 8.0 * 2.0 * np.pi
        raise ResolutionError(
            "fewer than 4 dyadic shells below the fit radius "
            f"{rho_max:g}; need points_per_axis >= {need_n} and "
            f"box_length >= {need_box:g}"
        )
    radii = grid.xi_min * 2.0 ** np.arange(n_shells)
    masses = np.array([shell_mass(field, s, rho) for rho in radii])
    weights = np.array([modes_in_shell(grid, rho) for rho in radii], dtype=float)
    return DecayIndicatorCurve(
        s=float(s),
        radii=radii,
        masses=masses,
        weights=weights,
        dim=grid.dim,
        xi_min=grid.xi_min,
    )


def _weighted_line_fit(x: np.ndarray, y: np.ndarray, w: np.ndarray):
    """Weighted least squares of y on x; returns (slope, stderr)."""
    wsum = w.sum()
    xbar = (w * x).sum() / wsum
    ybar = (w * y).sum() / wsum
    sxx = (w * (x - xbar) ** 2).sum()
    slope = (w * (x - xbar) * (y - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    if len(x) > 2:
        resid = y - (intercept + slope * x)
        dof = len(x) - 2
        var = (w * resid**2).sum() / (wsum * dof / len(x))
        stderr = math.sqrt(max(var, 0.0) / sxx)
    else:
        stderr = 0.0
    return slope, stderr


def estimate_character(curve: DecayIndicatorCurve) -> DecayCharacterEstimate:
    """Classify and fit the decay character from an indicator curve.

    The fit window starts at ``4 * xi_min`` (the lowest shells carry too few
    lattice modes to trust) and each shell is weighted by its mode count.
    """
    dim, s = curve.dim, curve.s
    total = float(curve.masses.max(initial=0.0))
    floor = MASS_FLOOR * total
    slope_cap = 2.0 * R_RESOLVABLE + dim

    def build(classification, exponent, slope, stderr, used):
        base = exponent - s if math.isfinite(exponent) else exponent
        return DecayCharacterEstimate(
            s=s,
            classification=classification,
            exponent=exponent,
            base_exponent=base,
            slope=slope,
            slope_stderr=stderr,
            shells_used=used,
            curve=curve,
        )

    if total <= 0.0:
        # No mass below the fit radius at all: vanishing low-frequency data.
        return build(Classification.INFINITE, math.inf, math.nan, math.nan, 0)

    in_window = curve.radii >= 4.0 * curve.xi_min * (1.0 - 1e-12)
    fit_mask = in_window & (curve.masses > floor)
    n_fit = int(fit_mask.sum())
    if n_fit < 2:
        first_filled = int(np.argmax(curve.masses > floor))
        if curve.masses[0] <= floor and first_filled > 0:
            # Leading empty shells: spectrum vanishes near the origin.
            return build(Classification.INFINITE, math.inf, math.nan, math.nan, n_fit)
        raise ResolutionError(
            f"only {n_fit} shells with usable mass above the floor; "
            "grid resolves too few low-frequency octaves for a slope fit"
        )

    x = np.log(curve.radii[fit_mask])
    y = np.log(curve.masses[fit_mask])
    w = curve.weights[fit_mask]
    slope, stderr = _weighted_line_fit(x, y, w)

    if slope > slope_cap:
        return build(Classification.INFINITE, math.inf, slope, stderr, n_fit)
    if slope < FLAT_SLOPE:
        # Mass barely grows with radius: at (or below) the integrability edge.
        return build(
            Classification.LOWER_ENDPOINT, -dim / 2.0 + s, slope, stderr, n_fit
        )
    exponent = (slope - dim) / 2.0
    return build(Classification.FINITE, exponent, slope, stderr, n_fit)


def estimate_field_character(field: SpectralField, s: float = 0.0) -> DecayCharacterEstimate:
    """Convenience wrapper: indicator curve plus estimate in one call."""
    return estimate_character(indicator_curve(field, s))


@dataclass(frozen=True)
class ShiftConsistencyReport:
    """Agreement of the order-``s`` character with ``s + `` order-zero one."""

    s: float
    exponent_at_s: float
    exponent_at_zero: float
    defect: float


def shift_consistency(field: SpectralField, s: float) -> ShiftConsistencyReport:
    """Check the shift law: the order-``s`` character should equal ``s`` plus
    the order-zero character."""
    est_s = estimate_field_character(field, s)
    est_0 = estimate_field_character(field, 0.0)
    if not (est_s.is_finite and est_0.is_finite):
        raise ValueError(
            "shift consistency needs finite classifications, got "
            f"{est_s.classification.value} at s={s} and "
            f"{est_0.classification.value} at s=0"
        )
    defect = abs(est_s.exponent - (s + est_0.exponent))
    return ShiftConsistencyReport(
        s=float(s),
        exponent_at_s=est_s.exponent,
        exponent_at_zero=est_0.exponent,
        defect=defect,
    )
