"""Initial datum constructors with prescribed low-frequency scaling.

Each datum fixes the coefficient modulus as a radial profile of ``|xi|``;
random variants draw phases while keeping the modulus exact, so the measured
decay character of a seeded field matches its deterministic sibling.
Realness is built in: deterministic profiles are real and even in ``xi``,
random phases are generated by taking the transform of real white noise and
rescaling its modulus, which preserves Hermitian symmetry without any
post-hoc projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import SpectralField
from .grid import SpectralGrid


@dataclass(frozen=True)
class PowerLaw:
    """Modulus ``|xi|^q`` cut off at ``|xi| = cutoff``; character ``q``."""

    q: float
    cutoff: float = 1.0


@dataclass(frozen=True)
class Gaussian:
    """Modulus ``exp(-|xi|^2 / (2 width^2))``; flat near the origin (character 0)."""

    width: float = 1.0


@dataclass(frozen=True)
class Annulus:
    """Indicator of ``inner <= |xi| <= outer``; vanishing low frequencies."""

    inner: float
    outer: float


@dataclass(frozen=True)
class RandomPhasePowerLaw:
    """Power-law modulus with seeded random phases (Hermitian-constrained)."""

    q: float
    cutoff: float = 1.0
    seed: int = 0


DatumKind = PowerLaw | Gaussian | Annulus | RandomPhasePowerLaw


@dataclass(frozen=True)
class DatumSpec:
    """Full description of an initial datum."""

    kind: DatumKind
    components: int = 1
    amplitude: float = 1.0
    mean_zero: bool = True
    smooth_cutoff: bool = False

    def __post_init__(self) -> None:
        if self.components < 1:
            raise ValueError("components must be >= 1")
        if self.amplitude <= 0.0:
            raise ValueError("amplitude must be positive")


def _taper(x: np.ndarray) -> np.ndarray:
    """Smooth roll-off: 1 below 0.7, cosine-squared down to 0 at 1."""
    ramp = np.clip((x - 0.7) / 0.3, 0.0, 1.0)
    return np.cos(0.5 * np.pi * ramp) ** 2


def _modulus(spec: DatumSpec, grid: SpectralGrid) -> np.ndarray:
    kind = spec.kind
    kabs = np.sqrt(grid.ksq)
    nonzero = kabs > 0.0
    if isinstance(kind, (PowerLaw, RandomPhasePowerLaw)):
        if kind.q <= -grid.dim / 2.0:
            raise ValueError(
                f"power-law exponent must exceed -dim/2 = {-grid.dim / 2.0} "
                f"for square-integrable data, got {kind.q}"
            )
        if not 0.0 < kind.cutoff <= grid.xi_max * (1.0 + 1e-12):
            raise ValueError(
                f"cutoff {kind.cutoff} outside resolvable range "
                f"(0, {grid.xi_max}]"
            )
        with np.errstate(divide="ignore", invalid="ignore"):
            mod = np.where(nonzero, kabs, 1.0) ** kind.q
        mod[~nonzero] = 0.0
        if spec.smooth_cutoff:
            mod *= _taper(kabs / kind.cutoff)
        else:
            mod *= kabs <= kind.cutoff
    elif isinstance(kind, Gaussian):
        if kind.width <= 0.0:
            raise ValueError(f"width must be positive, got {kind.width}")
        mod = np.exp(-grid.ksq / (2.0 * kind.width**2))
    elif isinstance(kind, Annulus):
        if not 0.0 < kind.inner < kind.outer:
            raise ValueError(
                f"annulus needs 0 < inner < outer, got [{kind.inner}, {kind.outer}]"
            )
        inside = (kabs >= kind.inner) & (kabs <= kind.outer)
        if spec.smooth_cutoff:
            mod = inside * _taper(kabs / kind.outer)
        else:
            mod = inside.astype(float)
    else:
        raise TypeError(f"unrecognised datum kind {kind!r}")
    return spec.amplitude * mod


def generate(spec: DatumSpec, grid: SpectralGrid) -> SpectralField:
    """Build the coefficient field for ``spec`` on ``grid``."""
    modulus = _modulus(spec, grid)
    shape = (spec.components,) + grid.shape
    coeffs = np.empty(shape, dtype=np.complex128)
    if isinstance(spec.kind, RandomPhasePowerLaw):
        rng = np.random.default_rng(spec.kind.seed)
        npts = grid.points_per_axis**grid.dim
        for c in range(spec.components):
            noise = np.fft.fftn(rng.standard_normal(grid.shape)) / npts
            mag = np.abs(noise)
            phase = np.where(mag > 1e-300, noise / np.where(mag > 0, mag, 1.0), 1.0)
            coeffs[c] = modulus * phase
    else:
        coeffs[:] = modulus
    if spec.mean_zero:
        coeffs[(slice(None),) + (0,) * grid.dim] = 0.0
    return SpectralField(grid, coeffs)


def solenoidal_project(field: SpectralField) -> SpectralField:
    """Remove the longitudinal part: ``u_hat -= xi (xi . u_hat) / |xi|^2``.

    Idempotent; the zero mode is untouched.  Raises for scalar fields.
    """
    if field.components != field.grid.dim:
        raise ValueError(
            f"projection needs a {field.grid.dim}-component field, "
            f"got {field.components}"
        )
    grid = field.grid
    out = field.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_ksq = np.where(grid.ksq > 0.0, 1.0 / grid.ksq, 0.0)
    dot = np.zeros(grid.shape, dtype=np.complex128)
    for j, w in enumerate(grid.wavenumbers):
        dot += w * out.coeffs[j]
    dot *= inv_ksq
    for j, w in enumerate(grid.wavenumbers):
        out.coeffs[j] -= w * dot
    return out
