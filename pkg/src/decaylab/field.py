"""Multi-component spectral fields and the operations every module shares.

Conventions (fixed once, used everywhere):

* the forward transform carries the ``1/N^dim`` factor, so stored
  coefficients are Fourier-series coefficients of the periodic field;
* norms and shell masses are quadratures on the wavenumber lattice with
  weight ``cell_measure = xi_min^dim`` per mode, i.e.
  ``sobolev_norm_sq(u, s) = sum_k |xi_k|^(2s) |u_hat_k|^2 * cell_measure``.
  With this convention the squared L2 norm equals the physical-space
  quadrature of ``|u|^2`` times ``(2*pi/box_length**2)**dim`` (exactly
  ``(2*pi)**-dim`` on the ``2*pi`` box); only log-slopes of these
  quantities ever enter the decay diagnostics, so the constant is harmless
  as long as it is used consistently.
* the zero mode is excluded from shell masses but retained in norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import SpectralGrid


@dataclass
class SpectralField:
    """Fourier coefficients of a real vector field on a periodic grid.

    ``coeffs`` has shape ``(components,) + grid.shape`` with complex entries
    stored in FFT index order along each axis.
    """

    grid: SpectralGrid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        expected = self.grid.shape
        if self.coeffs.ndim != self.grid.dim + 1 or self.coeffs.shape[1:] != expected:
            raise ValueError(
                f"coefficient array shape {self.coeffs.shape} does not match "
                f"(components,) + {expected}"
            )
        if self.coeffs.dtype != np.complex128:
            self.coeffs = self.coeffs.astype(np.complex128)
        self.coeffs = np.ascontiguousarray(self.coeffs)

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    def flat(self) -> np.ndarray:
        """View of the coefficients as ``(components, modes)``."""
        return self.coeffs.reshape(self.components, -1)


def from_physical(grid: SpectralGrid, values: np.ndarray) -> SpectralField:
    """Transform real sample values ``(components,) + grid.shape`` to coefficients."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == grid.dim:
        values = values[np.newaxis]
    if values.shape[1:] != grid.shape:
        raise ValueError(
            f"sample array shape {values.shape} does not match grid {grid.shape}"
        )
    npts = grid.points_per_axis**grid.dim
    axes = tuple(range(1, grid.dim + 1))
    coeffs = np.fft.fftn(values, axes=axes) / npts
    return SpectralField(grid, coeffs)


def to_physical(field: SpectralField) -> np.ndarray:
    """Inverse transform to physical samples; imaginary residue is discarded.

    The input is expected to be Hermitian-symmetric (a real field); use
    :func:`hermitian_defect` to check when in doubt.
    """
    npts = field.grid.points_per_axis**field.grid.dim
    axes = tuple(range(1, field.grid.dim + 1))
    values = np.fft.ifftn(field.coeffs, axes=axes) * npts
    return np.ascontiguousarray(values.real)


def _conjugate_reflection(coeffs: np.ndarray, dim: int) -> np.ndarray:
    """Return ``conj(c(-k))`` on the FFT lattice for ``(m,)+shape`` arrays."""
    out = coeffs
    for ax in range(1, dim + 1):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return np.conj(out)


def hermitian_defect(field: SpectralField) -> float:
    """Max absolute deviation from ``c(-k) == conj(c(k))``."""
    mirror = _conjugate_reflection(field.coeffs, field.grid.dim)
    return float(np.max(np.abs(field.coeffs - mirror)))


def is_real_field(field: SpectralField, tol: float = 1e-12) -> bool:
    scale = float(np.max(np.abs(field.coeffs)))
    if scale == 0.0:
        return True
    return hermitian_defect(field) <= tol * scale


def dealias(field: SpectralField) -> SpectralField:
    """Two-thirds-rule truncation: zero every mode with some ``|k_i| > N/3``."""
    out = field.copy()
    out.coeffs *= field.grid.dealias_mask
    return out


def sobolev_norm_sq(field: SpectralField, s: float) -> float:
    """Squared homogeneous Sobolev norm of order ``s`` (all components).

    The zero mode contributes only at ``s == 0``.
    """
    if s < 0:
        raise ValueError(f"norm order must be >= 0, got {s}")
    return kernels.weighted_mode_sum(
        field.flat(),
        field.grid.ksq.reshape(-1),
        float(s),
        np.inf,
        True,
    ) * field.grid.cell_measure


def shell_mass(field: SpectralField, s: float, rho: float) -> float:
    """Weighted spectral mass ``sum_{0<|xi|<=rho} |xi|^(2s) |u_hat|^2 * cell``."""
    if rho <= 0:
        raise ValueError(f"shell radius must be positive, got {rho}")
    return kernels.weighted_mode_sum(
        field.flat(),
        field.grid.ksq.reshape(-1),
        float(s),
        float(rho) ** 2,
        False,
    ) * field.grid.cell_measure


def modes_in_shell(grid: SpectralGrid, rho: float) -> int:
    """Number of nonzero lattice modes with ``|xi| <= rho``."""
    return kernels.count_modes_in_ball(grid.ksq.reshape(-1), float(rho) ** 2)


def physical_energy(field: SpectralField) -> float:
    """Physical-space quadrature of ``|u|^2`` scaled to match ``sobolev_norm_sq(u, 0)``.

    Computes ``(2*pi/L^2)^dim * (L/N)^dim * sum_x |u(x)|^2``; agreement with
    the spectral sum is the discrete Plancherel identity.
    """
    grid = field.grid
    values = to_physical(field)
    quad = float(np.sum(values**2)) * grid.dx**grid.dim
    return quad * (2.0 * np.pi / grid.box_length**2) ** grid.dim
