"""Periodic Fourier lattice underlying every field in the package.

The physical domain is the torus ``[0, box_length)^dim`` sampled on a uniform
grid with ``points_per_axis`` points per direction.  Wavenumbers live on the
integer lattice scaled by ``xi_min = 2*pi/box_length``; a large box therefore
resolves low frequencies finely, which is what the decay diagnostics need.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid and its wavenumber lattice.

    Parameters
    ----------
    dim : int
        Spatial dimension, 2 or 3.
    points_per_axis : int
        Number of collocation points per direction (power of two, >= 8).
    box_length : float
        Side length of the periodic box.
    """

    dim: int
    points_per_axis: int
    box_length: float

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.points_per_axis < 8 or not _is_power_of_two(self.points_per_axis):
            raise ValueError(
                "points_per_axis must be a power of two >= 8, got "
                f"{self.points_per_axis}"
            )
        if not (self.box_length > 0.0 and np.isfinite(self.box_length)):
            raise ValueError(f"box_length must be positive, got {self.box_length}")

    @property
    def xi_min(self) -> float:
        """Smallest positive wavenumber magnitude, ``2*pi/box_length``."""
        return 2.0 * np.pi / self.box_length

    @property
    def xi_max(self) -> float:
        """Largest resolvable axis wavenumber, ``xi_min * N/2``."""
        return self.xi_min * (self.points_per_axis // 2)

    @property
    def cell_measure(self) -> float:
        """Spectral quadrature weight per lattice mode, ``xi_min**dim``."""
        return self.xi_min**self.dim

    @property
    def dx(self) -> float:
        """Physical grid spacing."""
        return self.box_length / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @cached_property
    def mode_index(self) -> tuple[np.ndarray, ...]:
        """Integer mode numbers per axis in FFT storage order."""
        n = self.points_per_axis
        k = np.fft.fftfreq(n, d=1.0 / n)
        return tuple(k.astype(np.float64) for _ in range(self.dim))

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Dense wavenumber component arrays, each of shape ``self.shape``."""
        axes = [self.xi_min * k for k in self.mode_index]
        mesh = np.meshgrid(*axes, indexing="ij")
        return tuple(np.ascontiguousarray(m) for m in mesh)

    @cached_property
    def ksq(self) -> np.ndarray:
        """Dense ``|xi|^2`` array of shape ``self.shape``."""
        out = np.zeros(self.shape)
        for w in self.wavenumbers:
            out += w * w
        return np.ascontiguousarray(out)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Boolean two-thirds-rule mask: True where every ``|k_i| <= N/3``."""
        n = self.points_per_axis
        keep_1d = [np.abs(k) <= n / 3.0 for k in self.mode_index]
        mesh = np.meshgrid(*keep_1d, indexing="ij")
        mask = mesh[0]
        for m in mesh[1:]:
            mask = mask & m
        return np.ascontiguousarray(mask)

    def physical_coords(self) -> tuple[np.ndarray, ...]:
        x = np.arange(self.points_per_axis) * self.dx
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))


def make_grid(dim: int, points_per_axis: int, box_length: float) -> SpectralGrid:
    """Validate parameters and build a :class:`SpectralGrid`."""
    return SpectralGrid(dim=dim, points_per_axis=points_per_axis, box_length=box_length)
