"""Pure-numpy reference implementations of the per-mode hot loops.

These mirror the compiled kernels in ``_fastcore.pyx`` exactly (same
signatures, same semantics).  numpy's pairwise ``sum`` keeps the reductions
deterministic for a fixed array layout, matching the compiled tree reduction
to within roundoff.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def weighted_mode_sum(
    coeffs: np.ndarray,
    ksq: np.ndarray,
    s: float,
    rho_sq: float,
    include_zero: bool,
) -> float:
    """Sum of ``|xi|^(2s) * |coeff|^2`` over retained modes, all components.

    ``coeffs`` has shape ``(components, modes)`` and ``ksq`` shape
    ``(modes,)``.  Modes with ``ksq > rho_sq`` are dropped; the zero mode is
    dropped unless ``include_zero``.  The weight at the zero mode is 1 when
    ``s == 0`` and 0 otherwise.
    """
    power = np.abs(coeffs) ** 2
    if power.ndim == 2:
        power = power.sum(axis=0)
    if s == 0.0:
        weight = np.ones_like(ksq)
    elif s == 1.0:
        weight = ksq
    else:
        weight = ksq**s
    keep = ksq <= rho_sq
    if include_zero:
        if s != 0.0:
            weight = np.where(ksq == 0.0, 0.0, weight)
    else:
        keep = keep & (ksq > 0.0)
    return float(np.sum(power * weight * keep))


def count_modes_in_ball(ksq: np.ndarray, rho_sq: float) -> int:
    """Number of nonzero lattice modes with ``|xi|^2 <= rho_sq``."""
    return int(np.count_nonzero((ksq > 0.0) & (ksq <= rho_sq)))


def apply_longitudinal_factor(
    coeffs: np.ndarray,
    kvec: tuple[np.ndarray, ...],
    inv_ksq: np.ndarray,
    diag_factor: np.ndarray,
    long_factor: np.ndarray,
) -> None:
    """In-place per-mode update used by the viscous/pressure propagator.

    Splits each coefficient vector into the part along ``xi`` and the rest:
    the transverse part is scaled by ``diag_factor``, the longitudinal part by
    ``long_factor``.  ``inv_ksq`` must be 0 at the zero mode, which leaves
    that mode scaled by ``diag_factor`` alone (callers set it to 1 there).
    """
    dot = kvec[0] * coeffs[0]
    for j in range(1, len(kvec)):
        dot = dot + kvec[j] * coeffs[j]
    scale = dot * (inv_ksq * (long_factor - diag_factor))
    for j in range(len(kvec)):
        coeffs[j] *= diag_factor
        coeffs[j] += kvec[j] * scale
