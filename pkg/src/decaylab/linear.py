"""Exact linear evolution under a dissipative symbol, and its predicted rates.

Propagation is exact per mode (no time stepping), so sampled norm series
carry no integration error; they are the reference the nonlinear solver is
compared against.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .character import Classification, DecayCharacterEstimate
from .field import SpectralField, sobolev_norm_sq
from .series import NormTimeSeries
from .symbols import DissipativeSymbol, apply_propagator_inplace


def evolve_linear(v0: SpectralField, symbol: DissipativeSymbol, t: float) -> SpectralField:
    """Apply the propagator ``exp(t M)`` mode by mode."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    out = v0.copy()
    apply_propagator_inplace(symbol, out, t)
    return out


def linear_norm_series(
    v0: SpectralField,
    symbol: DissipativeSymbol,
    times: Iterable[float],
    s_values: Iterable[float] = (0.0,),
) -> NormTimeSeries:
    """Sample squared Sobolev norms of the linear evolution at given times."""
    times = np.asarray(sorted(times), dtype=np.float64)
    s_values = sorted(set(float(s) for s in s_values) | {0.0})
    columns = {s: np.empty(len(times)) for s in s_values}
    for j, t in enumerate(times):
        vt = evolve_linear(v0, symbol, float(t))
        for s in s_values:
            columns[s][j] = sobolev_norm_sq(vt, s)
    return NormTimeSeries(
        times=times,
        norms_sq=columns,
        metadata={"evolution": "linear", "symbol": repr(symbol)},
    )


class DecaySpeed(enum.Enum):
    TWO_SIDED = "two_sided"
    SLOWER_THAN_ALGEBRAIC = "slower_than_algebraic"
    FASTER_THAN_ALGEBRAIC = "faster_than_algebraic"


@dataclass(frozen=True)
class LinearDecayPrediction:
    """Predicted algebraic rate of the squared norm, or an endpoint marker."""

    kind: DecaySpeed
    exponent: float | None  # decay exponent of the squared norm, if two-sided

    def describe(self) -> str:
        if self.kind is DecaySpeed.TWO_SIDED:
            return f"norm^2 decays like (1+t)^(-{self.exponent:g}) (two-sided)"
        if self.kind is DecaySpeed.SLOWER_THAN_ALGEBRAIC:
            return "norm^2 decays slower than any algebraic rate"
        return "norm^2 decays faster than any algebraic rate"


def predicted_linear_exponent(
    dim: int,
    alpha: float,
    character: float | DecayCharacterEstimate,
    s: float = 0.0,
) -> LinearDecayPrediction:
    """Two-sided decay exponent of the squared Sobolev norm of order ``s``.

    ``character`` is the order-zero decay character of the datum: a float
    (``math.inf`` for vanishing low-frequency data, exactly ``-dim/2`` for
    the lower endpoint) or an estimate object carrying its classification.
    """
    if isinstance(character, DecayCharacterEstimate):
        if character.classification is Classification.INFINITE:
            r = math.inf
        elif character.classification is Classification.LOWER_ENDPOINT:
            r = -dim / 2.0
        else:
            r = character.base_exponent
    else:
        r = float(character)
    if math.isinf(r):
        return LinearDecayPrediction(DecaySpeed.FASTER_THAN_ALGEBRAIC, None)
    if r <= -dim / 2.0:
        if r < -dim / 2.0:
            raise ValueError(
                f"character must be >= -dim/2 = {-dim / 2.0}, got {r}"
            )
        return LinearDecayPrediction(DecaySpeed.SLOWER_THAN_ALGEBRAIC, None)
    exponent = (dim / 2.0 + r + s) / alpha
    return LinearDecayPrediction(DecaySpeed.TWO_SIDED, exponent)


def dissipation_norm_sq(field: SpectralField, alpha: float) -> float:
    """Squared norm of order ``alpha`` — the instantaneous dissipation shape."""
    return sobolev_norm_sq(field, alpha)


def dissipation_step_defects(
    v0: SpectralField,
    symbol: DissipativeSymbol,
    times: Iterable[float],
    coefficient: float,
) -> np.ndarray:
    """Per-step defects of the discrete dissipation inequality.

    For consecutive samples the discrete derivative of the squared norm must
    satisfy ``(E_next - E_prev)/dt <= -2 c D(v_next)`` where ``D`` is the
    order-``alpha`` squared norm and ``c`` the dissipativity margin of the
    symbol.  Evaluating ``D`` at the later sample makes the inequality exact
    for every diagonalizable dissipative mode, so the returned defects
    ``(E_next - E_prev)/dt + 2 c D(v_next)`` are nonpositive up to roundoff.
    """
    times = np.asarray(sorted(times), dtype=np.float64)
    if len(times) < 2:
        raise ValueError("need at least two sample times")
    defects = np.empty(len(times) - 1)
    prev = evolve_linear(v0, symbol, float(times[0]))
    e_prev = sobolev_norm_sq(prev, 0.0)
    for j in range(1, len(times)):
        nxt = evolve_linear(v0, symbol, float(times[j]))
        e_next = sobolev_norm_sq(nxt, 0.0)
        dt = times[j] - times[j - 1]
        diss = dissipation_norm_sq(nxt, symbol.alpha)
        defects[j - 1] = (e_next - e_prev) / dt + 2.0 * coefficient * diss
        prev, e_prev = nxt, e_next
    return defects


def modewise_lower_bound_defect(
    v0: SpectralField, vt: SpectralField, symbol: DissipativeSymbol, t: float
) -> float:
    """Worst violation of ``|v_hat(xi, t)| >= exp(-c_max |xi|^(2 alpha) t) |v_hat0|``.

    Nonpositive values (up to roundoff) confirm the mode-wise floor with
    ``c_max`` the largest dissipation coefficient of the symbol.
    """
    c_max = symbol.max_dissipation_coefficient
    ksq = v0.grid.ksq
    floor = np.exp(-c_max * t * ksq**symbol.alpha)
    # The propagator may mix components at a mode, so the floor controls the
    # Euclidean norm of the coefficient vector, not each component alone.
    lhs = np.sqrt(np.sum(np.abs(vt.coeffs) ** 2, axis=0))
    rhs = floor * np.sqrt(np.sum(np.abs(v0.coeffs) ** 2, axis=0))
    return float(np.max(rhs - lhs))
