"""Kernel backend selection.

The compiled Cython core is preferred when present; otherwise the numpy
reference implementation is used.  Set ``DECAYLAB_KERNELS=python`` (or
``compiled``) to force a backend; forcing ``compiled`` raises if the
extension was not built.
"""

from __future__ import annotations

import os

from . import reference

_requested = os.environ.get("DECAYLAB_KERNELS", "").strip().lower()

if _requested in ("", "auto", "compiled", "c"):
    try:
        from . import _fastcore as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested in ("compiled", "c"):
            raise ImportError(
                "DECAYLAB_KERNELS requested the compiled backend but the "
                "decaylab.kernels._fastcore extension is not built; "
                "reinstall with `pip install -e . --no-build-isolation`"
            )
        _impl = reference
elif _requested in ("python", "py", "reference"):
    _impl = reference
else:
    raise ValueError(
        f"unrecognised DECAYLAB_KERNELS value {_requested!r}; "
        "use 'compiled' or 'python'"
    )

BACKEND = _impl.BACKEND
weighted_mode_sum = _impl.weighted_mode_sum
count_modes_in_ball = _impl.count_modes_in_ball
apply_longitudinal_factor = _impl.apply_longitudinal_factor

__all__ = [
    "BACKEND",
    "reference",
    "weighted_mode_sum",
    "count_modes_in_ball",
    "apply_longitudinal_factor",
]
