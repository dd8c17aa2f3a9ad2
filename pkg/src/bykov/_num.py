"""Numeric conventions used by the core modules.

Everything that feeds a hitting time or a log-coordinate runs in numpy's
extended-precision ``longdouble``.  The sequences of interest span seven
orders of magnitude within a dozen returns, and the diagnostics difference
nearly-equal quantities of size ~1e7 down at the 1e-10 level, which is
below double-precision differencing noise.  On x86-64 ``longdouble`` is the
80-bit format (eps ~ 1.1e-19), which leaves comfortable headroom.
"""

from __future__ import annotations

import numpy as np

__all__ = ["LD", "PI", "TWO_PI", "asld"]

LD = np.longdouble

PI = np.arccos(LD(-1.0))
TWO_PI = LD(2.0) * PI


def asld(x) -> np.longdouble:
    """Coerce a scalar to extended precision without a float64 round-trip."""
    if isinstance(x, np.longdouble):
        return x
    return LD(x)
