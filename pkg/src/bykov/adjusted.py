"""Idealized ("adjusted") hitting times extracted from a measured orbit.

The loop durations ``T[i] = t[2i+2] - t[2i]`` of a perturbed orbit obey
the idealized recursion ``T[i] = delta*T[i-1] - tau*ln(a)`` only up to a
summable residual.  Chaining each measured ``T[i]`` backward through the
exact recursion,

    chain step:  previous = (value + tau*ln(a)) / delta,

produces a family of candidate zeroth durations whose successive
differences shrink geometrically; its limit ``T0`` seeds an exactly
recursive duration sequence ``T_seq`` and from it two adjusted time
grids:

* zero-anchored (``t_even_zero[0] = 0``): the normalized representative
  that coordinate recovery consumes;
* offset-anchored: shifted by ``offset = sum(T[k] - T_seq[k])`` so the
  *measured* even times converge to the adjusted ones.

Both are exposed because no single anchoring satisfies "starts at zero"
and "is the asymptotic shadow of the measured times" at once; the two
grids differ by the reported constant ``offset`` (zero for idealized
input, up to rounding).

Odd adjusted times interpolate each even gap in the ratio set by the
first saddle index: ``t_odd[i] = (t_even[i+1] + gamma1*t_even[i]) /
(1 + gamma1)``, making every adjusted-leg identity exact by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._num import LD
from .errors import InsufficientData
from .hitting import HittingSequence
from .params import DerivedConstants

__all__ = [
    "AdjustedTimes",
    "backward_chain",
    "backward_T0_family",
    "adjusted_sequence",
    "shift_invariance_check",
]


@dataclass(frozen=True)
class AdjustedTimes:
    """Adjusted durations and hitting-time grids (all ``np.longdouble``).

    ``T0_family`` is the backward family the limit was extracted from;
    ``residual_tail_bound`` bounds how far the true limit can sit beyond
    its last element.  ``t_even``/``t_odd`` are offset-anchored,
    ``t_even_zero``/``t_odd_zero`` are the zero-anchored representative.
    """

    T0_family: np.ndarray
    T0: np.longdouble
    T_seq: np.ndarray
    t_even: np.ndarray
    t_odd: np.ndarray
    t_even_zero: np.ndarray
    t_odd_zero: np.ndarray
    offset: np.longdouble
    residual_tail_bound: float


def _loop_durations(h: HittingSequence) -> np.ndarray:
    return h.sojourns_V1[: h.n_pairs] + h.sojourns_V2


def backward_chain(value, steps: int, d: DerivedConstants) -> np.ndarray:
    """Chain a duration backward ``steps`` times through the recursion.

    Returns the whole chain, index ``j`` holding the duration ``j`` steps
    before ``value`` (so ``chain[0] == value``).
    """
    out = np.empty(steps + 1, dtype=LD)
    out[0] = value
    for j in range(steps):
        out[j + 1] = (out[j] + d.invariants.tau_log_a) / d.delta
    return out


def backward_T0_family(h: HittingSequence, d: DerivedConstants) -> np.ndarray:
    """Candidate zeroth durations, one per measured loop.

    Element ``i`` carries ``T[i]`` all the way back to index 0; in the
    idealized model the family is constant, and in general successive
    differences equal the recursion residuals scaled by ``delta**-(i+1)``.
    """
    if h.n_pairs < 2:
        raise InsufficientData(
            f"the backward family needs at least 2 loops, got {h.n_pairs}"
        )
    T = _loop_durations(h)
    return np.array(
        [backward_chain(T[i], i, d)[-1] for i in range(len(T))], dtype=LD
    )


def _extract_limit(family: np.ndarray) -> tuple[np.longdouble, float]:
    """Tail element of the family plus a geometric bound on what remains."""
    diffs = np.abs(np.diff(family))
    floor = LD(16.0) * np.finfo(LD).eps * np.max(np.abs(family))
    significant = np.nonzero(diffs > floor)[0]
    if len(significant) == 0:
        bound = float(diffs.max()) if len(diffs) else 0.0
        return family[-1], bound
    k = significant[-1]
    d_last = diffs[k]
    if k >= 1 and diffs[k - 1] > floor and diffs[k - 1] > d_last:
        ratio = min(float(d_last / diffs[k - 1]), 0.9)
    else:
        ratio = 0.5
    bound = float(d_last) * ratio / (1.0 - ratio)
    return family[-1], bound


def adjusted_sequence(
    h: HittingSequence, d: DerivedConstants, n: int | None = None
) -> AdjustedTimes:
    """Build the adjusted duration and time grids from a measured orbit.

    ``n`` is the number of adjusted loops wanted (default: every measured
    loop); the exact recursion extrapolates cleanly, so ``n`` may exceed
    the measured horizon.
    """
    if n is None:
        n = h.n_pairs
    if n < 1:
        raise InsufficientData(f"need at least one adjusted loop, got n={n}")
    family = backward_T0_family(h, d)
    T0, tail_bound = _extract_limit(family)
    T = _loop_durations(h)

    horizon = max(n, len(T))
    T_seq_full = np.empty(horizon, dtype=LD)
    T_seq_full[0] = T0
    for i in range(1, horizon):
        T_seq_full[i] = d.delta * T_seq_full[i - 1] - d.invariants.tau_log_a
    offset = np.sum(T - T_seq_full[: len(T)], dtype=LD)

    t_even_zero = np.empty(n + 1, dtype=LD)
    t_even_zero[0] = LD(0.0)
    np.cumsum(T_seq_full[:n], out=t_even_zero[1:])
    t_odd_zero = (t_even_zero[1:] + d.gamma1 * t_even_zero[:-1]) / (LD(1.0) + d.gamma1)

    return AdjustedTimes(
        T0_family=family,
        T0=T0,
        T_seq=T_seq_full[:n],
        t_even=t_even_zero + offset,
        t_odd=t_odd_zero + offset,
        t_even_zero=t_even_zero,
        t_odd_zero=t_odd_zero,
        offset=offset,
        residual_tail_bound=tail_bound,
    )


def shift_invariance_check(h: HittingSequence, d: DerivedConstants, N: int) -> float:
    """Rebuild the backward family anchored at loop ``N`` and compare.

    Starting the extraction at ``T[N]`` instead of ``T[0]`` must land on
    the forward iterate of the same limit:
    ``T_seq[N] = delta**N * T0 - (sum of delta**j for j < N)*tau*ln(a)``.
    Returns the largest absolute deviation of the re-anchored family from
    that value; for idealized input it is rounding-level, and in general
    it is controlled by the residual tail beyond loop ``N``.
    """
    if N < 0 or N >= h.n_pairs - 2:
        raise InsufficientData(
            f"shift check needs 0 <= N < n_pairs - 2 = {h.n_pairs - 2}, got {N}"
        )
    T = _loop_durations(h)
    family_N = np.array(
        [backward_chain(T[i], i - N, d)[-1] for i in range(N, len(T))], dtype=LD
    )
    adj = adjusted_sequence(h, d)
    target = adj.T0
    for _ in range(N):
        target = d.delta * target - d.invariants.tau_log_a
    return float(np.max(np.abs(family_N - target)))
