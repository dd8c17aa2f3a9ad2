"""Exact hitting-time sequences of the section-to-section dynamics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._num import LD
from .errors import DegenerateInput, InsufficientData
from .flow import SectionPoint, _relabel_out1_in2, phi1, phi2, psi21
from .params import SystemParams, validate_params

__all__ = ["HittingSequence", "generate_hitting_sequence", "sojourn_fractions"]


@dataclass(frozen=True)
class HittingSequence:
    """Crossing times and section points of one orbit.

    Index convention: ``times[0] = 0`` is the seed crossing of ``Out2``;
    ``times[2i]`` is the ``i``-th ``Out2`` crossing and ``times[2i+1]``
    the following ``Out1`` crossing.  A run of ``n_pairs`` loops records
    ``2*n_pairs + 1`` times beyond the seed, so ``times`` has length
    ``2*n_pairs + 2`` and ends on an ``Out1`` crossing.

    ``sojourns_V1`` holds the ``n_pairs + 1`` passage times through the
    first cylinder, ``sojourns_V2`` the ``n_pairs`` passages through the
    second; ``times`` is exactly the cumulative sum of the interleaved
    sojourns (the gluing and the reinjection take no time).
    """

    times: np.ndarray
    points: tuple[SectionPoint, ...]
    sojourns_V1: np.ndarray
    sojourns_V2: np.ndarray
    n_pairs: int


def generate_hitting_sequence(
    q0: SectionPoint, p: SystemParams, n_pairs: int
) -> HittingSequence:
    """Run ``n_pairs`` full loops from an ``Out2`` seed, recording crossings.

    The seed is taken at time zero.  Each loop contributes one ``V1``
    sojourn (ending on ``Out1``) and one ``V2`` sojourn (ending on
    ``Out2``); a final ``V1`` sojourn is appended so the sequence closes
    on an odd-indexed crossing, which several diagnostics need.
    """
    if q0.chart != "Out2":
        raise DegenerateInput(
            f"seed must lie on Out2 (exit of the second cylinder), got {q0.chart}"
        )
    if n_pairs < 1:
        raise InsufficientData(f"n_pairs must be at least 1, got {n_pairs}")
    validate_params(p)

    times: list[np.longdouble] = [LD(0.0)]
    points: list[SectionPoint] = [q0]
    s_legs: list[np.longdouble] = []
    u_legs: list[np.longdouble] = []

    current = q0
    for _ in range(n_pairs):
        out1, s = phi1(psi21(current, p), p)
        times.append(times[-1] + s)
        points.append(out1)
        s_legs.append(s)
        out2, u = phi2(_relabel_out1_in2(out1), p)
        times.append(times[-1] + u)
        points.append(out2)
        u_legs.append(u)
        current = out2
    # closing V1 sojourn
    out1, s = phi1(psi21(current, p), p)
    times.append(times[-1] + s)
    points.append(out1)
    s_legs.append(s)

    t = np.array(times, dtype=LD)
    if not np.all(np.diff(t) > 0):
        raise DegenerateInput("hitting times failed to increase strictly")
    return HittingSequence(
        times=t,
        points=tuple(points),
        sojourns_V1=np.array(s_legs, dtype=LD),
        sojourns_V2=np.array(u_legs, dtype=LD),
        n_pairs=n_pairs,
    )


def sojourn_fractions(h: HittingSequence, upto_index: int) -> tuple[np.longdouble, np.longdouble]:
    """Fractions of ``[0, times[upto_index]]`` spent in each cylinder.

    The two fractions partition the window exactly: the second is
    computed as one minus the first, and the elapsed time is itself a sum
    of sojourns.  ``upto_index`` must point at a crossing after the seed.
    """
    if not 1 <= upto_index < len(h.times):
        raise InsufficientData(
            f"upto_index must lie in [1, {len(h.times) - 1}], got {upto_index}"
        )
    in_v1 = LD(0.0)
    for j in range(upto_index):
        leg = h.times[j + 1] - h.times[j]
        if j % 2 == 0:  # legs alternate V1, V2, V1, ...
            in_v1 += leg
    frac1 = in_v1 / h.times[upto_index]
    return frac1, LD(1.0) - frac1
