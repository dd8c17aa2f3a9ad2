"""Birkhoff time-averages along orbits, and their two-limit certificate.

The time average ``(1/t) * integral_0^t G(orbit(s)) ds`` of a continuous
observable ``G`` does not converge on these orbits: sampled at the
odd-indexed hitting times it tends to one weighted mean of the two
equilibrium values, sampled at the even-indexed ones to another.  The
weights are set by the asymptotic fraction of time spent in each
cylinder, which alternates because consecutive sojourns stretch by the
saddle indices ``gamma1`` and ``gamma2`` in turn:

    even limit = (G1 + gamma1*G2) / (1 + gamma1)
    odd  limit = (gamma2*G1 + G2) / (1 + gamma2)

Two observable kinds are supported.  The piecewise-constant kind takes
the value ``g_sigma1`` everywhere in the first cylinder and ``g_sigma2``
in the second; orbit integrals are then exact sojourn sums, carried in
extended precision (stronger than the compensated double accumulation
the tolerances were budgeted for).  The smooth kind interpolates from
the equilibrium value to a common boundary value with profile
``max(rho, |z|)**m``, and is integrated numerically leg by leg.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._num import LD, asld
from .errors import ConstraintViolation, InsufficientData
from .flow import FlowState, SectionPoint, _relabel_out1_in2, flow_at, psi21, section_state
from .hitting import HittingSequence, generate_hitting_sequence
from .params import DerivedConstants, SystemParams, derive_constants

__all__ = [
    "Observable",
    "AverageSeries",
    "Certificate",
    "observable_value",
    "predicted_limits",
    "birkhoff_average",
    "historic_certificate",
]


@dataclass(frozen=True)
class Observable:
    """A continuous scalar function of phase-space position.

    ``g_sigma1`` and ``g_sigma2`` are the values at the two equilibria.
    For the smooth kind, ``m > 0`` is the interpolation exponent and
    ``g_boundary`` the shared value on the cylinder boundaries (default:
    midpoint of the equilibrium values).  ``g_boundary`` must lie in the
    closed interval spanned by the equilibrium values so that every time
    average provably stays inside that interval too.
    """

    kind: str
    g_sigma1: float
    g_sigma2: float
    m: float | None = None
    g_boundary: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("piecewise_constant", "smooth"):
            raise ConstraintViolation(
                f"observable kind must be 'piecewise_constant' or 'smooth', got {self.kind!r}"
            )
        if self.kind == "smooth":
            if self.m is None or not (self.m > 0):
                raise ConstraintViolation(
                    f"smooth observables need an exponent m > 0, got {self.m}"
                )
            lo = min(self.g_sigma1, self.g_sigma2)
            hi = max(self.g_sigma1, self.g_sigma2)
            if self.g_boundary is not None and not (lo <= self.g_boundary <= hi):
                raise ConstraintViolation(
                    f"g_boundary must lie within [{lo}, {hi}], got {self.g_boundary}"
                )

    @property
    def boundary_value(self) -> float:
        if self.g_boundary is not None:
            return self.g_boundary
        return 0.5 * (self.g_sigma1 + self.g_sigma2)


@dataclass(frozen=True)
class AverageSeries:
    """Time averages sampled at hitting times, split by index parity.

    ``even_averages[k]`` is the average over ``[0, even_times[k]]`` and
    likewise for the odd arrays; ``*_indices`` hold the hitting indices
    for traceability.  The first even sample is at index 2 (the seed time
    is zero and admits no average).
    """

    even_averages: np.ndarray
    odd_averages: np.ndarray
    even_times: np.ndarray
    odd_times: np.ndarray
    even_indices: np.ndarray
    odd_indices: np.ndarray
    predicted_even: np.longdouble
    predicted_odd: np.longdouble


class Certificate(NamedTuple):
    verdict: bool
    gap: float


def observable_value(G: Observable, state: FlowState) -> float:
    """Evaluate the observable at an interior point of either cylinder."""
    g_sigma = G.g_sigma1 if state.cylinder == "V1" else G.g_sigma2
    if G.kind == "piecewise_constant":
        return float(g_sigma)
    profile = np.exp(float(G.m) * float(max(state.rho_log, state.z_log)))
    return float(g_sigma) + (G.boundary_value - float(g_sigma)) * profile


def predicted_limits(
    d: DerivedConstants, G: Observable
) -> tuple[np.longdouble, np.longdouble]:
    """The two subsequence limits of the time averages."""
    g1, g2 = asld(G.g_sigma1), asld(G.g_sigma2)
    even = (g1 + d.gamma1 * g2) / (LD(1.0) + d.gamma1)
    odd = (d.gamma2 * g1 + g2) / (LD(1.0) + d.gamma2)
    return even, odd


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)

# Exponent window kept by the boundary-layer clipping: contributions
# beyond exp(-_CLIP) of the peak are dropped (bounded far below the 1e-8
# relative target), and segments are capped at _SEG_SPAN e-foldings so
# the 32-node rule stays in its spectral-accuracy regime.
_CLIP = 60.0
_SEG_SPAN = 10.0


def _quad_composite(f, lo: float, hi: float, n_seg: int) -> float:
    total = 0.0
    edges = np.linspace(lo, hi, n_seg + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        total += half * sum(
            w * f(mid + half * x) for x, w in zip(_GL_NODES, _GL_WEIGHTS)
        )
    return total


def _smooth_leg_integral(
    G: Observable, entry: FlowState, leg_len: float, p: SystemParams
) -> float:
    """Integrate the smooth observable along one sojourn leg.

    The interpolation profile decays like ``exp(-m*contraction*t)`` away
    from the entry wall and climbs back as ``exp(-m*expansion*(T-t))``
    toward the exit wall, with a kink where the two log-coordinates
    cross.  Each monotone piece is clipped to its contributing window and
    integrated by composite Gauss-Legendre on the *actual* composed
    function ``G(flow_at(t))`` — no closed forms are consumed here, so
    tests can check this route against them independently.
    """
    m = float(G.m)
    if entry.cylinder == "V1":
        contr, expand = float(p.C1), float(p.E1)
        depth = float(-entry.z_log)
    else:
        contr, expand = float(p.C2), float(p.E2)
        depth = float(-entry.rho_log)
    t_kink = depth / (contr + expand)

    def f(t: float) -> float:
        return observable_value(G, flow_at(t, entry, p))

    g_sigma = G.g_sigma1 if entry.cylinder == "V1" else G.g_sigma2
    total = g_sigma * leg_len

    # decaying piece: [0, t_kink], profile exp(-m*contr*t)
    width = min(t_kink, _CLIP / (m * contr))
    n_seg = max(1, int(np.ceil(m * contr * width / _SEG_SPAN)))
    total += _quad_composite(lambda t: f(t) - g_sigma, 0.0, width, n_seg)

    # rising piece: [t_kink, leg_len], profile exp(-m*expand*(leg_len-t))
    width = min(leg_len - t_kink, _CLIP / (m * expand))
    n_seg = max(1, int(np.ceil(m * expand * width / _SEG_SPAN)))
    total += _quad_composite(
        lambda t: f(t) - g_sigma, leg_len - width, leg_len, n_seg
    )
    return total


def birkhoff_average(
    q0: SectionPoint, p: SystemParams, G: Observable, upto_index: int
) -> AverageSeries:
    """Time averages of ``G`` at every hitting time through ``upto_index``.

    The orbit starts at the ``Out2`` seed ``q0`` at time zero.  For the
    piecewise-constant kind the running integral is an exact interleaved
    sojourn sum; for the smooth kind each leg is integrated to a relative
    accuracy far beyond 1e-8 and accumulated the same way.
    """
    if upto_index < 1:
        raise InsufficientData(f"upto_index must be at least 1, got {upto_index}")
    n_pairs = max(1, upto_index // 2)
    h = generate_hitting_sequence(q0, p, n_pairs)
    d = derive_constants(p)

    # interleave the stored sojourns so each leg is exact, not a
    # re-differenced cumulative time
    legs = np.empty(upto_index, dtype=LD)
    for j in range(upto_index):
        legs[j] = h.sojourns_V1[j // 2] if j % 2 == 0 else h.sojourns_V2[j // 2]
    increments = np.empty(len(legs), dtype=LD)
    for j, leg in enumerate(legs):
        if G.kind == "piecewise_constant":
            g = G.g_sigma1 if j % 2 == 0 else G.g_sigma2
            increments[j] = asld(g) * leg
        else:
            if j % 2 == 0:
                entry = section_state(psi21(h.points[j], p))
            else:
                entry = section_state(_relabel_out1_in2(h.points[j]))
            increments[j] = asld(_smooth_leg_integral(G, entry, float(leg), p))
    running = np.cumsum(increments)

    even_avg, even_t, even_idx = [], [], []
    odd_avg, odd_t, odd_idx = [], [], []
    for k in range(1, upto_index + 1):
        avg = running[k - 1] / h.times[k]
        if k % 2 == 0:
            even_avg.append(avg)
            even_t.append(h.times[k])
            even_idx.append(k)
        else:
            odd_avg.append(avg)
            odd_t.append(h.times[k])
            odd_idx.append(k)

    pe, po = predicted_limits(d, G)
    return AverageSeries(
        even_averages=np.array(even_avg, dtype=LD),
        odd_averages=np.array(odd_avg, dtype=LD),
        even_times=np.array(even_t, dtype=LD),
        odd_times=np.array(odd_t, dtype=LD),
        even_indices=np.array(even_idx, dtype=int),
        odd_indices=np.array(odd_idx, dtype=int),
        predicted_even=pe,
        predicted_odd=po,
    )


def historic_certificate(s: AverageSeries, tol: float = 1e-3) -> Certificate:
    """Decide whether the sampled averages certify two distinct limits.

    True iff the two parity tails are each within ``tol`` of their
    predicted limit while sitting further than ``tol`` apart.  ``gap``
    is the predicted separation,
    ``(1 - gamma1*gamma2)(G2 - G1) / ((1+gamma1)(1+gamma2))``,
    which equals ``predicted_odd - predicted_even``; it is nonzero for
    every admissible parameter set and non-constant observable because
    the saddle-index product strictly exceeds 1.
    """
    if len(s.even_averages) < 4 or len(s.odd_averages) < 4:
        raise InsufficientData(
            "certification needs at least 4 sampled averages per parity, got "
            f"{len(s.even_averages)} even / {len(s.odd_averages)} odd"
        )
    gap = s.predicted_odd - s.predicted_even
    even_tail = s.even_averages[-1]
    odd_tail = s.odd_averages[-1]
    verdict = (
        abs(even_tail - odd_tail) > tol
        and abs(even_tail - s.predicted_even) <= tol
        and abs(odd_tail - s.predicted_odd) <= tol
    )
    return Certificate(verdict=bool(verdict), gap=float(gap))
