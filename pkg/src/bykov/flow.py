"""Local transition maps between cross-sections of the two cylinders.

The phase space is covered by two solid cylinders, ``V1`` around the first
equilibrium and ``V2`` around the second, each carrying coordinates
``(rho, theta, z)`` with ``rho`` the cylindrical radius and ``z`` the
height.  Inside ``V1`` the flow is linear: the radius contracts at rate
``C1``, the angle advances at ``omega1``, the height expands at ``E1``.
Inside ``V2`` the radius expands at ``E2``, the angle advances at
``omega2``, the height contracts at ``C2``.

Four cross-sections bound the sojourns:

* ``In1``  (``rho = 1`` wall of ``V1``): entry, coordinate ``ln z < 0``;
* ``Out1`` (``z = 1`` lid of ``V1``): exit, coordinate ``ln rho < 0``;
* ``In2``  (``z = 1`` lid of ``V2``): entry, coordinate ``ln rho < 0``;
* ``Out2`` (``rho = 1`` wall of ``V2``): exit, coordinate ``ln z < 0``.

``Out1`` and ``In2`` are glued by the identity, so points move through

    In1 --phi1--> Out1 == In2 --phi2--> Out2 --psi21--> In1 --> ...

``psi21`` models the global reinjection: heights shrink by the factor
``a`` and angles are scaled by ``1/a``.  All coordinates are kept in log
space; the heights involved decay like ``exp(-delta^n)`` and would leave
double precision (let alone linear coordinates) within a handful of
loops.

Angles are tracked as *lifted* reals, never reduced mid-computation: the
winding over one sojourn grows with the sojourn length, and the reduced
angle is a quotient that downstream diagnostics cannot un-wrap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._num import LD, TWO_PI, asld
from .errors import DegenerateInput, OutOfSojourn
from .params import SystemParams, derive_constants, validate_params

__all__ = [
    "CHARTS",
    "SectionPoint",
    "FlowState",
    "phi1",
    "phi2",
    "psi21",
    "poincare",
    "flow_at",
    "section_state",
]

CHARTS = ("In1", "Out1", "In2", "Out2")

_ENTRY_CYLINDER = {"In1": "V1", "In2": "V2"}


@dataclass(frozen=True)
class SectionPoint:
    """A point on one of the four cross-sections.

    ``log_coord`` is the logarithm of the non-unit coordinate (height on
    the radius-one sections, radius on the height-one sections) and must
    be strictly negative: zero would sit on the connection itself and the
    transit time diverges logarithmically as it is approached.
    """

    chart: str
    theta_lifted: np.longdouble
    log_coord: np.longdouble

    def __post_init__(self) -> None:
        if self.chart not in CHARTS:
            raise DegenerateInput(
                f"unknown chart {self.chart!r}; expected one of {CHARTS}"
            )
        object.__setattr__(self, "theta_lifted", asld(self.theta_lifted))
        object.__setattr__(self, "log_coord", asld(self.log_coord))
        if not np.isfinite(self.theta_lifted):
            raise DegenerateInput(f"theta_lifted is not finite: {self.theta_lifted}")
        if not np.isfinite(self.log_coord) or not (self.log_coord < 0.0):
            raise DegenerateInput(
                "log_coord must be finite and strictly negative "
                f"(point off the connection), got {self.log_coord}"
            )

    @property
    def theta(self) -> np.longdouble:
        """Angle reduced to ``[0, 2*pi)``."""
        return np.mod(self.theta_lifted, TWO_PI)


@dataclass(frozen=True)
class FlowState:
    """An interior point of one cylinder, mid-sojourn.

    Both log-coordinates are ``<= 0`` (the point lies inside or on the
    boundary of the unit cylinder); the angle is lifted.
    """

    cylinder: str
    rho_log: np.longdouble
    theta_lifted: np.longdouble
    z_log: np.longdouble

    def __post_init__(self) -> None:
        if self.cylinder not in ("V1", "V2"):
            raise DegenerateInput(
                f"unknown cylinder {self.cylinder!r}; expected 'V1' or 'V2'"
            )
        object.__setattr__(self, "rho_log", asld(self.rho_log))
        object.__setattr__(self, "theta_lifted", asld(self.theta_lifted))
        object.__setattr__(self, "z_log", asld(self.z_log))
        for name in ("rho_log", "theta_lifted", "z_log"):
            if not np.isfinite(getattr(self, name)):
                raise DegenerateInput(f"{name} is not finite")
        if self.rho_log > 0.0 or self.z_log > 0.0:
            raise DegenerateInput(
                "state lies outside the unit cylinder: "
                f"rho_log={self.rho_log}, z_log={self.z_log}"
            )

    @property
    def theta(self) -> np.longdouble:
        return np.mod(self.theta_lifted, TWO_PI)


def _require_chart(q: SectionPoint, chart: str, op: str) -> None:
    if q.chart != chart:
        raise DegenerateInput(f"{op} expects a point on {chart}, got {q.chart}")


def _relabel_out1_in2(q: SectionPoint) -> SectionPoint:
    # The z=1 lid of V1 *is* the z=1 lid of V2; only the chart name changes.
    return SectionPoint(chart="In2", theta_lifted=q.theta_lifted, log_coord=q.log_coord)


def _half_transition(
    log_in: np.longdouble,
    theta_in: np.longdouble,
    expand: np.longdouble,
    saddle: np.longdouble,
    twist: np.longdouble,
    c: np.longdouble,
    eps: np.longdouble,
) -> tuple[np.longdouble, np.longdouble, np.longdouble]:
    """Shared kernel of both half-transition maps.

    Returns ``(transit, log_out, theta_out)`` for a sojourn whose entry
    coordinate has log ``log_in``, expansion rate ``expand``, saddle index
    ``saddle`` (ratio of contraction to expansion), and winding speed
    ``twist`` (angle advanced per unit time).
    """
    transit = -log_in / expand
    log_out = saddle * log_in
    theta_out = theta_in + twist * transit
    if c != 0.0:
        radial = c * np.exp(saddle * eps * log_in) * np.cos(theta_in)
        if not (LD(1.0) + radial > 0.0):
            raise DegenerateInput(
                "radius correction reaches the spiral axis; "
                f"1 + {float(radial)} <= 0"
            )
        log_out = log_out + np.log1p(radial)
        theta_out = theta_out + c * np.exp(saddle * (LD(1.0) + eps) * log_in) * np.sin(
            theta_in
        )
    return transit, log_out, theta_out


def phi1(q: SectionPoint, p: SystemParams) -> tuple[SectionPoint, np.longdouble]:
    """Carry an ``In1`` point through ``V1`` to ``Out1``.

    Returns the exit point and the transit time ``-ln(z) / E1``.  In the
    idealized model the exit radius satisfies ``ln rho' = delta1 * ln z``
    and the angle advances by ``omega1`` times the transit; with a
    perturbation attached to ``p`` the exit coordinates pick up
    angle-dependent corrections that vanish with the entry height.
    """
    _require_chart(q, "In1", "phi1")
    d = derive_constants(p)
    pert = p.perturbation
    c = asld(0.0 if pert is None else pert.c1)
    eps = asld(0.5 if pert is None else pert.eps)
    transit, log_out, theta_out = _half_transition(
        q.log_coord,
        q.theta_lifted,
        expand=asld(p.E1),
        saddle=d.delta1,
        twist=asld(p.omega1),
        c=c,
        eps=eps,
    )
    return SectionPoint("Out1", theta_out, log_out), transit


def phi2(q: SectionPoint, p: SystemParams) -> tuple[SectionPoint, np.longdouble]:
    """Carry an ``In2`` point through ``V2`` to ``Out2``.

    Mirror image of :func:`phi1` with the roles of radius and height
    exchanged: transit ``-ln(rho) / E2``, exit height
    ``ln z' = delta2 * ln rho`` plus the analogous corrections.
    """
    _require_chart(q, "In2", "phi2")
    d = derive_constants(p)
    pert = p.perturbation
    c = asld(0.0 if pert is None else pert.c2)
    eps = asld(0.5 if pert is None else pert.eps)
    transit, log_out, theta_out = _half_transition(
        q.log_coord,
        q.theta_lifted,
        expand=asld(p.E2),
        saddle=d.delta2,
        twist=asld(p.omega2),
        c=c,
        eps=eps,
    )
    return SectionPoint("Out2", theta_out, log_out), transit


def psi21(q: SectionPoint, p: SystemParams) -> SectionPoint:
    """Reinject an ``Out2`` point onto ``In1`` along the global connection.

    Heights contract by the factor ``a``; lifted angles are scaled by
    ``1/a``.  (On the reduced circle the scaling is single-valued exactly
    when ``1/a`` is an integer, which holds for every parameter set used
    in the shipped experiments; the lifted convention keeps the map
    well-defined regardless.)  Instantaneous: no time elapses.
    """
    _require_chart(q, "Out2", "psi21")
    a = asld(p.a)
    return SectionPoint(
        chart="In1",
        theta_lifted=q.theta_lifted / a,
        log_coord=np.log(a) + q.log_coord,
    )


def poincare(q: SectionPoint, p: SystemParams) -> tuple[SectionPoint, np.longdouble]:
    """The full return map on ``In1``: phi1, lid gluing, phi2, reinjection.

    Returns the next ``In1`` point and the return time (sum of the two
    transits; the gluing and the reinjection are instantaneous).  In the
    idealized model the heights obey ``ln z' = ln a + delta * ln z``
    exactly.
    """
    _require_chart(q, "In1", "poincare")
    out1, s = phi1(q, p)
    in2 = _relabel_out1_in2(out1)
    out2, u = phi2(in2, p)
    return psi21(out2, p), s + u


def section_state(q: SectionPoint) -> FlowState:
    """View an entry-section point as the state starting its sojourn.

    Only ``In1`` and ``In2`` points begin a sojourn; exit points would
    need the transition data to say where they go next.
    """
    cyl = _ENTRY_CYLINDER.get(q.chart)
    if cyl is None:
        raise DegenerateInput(
            f"section_state expects an entry chart (In1 or In2), got {q.chart}"
        )
    if cyl == "V1":
        return FlowState("V1", rho_log=LD(0.0), theta_lifted=q.theta_lifted, z_log=q.log_coord)
    return FlowState("V2", rho_log=q.log_coord, theta_lifted=q.theta_lifted, z_log=LD(0.0))


def _snap_boundary(log_val: np.longdouble, scale: np.longdouble) -> np.longdouble:
    """Collapse an ulp-sized positive overshoot of a log-coordinate to 0.

    At ``t = t_exit`` the expanding coordinate reaches the unit boundary
    by definition; the rounded multiply-add may land a few ulps above it
    (relative to the magnitudes cancelled, hence the ``scale`` argument),
    which would wrongly fail state validation.  Genuine excursions are
    never this small because ``t`` is range-checked first.
    """
    tol = LD(64.0) * np.finfo(LD).eps * max(LD(1.0), abs(scale))
    if 0.0 < log_val < tol:
        return LD(0.0)
    return log_val


def flow_at(t, s: FlowState, p: SystemParams) -> FlowState:
    """Evaluate the linear flow ``t`` time units into the current sojourn.

    ``t`` may be any value in ``[0, t_exit]`` where ``t_exit`` is the
    remaining time until the state's cylinder is exited (``-z_log / E1``
    in ``V1``, ``-rho_log / E2`` in ``V2``); anything outside raises
    :class:`~bykov.errors.OutOfSojourn` because the linear field simply
    does not govern the orbit beyond its own cylinder.
    """
    t = asld(t)
    validate_params(p)
    if s.cylinder == "V1":
        t_exit = -s.z_log / asld(p.E1)
    else:
        t_exit = -s.rho_log / asld(p.E2)
    if not (0.0 <= t <= t_exit):
        raise OutOfSojourn(
            f"t={float(t)} outside the sojourn window [0, {float(t_exit)}] "
            f"of cylinder {s.cylinder}"
        )
    if s.cylinder == "V1":
        return FlowState(
            cylinder="V1",
            rho_log=s.rho_log - asld(p.C1) * t,
            theta_lifted=s.theta_lifted + asld(p.omega1) * t,
            z_log=_snap_boundary(s.z_log + asld(p.E1) * t, s.z_log),
        )
    return FlowState(
        cylinder="V2",
        rho_log=_snap_boundary(s.rho_log + asld(p.E2) * t, s.rho_log),
        theta_lifted=s.theta_lifted + asld(p.omega2) * t,
        z_log=s.z_log - asld(p.C2) * t,
    )
