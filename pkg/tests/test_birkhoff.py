"""Time averages along the cycle: exact parity split and smooth observables."""

from __future__ import annotations

import numpy as np
import pytest

from bykov import (
    ConstraintViolation,
    FlowState,
    InsufficientData,
    Observable,
    SectionPoint,
    SystemParams,
    birkhoff_average,
    derive_constants,
    generate_hitting_sequence,
    historic_certificate,
    observable_value,
    predicted_limits,
)

LD = np.longdouble
P = SystemParams(C1=2, E1=1, omega1=1, C2=3, E2=1.5, omega2=2, a=0.5)
SEED = SectionPoint(chart="Out2", theta_lifted=1.0, log_coord=float(np.log(0.1)))
INDICATOR = Observable(kind="piecewise_constant", g_sigma1=0.0, g_sigma2=1.0)

# arbitrary-precision references for the running average sampled at the
# odd crossings t_3, t_5, t_7, t_9 of the indicator observable
ODD_REFERENCE = [
    0.2031061568951354514125,
    0.2375461082312733420447,
    0.2465025613192128585333,
    0.2490147348138981466461,
]


def test_observable_validation():
    with pytest.raises(ConstraintViolation, match="kind"):
        Observable(kind="spiky", g_sigma1=0.0, g_sigma2=1.0)
    with pytest.raises(ConstraintViolation, match="m"):
        Observable(kind="smooth", g_sigma1=0.0, g_sigma2=1.0)
    with pytest.raises(ConstraintViolation, match="g_boundary"):
        Observable(kind="smooth", g_sigma1=0.0, g_sigma2=1.0, m=2.0, g_boundary=3.0)
    assert Observable(kind="smooth", g_sigma1=0.0, g_sigma2=1.0, m=2.0).boundary_value == 0.5


def test_observable_value_piecewise():
    in_v1 = FlowState(cylinder="V1", rho_log=-1.0, theta_lifted=0.0, z_log=-2.0)
    in_v2 = FlowState(cylinder="V2", rho_log=-2.0, theta_lifted=0.0, z_log=-1.0)
    assert observable_value(INDICATOR, in_v1) == 0.0
    assert observable_value(INDICATOR, in_v2) == 1.0


def test_observable_value_smooth_interpolates():
    G = Observable(kind="smooth", g_sigma1=2.0, g_sigma2=6.0, m=3.0, g_boundary=5.0)
    st = FlowState(cylinder="V1", rho_log=np.log(0.5), theta_lifted=0.0, z_log=np.log(0.25))
    # max(rho, z) = 0.5, weight 0.5**3
    np.testing.assert_allclose(observable_value(G, st), 2.0 + 3.0 * 0.125, rtol=1e-15)


def test_predicted_limits_canonical():
    d = derive_constants(P)
    even, odd = predicted_limits(d, INDICATOR)
    np.testing.assert_allclose(float(even), 4 / 7, rtol=1e-15)
    np.testing.assert_allclose(float(odd), 1 / 4, rtol=1e-15)


def test_gap_formula_random_sweep():
    """Predicted odd-even gap vs its displayed closed form, 100 draws."""
    rng = np.random.default_rng(42)
    for _ in range(100):
        E1, E2 = rng.uniform(0.5, 2.0, size=2)
        p = SystemParams(
            C1=E1 * rng.uniform(1.2, 3.0), E1=E1, omega1=rng.uniform(0.3, 3.0),
            C2=E2 * rng.uniform(1.2, 3.0), E2=E2, omega2=rng.uniform(0.3, 3.0),
            a=rng.uniform(0.1, 0.9),
        )
        g1, g2 = rng.uniform(-5, 5, size=2)
        G = Observable(kind="piecewise_constant", g_sigma1=g1, g_sigma2=g2)
        d = derive_constants(p)
        even, odd = predicted_limits(d, G)
        gam1, gam2 = float(d.gamma1), float(d.gamma2)
        closed = (1 - gam1 * gam2) * (g2 - g1) / ((1 + gam1) * (1 + gam2))
        np.testing.assert_allclose(float(odd - even), closed, rtol=1e-12, atol=1e-12)


def test_even_averages_exact():
    s = birkhoff_average(SEED, P, INDICATOR, upto_index=16)
    np.testing.assert_allclose(np.asarray(s.even_averages, float), 4 / 7, atol=1e-10)


def test_odd_averages_reference_values():
    s = birkhoff_average(SEED, P, INDICATOR, upto_index=16)
    np.testing.assert_allclose(
        np.asarray(s.odd_averages[1:5], float), ODD_REFERENCE, rtol=1e-12
    )
    errors = np.abs(np.asarray(s.odd_averages, float) - 0.25)
    # within 1e-3 of the odd limit from the fifth odd sample onward
    assert errors[4] < 1e-3
    assert (errors[4:] < 1e-3).all()
    assert errors[3] > 1e-3  # and genuinely not any earlier


def test_two_limit_certificate():
    s = birkhoff_average(SEED, P, INDICATOR, upto_index=16)
    cert = historic_certificate(s)
    assert cert.verdict is True
    np.testing.assert_allclose(cert.gap, -9 / 28, rtol=1e-12)


def test_certificate_fails_for_constant_observable():
    G = Observable(kind="piecewise_constant", g_sigma1=0.7, g_sigma2=0.7)
    s = birkhoff_average(SEED, P, G, upto_index=16)
    cert = historic_certificate(s)
    assert cert.verdict is False
    np.testing.assert_allclose(cert.gap, 0.0, atol=1e-15)


def test_certificate_needs_samples():
    s = birkhoff_average(SEED, P, INDICATOR, upto_index=4)
    with pytest.raises(InsufficientData):
        historic_certificate(s)


def _leg_integral_closed_form(g_s, g_b, m, contr, expand, depth, length):
    """Exact integral of g_s + (g_b - g_s) * max-coordinate**m over a leg."""
    t_kink = depth / (contr + expand)
    x = np.exp(-m * contr * t_kink)
    return g_s * length + (g_b - g_s) * (1 - x) * (1 / (m * contr) + 1 / (m * expand))


def test_smooth_averages_match_exponential_integrals():
    """Quadrature route vs closed-form exponential integrals per leg."""
    G = Observable(kind="smooth", g_sigma1=1.0, g_sigma2=4.0, m=2.0, g_boundary=2.5)
    s = birkhoff_average(SEED, P, G, upto_index=4)
    h = generate_hitting_sequence(SEED, P, 2)

    # leg 0 crosses V1 from height a*z0, leg 1 crosses V2 from radius rho1
    depth1 = -float(np.log(P.a * 0.1))
    L1 = float(h.sojourns_V1[0])
    int1 = _leg_integral_closed_form(1.0, 2.5, 2.0, P.C1, P.E1, depth1, L1)
    depth2 = -2.0 * float(np.log(P.a * 0.1))  # |log rho1| = delta1 * depth1
    L2 = float(h.sojourns_V2[0])
    int2 = _leg_integral_closed_form(4.0, 2.5, 2.0, P.C2, P.E2, depth2, L2)

    np.testing.assert_allclose(float(s.odd_averages[0]), int1 / L1, rtol=1e-13)
    np.testing.assert_allclose(
        float(s.even_averages[0]), (int1 + int2) / (L1 + L2), rtol=1e-13
    )


def test_smooth_certificate_still_historic():
    G = Observable(kind="smooth", g_sigma1=0.0, g_sigma2=1.0, m=2.0)
    s = birkhoff_average(SEED, P, G, upto_index=16)
    cert = historic_certificate(s)
    assert cert.verdict is True
    # the boundary layer is transient: limits equal the piecewise ones
    np.testing.assert_allclose(cert.gap, -9 / 28, rtol=1e-12)


def test_averages_stay_in_value_hull():
    rng = np.random.default_rng(5)
    for _ in range(10):
        g1, g2 = sorted(rng.uniform(-3, 3, size=2))
        if g2 - g1 < 1e-3:
            continue
        gb = rng.uniform(g1, g2)
        G = Observable(kind="smooth", g_sigma1=g1, g_sigma2=g2, m=rng.uniform(0.5, 4), g_boundary=gb)
        s = birkhoff_average(SEED, P, G, upto_index=10)
        allv = np.concatenate([s.even_averages, s.odd_averages]).astype(float)
        assert allv.min() >= g1 - 1e-12
        assert allv.max() <= g2 + 1e-12
