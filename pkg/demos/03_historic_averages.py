"""Birkhoff averages that refuse to converge: historic behavior.

Sampling the running time average of an observable at even-indexed
crossings gives one limit, at odd-indexed crossings another.  Since the
full average oscillates between two different accumulation points
forever, the trajectory has no asymptotic average at all.
"""

from __future__ import annotations

import numpy as np

from bykov import (
    Observable,
    SectionPoint,
    SystemParams,
    birkhoff_average,
    historic_certificate,
)

params = SystemParams(C1=2, E1=1, omega1=1, C2=3, E2=1.5, omega2=2, a=0.5)
seed = SectionPoint(chart="Out2", theta_lifted=1.0, log_coord=float(np.log(0.1)))


def main() -> None:
    indicator = Observable(kind="piecewise_constant", g_sigma1=0.0, g_sigma2=1.0)
    s = birkhoff_average(seed, params, indicator, upto_index=16)

    print("running average of the V2 indicator, split by crossing parity:\n")
    print(f"{'even k':>7} {'average':>12}   |   {'odd k':>6} {'average':>12}")
    for i in range(len(s.odd_averages)):
        even = f"{float(s.even_averages[i]):>12.8f}" if i < len(s.even_averages) else " " * 12
        print(f"{2 * i + 2:>7} {even}   |   {2 * i + 1:>6} {float(s.odd_averages[i]):>12.8f}")

    print(f"\npredicted limits: even -> {float(s.predicted_even):.8f} (= 4/7), "
          f"odd -> {float(s.predicted_odd):.8f} (= 1/4)")

    cert = historic_certificate(s)
    print(f"two distinct limit points certified: {cert.verdict} "
          f"(gap {cert.gap:+.8f}, exact -9/28)")

    smooth = Observable(kind="smooth", g_sigma1=0.0, g_sigma2=1.0, m=2.0)
    cert2 = historic_certificate(birkhoff_average(seed, params, smooth, upto_index=16))
    print(f"same conclusion for a smooth interpolating observable: {cert2.verdict} "
          f"(gap {cert2.gap:+.8f})")


if __name__ == "__main__":
    main()
