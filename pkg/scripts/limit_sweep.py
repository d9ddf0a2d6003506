#!/usr/bin/env python3
"""Classical-limit sweep: deviation from the beta = 0 run as beta is scaled down.

Runs the same uniform stretch with the speed of light raised by 1/s so the
velocity ratio scales by s while the classical kinematics stay fixed; the
deviation of the plastic response should fall quadratically in s.
"""

import sys

from relkin.constitutive import MaterialParams
from relkin.worldline import BarScenario, nonrelativistic_run, simulate, uniform_stretch

RATE = 0.4
MATERIAL = MaterialParams(rest_density=1.0, stiffness=1.0, yield_stress=0.35, hardening=0.6)
GRID = dict(L0=1.0, X_count=1, t_start=0.0, t_end=1.5, dt=2e-3)


def main() -> int:
    nr = BarScenario(motion=uniform_stretch(RATE, c=1.0), material=MATERIAL,
                     mode="nonrelativistic", c=1.0, **GRID)
    ref = nonrelativistic_run(nr)
    print(f"{'s':>8s} {'beta_peak':>10s} {'|dGamma_p|':>12s} {'|dsigma|':>12s}")
    prev = None
    for s in (1e-1, 1e-2, 1e-3, 1e-4):
        c = 1.0 / s
        sc = BarScenario(motion=uniform_stretch(RATE, c=c), material=MATERIAL,
                         mode="relativistic", c=c, **GRID)
        recs = simulate(sc)
        dg = abs(recs[-1].Gamma_p - ref[-1].Gamma_p)
        ds = abs(recs[-1].sigma_bar - ref[-1].sigma_bar)
        note = "" if prev is None else f"  ratio={prev / dg:8.2f}"
        print(f"{s:8.0e} {RATE * s:10.1e} {dg:12.3e} {ds:12.3e}{note}")
        prev = dg
    return 0


if __name__ == "__main__":
    sys.exit(main())
