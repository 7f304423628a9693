"""Observed convergence orders of the wave engine against the exact N=3 undamped solution.

    python3 scripts/convergence_orders.py [--T 4] [--levels 4]
"""
import argparse

import numpy as np

from difflab.coefficients import DampingProfile
from difflab.grid import grid_with_spacing
from difflab.wave import CauchyData, bump, dalembert_radial3, run_wave

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=float, default=4.0)
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--dr", type=float, default=0.02)
    args = ap.parse_args()
    centre, width = 5.0, 3.0
    u0_fn = lambda s: bump((s - centre) / width)
    prev = None
    for k in range(args.levels):
        dr = args.dr / 2**k
        g = grid_with_spacing(1.0, centre + width + args.T + 1.0, dr, 3)
        run = run_wave(CauchyData(u0_fn(g.r), g.zeros(), centre + width), DampingProfile(a0=0.0), g, args.T,
                       sample_times=[args.T])
        s = run.samples[-1]
        err = float(np.max(np.abs(s.u - dalembert_radial3(u0_fn, g.r, s.t, 1.0))))
        order = "" if prev is None else f"  order {np.log2(prev / err):.3f}"
        print(f"dr {dr:.5f}  max error {err:.3e}{order}")
        prev = err
