#!/usr/bin/env python3
"""How the rms scatter of d_0(e) depends on dithering, seed and scale window.

For each configuration prints rms(d_0 - mean)/mean over the window, plus the
largest-scale intervals, where the scatter concentrates.
"""
import argparse

import numpy as np

from scaledim import OffsetVector, build_microgrid, dither_offsets, entropy_scan, henon_orbit, scale_schedule
from scaledim.dimension import interval_average, scale_local


def stratified(n_side):
    return [OffsetVector(i / n_side, j / n_side) for i in range(n_side) for j in range(n_side)]


def rel_rms(scan, lo, hi):
    prof = scale_local(scan, 0)
    w = prof.window(lo, hi)
    mean = interval_average(scan, 0, lo, hi)
    return float(np.sqrt(np.mean((prof.d[w] - mean) ** 2)) / mean), prof


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--keep", type=int, default=1_000_000)
    ap.add_argument("--seeds", default="0,0;0.3,-0.2")
    args = ap.parse_args()

    for seed in args.seeds.split(";"):
        sx, sy = (float(v) for v in seed.split(","))
        orbit = henon_orbit(seed=(sx, sy), n_keep=args.keep)
        grid = build_microgrid(orbit, orbit.box, 200_000)
        sched = scale_schedule(grid, 20, -3.0, -1.0)
        for label, offs in [("plain", dither_offsets(1)), ("random16", dither_offsets(16)),
                            ("strat8x8", stratified(8))]:
            scan = entropy_scan(grid, sched, (0,), offs)
            full, prof = rel_rms(scan, -3.0, -1.0)
            inner, _ = rel_rms(scan, -3.0, -1.5)
            tail = prof.d[prof.midpoints > -1.3]
            print(f"seed ({sx:+.1f},{sy:+.1f}) {label:9s} rms [-3,-1] {100 * full:5.1f}%  "
                  f"[-3,-1.5] {100 * inner:5.1f}%  d_0 above -1.3: {np.round(tail, 2)}")


if __name__ == "__main__":
    main()
