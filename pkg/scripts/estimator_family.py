#!/usr/bin/env python3
"""Limit-style estimators on one Hénon scan: D_i, D', running averages, chi2 ratio, fit.

Shows how the chi2 ratio depends on the assumed effective size L_eff and that
at L_eff = exp(intercept/slope) it reproduces the least-squares slope.
"""
import argparse
import math

import numpy as np

from scaledim import build_microgrid, dither_offsets, entropy_scan, henon_orbit, scale_schedule
from scaledim.dimension import estimator_chi2_ratio, estimator_report, fit_dimension, interval_average


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--keep", type=int, default=1_000_000)
    ap.add_argument("--offsets", type=int, default=8)
    ap.add_argument("--lo", type=float, default=-4.0)
    ap.add_argument("--hi", type=float, default=-1.0)
    args = ap.parse_args()

    orbit = henon_orbit(n_keep=args.keep)
    grid = build_microgrid(orbit, orbit.box, 200_000)
    scan = entropy_scan(grid, scale_schedule(grid, 20, args.lo, -0.5), (0,), dither_offsets(args.offsets))
    rep = estimator_report(scan, 0, args.lo, args.hi, anchors=(-0.9,))
    fit = fit_dimension(scan, 0, args.lo, args.hi)
    print(f"interval mean   {interval_average(scan, 0, args.lo, args.hi):.4f}")
    print(f"fit slope       {fit['slope']:.4f}  (intercept {fit['intercept']:.3f})")
    print(f"D_i spread      {np.min(rep.D_i):.3f} .. {np.max(rep.D_i):.3f}")
    for frac, cur in rep.D_prime.items():
        print(f"D' (L'={frac}L)   {np.mean(cur['values']):.4f} mean")
    L_fit = math.exp(fit["intercept"] / fit["slope"])
    for label, L_eff in [("L", scan.L), ("0.5 L", 0.5 * scan.L), ("fitted", L_fit)]:
        print(f"chi2 ratio, L_eff = {label:6s} ({L_eff:.3f}): "
              f"{estimator_chi2_ratio(scan, 0, L_eff, args.lo, args.hi):.4f}")


if __name__ == "__main__":
    main()
