"""Self-check suite run by ``scaledim check``: small instances, exact or tight criteria."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import oracle
from .dimension import scale_local, telescoping_residual
from .entropy import POWER, entropy_scan
from .grid import Box2, CoarseHistogram, build_microgrid, rebin, scale_points
from .maps import cantor_dust, henon_orbit, uniform_lattice
from .transport import kullback_check, monotonicity_report, q_derivative_hist


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _instances(n_henon: int):
    henon = henon_orbit(n_keep=n_henon)
    return [
        ("henon", henon, henon.box, 20_000, [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 20_000]),
        ("lattice", uniform_lattice(64), uniform_lattice(64).box, 256, [1, 2, 4, 8, 16, 32, 64, 128, 256]),
        ("cantor", cantor_dust(6), Box2(0.0, 1.0, 0.0, 1.0), 3 ** 7, [3 ** j for j in range(8)]),
    ]


def check_oracle(instances) -> CheckResult:
    bad = []
    for name, orbit, box, m, ks in instances:
        grid = build_microgrid(orbit, box, m)
        for k in ks:
            fast = rebin(grid, k).sorted_occupancies()
            ref = oracle.direct_box_count(orbit, box, k * grid.e0).sorted_occupancies()
            if fast.shape != ref.shape or (fast != ref).any():
                bad.append(f"{name}@k={k}")
    return CheckResult("oracle equality", not bad, "all aligned scales match" if not bad else "mismatch " + ", ".join(bad))


def _scans(instances):
    for name, orbit, box, m, ks in instances:
        grid = build_microgrid(orbit, box, m)
        yield name, entropy_scan(grid, scale_points(grid, ks), (0, 1, 2, 3), estimator=POWER)


def check_telescoping(scans) -> CheckResult:
    worst = 0.0
    for _, scan in scans:
        for q in scan.q_list:
            S = scan.row(q)
            worst = max(worst, telescoping_residual(scan, q) / max(abs(S[0]), 1e-300))
    return CheckResult("telescoping identity", worst <= 1e-10, f"max relative residual {worst:.2e}")


def check_entropy_order(scans) -> CheckResult:
    bad = [name for name, scan in scans if not monotonicity_report(scan).entropy_ok]
    return CheckResult("entropy q-ordering", not bad, "S_q non-increasing in q" if not bad else "violated on " + ", ".join(bad))


def check_kullback(n_hist: int = 20, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, neg = 0.0, False
    for _ in range(n_hist):
        occ = rng.integers(1, 50, size=int(rng.integers(2, 30)))
        hist = CoarseHistogram(e=1.0, occupancies=occ, N=int(occ.sum()))
        for q in (0.5, 2.0, 3.0):
            kc = kullback_check(hist, q)
            neg |= kc["kullback"] < -1e-12
            worst = max(worst, abs(kc["dSdq_formula"] - q_derivative_hist(hist, q, 1e-3)))
    return CheckResult("kullback vs finite difference", worst <= 1e-4 and not neg,
                       f"max |formula - fd| {worst:.2e}, kullback >= 0: {not neg}")


def check_lattice_plateau() -> CheckResult:
    orbit = uniform_lattice(64)
    grid = build_microgrid(orbit, orbit.box, 256)
    scan = entropy_scan(grid, scale_points(grid, [4, 8, 16, 32, 64]), (0, 1, 2), estimator=POWER)
    worst = max(float(np.max(np.abs(scale_local(scan, q).d - 2.0))) for q in (0, 1, 2))
    return CheckResult("lattice plateau d_q = 2", worst <= 1e-9, f"max |d - 2| {worst:.1e}")


def run_checks(n_henon: int = 10_000) -> list[CheckResult]:
    results = []

    def timed(fn, *args):
        t0 = time.perf_counter()
        res = fn(*args)
        res.seconds = time.perf_counter() - t0
        results.append(res)

    instances = _instances(n_henon)
    timed(check_oracle, instances)
    scans = list(_scans(instances))
    timed(check_telescoping, scans)
    timed(check_entropy_order, scans)
    timed(check_kullback)
    timed(check_lattice_plateau)
    return results


def all_ok(results) -> bool:
    return all(r.ok for r in results)
