"""q-derivative diagnostics and dimension transport between two scans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dimension import entropy_row, running_average, scale_local
from .entropy import POWER, ScaleScan, histogram_entropy, renyi_entropy
from .errors import ScaleDimError, ScheduleMismatch
from .grid import ZERO_OFFSET, CoarseHistogram


def kullback_check(hist: CoarseHistogram, q: float) -> dict:
    """Kullback sum of the escort distribution z_q against p, and the implied dS_q/dq."""
    if q == 1:
        raise ScaleDimError("closed form is singular at q = 1; use q_derivative_fd")
    occ = np.asarray(hist.occupancies, dtype=float)
    p = occ[occ > 0] / hist.N
    w = p ** q
    z = w / math.fsum(w.tolist())
    kl = math.fsum((z * np.log(z / p)).tolist())
    return {"kullback": kl, "dSdq_formula": -kl / (1.0 - q) ** 2}


def _check_fd(q: float, dq: float):
    if not dq > 0:
        raise ScaleDimError(f"dq must be positive, got {dq}")
    if q - dq < 0:
        raise ScaleDimError(f"q - dq = {q - dq} is negative")


def q_derivative_hist(hist: CoarseHistogram, q: float, dq: float = 1e-3) -> float:
    """Central difference of the power-estimator entropy in q for one histogram."""
    _check_fd(q, dq)
    return (histogram_entropy(hist, q + dq, POWER) - histogram_entropy(hist, q - dq, POWER)) / (2 * dq)


def q_derivative_fd(grid, sp, q: float, dq: float = 1e-3, offsets=(ZERO_OFFSET,), estimator: str = POWER) -> float:
    """Central difference [S_{q+dq} - S_{q-dq}] / (2 dq) at one scale point."""
    _check_fd(q, dq)
    if estimator != POWER:
        raise ScaleDimError("q derivatives are taken on the power estimator, which is smooth in q")
    hi = renyi_entropy(grid, sp, q + dq, offsets, POWER)
    lo = renyi_entropy(grid, sp, q - dq, offsets, POWER)
    return (hi - lo) / (2 * dq)


@dataclass(frozen=True, eq=False)
class TransportProfile:
    q: float
    anchor: float                # log10(e/L) where I = 0
    midpoints: np.ndarray
    delta_d: np.ndarray          # d_B - d_A per interval
    resolution: np.ndarray
    log10_ratio: np.ndarray      # schedule points
    I: np.ndarray                # information at each schedule point
    adequate: np.ndarray         # per interval: both scans well populated
    identity_residual: float     # max relative |dS(e) - dS(anchor) + I(e)|

    @property
    def I_mid(self) -> np.ndarray:
        """Information at the smaller-scale end of each interval."""
        return self.I[:-1]

    def interval_mean(self, lo: float, hi: float) -> float:
        """Mean transport over [lo, hi]: -(I(lo) - I(hi)) / ln(e_hi / e_lo)."""
        a = int(np.argmin(np.abs(self.log10_ratio - lo)))
        b = int(np.argmin(np.abs(self.log10_ratio - hi)))
        if a >= b:
            raise ScaleDimError(f"empty interval [{lo}, {hi}]")
        span = (self.log10_ratio[b] - self.log10_ratio[a]) * math.log(10.0)
        return float(-(self.I[a] - self.I[b]) / span)


def _check_schedules(a: ScaleScan, b: ScaleScan):
    if a.k.shape != b.k.shape or (a.k != b.k).any():
        raise ScheduleMismatch("scans have different rebin schedules")
    if not np.allclose(a.e, b.e, rtol=1e-12, atol=0):
        raise ScheduleMismatch("scans have different scale values (box or micro divisor differ)")


def dimension_transport(scanA: ScaleScan, scanB: ScaleScan, q: float = 0, anchor: float | None = None,
                        min_occupancy: float = 5.0) -> TransportProfile:
    """Transport d_B - d_A and information accumulated downward from ``anchor``.

    The anchor defaults to the largest common scale point.
    """
    _check_schedules(scanA, scanB)
    pa, pb = scale_local(scanA, q), scale_local(scanB, q)
    dd = pb.d - pa.d
    lr = scanA.log10_ratio
    ja = lr.size - 1 if anchor is None else scanA.locate(anchor)
    width = np.diff(scanA.ln_e)
    cum = np.concatenate([[0.0], np.cumsum(dd * width)])
    info = cum - cum[ja]

    SA, SB = entropy_row(scanA, q), entropy_row(scanB, q)
    dS = SB - SA
    scale = np.maximum(1.0, np.maximum(np.abs(SA), np.abs(SB)))
    with np.errstate(invalid="ignore"):
        resid = np.abs((dS - dS[ja]) + info) / scale
    finite = np.isfinite(resid)
    residual = float(resid[finite].max()) if finite.any() else 0.0

    occA = scanA.N / scanA.M_mean
    occB = scanB.N / scanB.M_mean
    adequate = (occA[:-1] >= min_occupancy) & (occB[:-1] >= min_occupancy) & np.isfinite(dd)
    return TransportProfile(q=float(q), anchor=float(lr[ja]), midpoints=pa.midpoints, delta_d=dd,
                            resolution=pa.resolution, log10_ratio=lr.copy(), I=info,
                            adequate=adequate, identity_residual=residual)


def log_correlation_residual(scanA: ScaleScan, scanB: ScaleScan, profile: TransportProfile) -> float:
    """Check of d ln C_q(e) - d ln C_q(anchor) = -(1 - q) I(e), relative."""
    q = profile.q
    ja = int(np.argmin(np.abs(profile.log10_ratio - profile.anchor)))
    lnC = (1.0 - q) * (entropy_row(scanB, q) - entropy_row(scanA, q))
    lhs = lnC - lnC[ja]
    rhs = -(1.0 - q) * profile.I
    scale = np.maximum(1.0, np.abs(lnC))
    with np.errstate(invalid="ignore"):
        r = np.abs(lhs - rhs) / scale
    return float(np.nanmax(r)) if r.size else 0.0


@dataclass
class MonotonicityReport:
    q_list: tuple
    entropy_ok: bool
    entropy_violations: list = field(default_factory=list)   # (log10, q_lo, q_hi, excess)
    local_ok: np.ndarray = None                              # per midpoint
    local_sign_changes: int = 0                              # of d_{q0} - d_{q1}
    running_ok: bool | None = None
    running_violations: list = field(default_factory=list)

    @property
    def local_all_ok(self) -> bool:
        return bool(np.all(self.local_ok))


def monotonicity_report(scan: ScaleScan, q_list=None, anchor: float | None = None, lo: float | None = None,
                        hi: float | None = None, entropy_tol: float = 1e-12, average_tol: float = 0.01) -> MonotonicityReport:
    """q-ordering of entropies (must hold), of scale-local dimensions (informational)
    and of running averages from ``anchor`` (checked at every scale in ``[lo, hi]``)."""
    qs = sorted(scan.q_list if q_list is None else q_list)
    if len(qs) < 2:
        raise ScaleDimError("monotonicity needs at least two q values")
    lr = scan.log10_ratio
    sel = np.ones(lr.size, dtype=bool)
    if lo is not None:
        sel &= lr >= lo - 1e-9
    if hi is not None:
        sel &= lr <= hi + 1e-9

    rows = [entropy_row(scan, q) for q in qs]
    viol = []
    for (qa, Sa), (qb, Sb) in zip(zip(qs, rows), zip(qs[1:], rows[1:])):
        excess = Sb - Sa
        for j in np.flatnonzero(sel & (excess > entropy_tol)):
            viol.append((float(lr[j]), qa, qb, float(excess[j])))

    profiles = [scale_local(scan, q) for q in qs]
    win = profiles[0].window(lr[sel][0], lr[sel][-1])
    local_ok = np.ones(win.sum(), dtype=bool)
    for pa, pb in zip(profiles, profiles[1:]):
        local_ok &= (pb.d[win] <= pa.d[win] + entropy_tol)
    diff = profiles[0].d[win] - profiles[1].d[win]
    signs = np.sign(diff[diff != 0])
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))

    rep = MonotonicityReport(tuple(qs), not viol, viol, local_ok, changes)
    if anchor is not None:
        avgs = [running_average(scan, q, anchor) for q in qs]
        keep = np.ones(avgs[0].log10_ratio.size, dtype=bool)
        if lo is not None:
            keep &= avgs[0].log10_ratio >= lo - 1e-9
        rv = []
        for qa, qb, a, b in zip(qs, qs[1:], avgs, avgs[1:]):
            bad = keep & (b.dbar > a.dbar + average_tol)
            rv.extend((float(a.log10_ratio[j]), qa, qb, float(b.dbar[j] - a.dbar[j])) for j in np.flatnonzero(bad))
        rep.running_ok = not rv
        rep.running_violations = rv
    return rep
