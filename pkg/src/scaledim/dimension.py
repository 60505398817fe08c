"""Scale-local dimensions, scale averages and limit-style estimators.

Every quantity here is a finite-difference quotient of entropies stored in a
:class:`~scaledim.entropy.ScaleScan`, so all of them are reproducible from
the scan alone.  Scale axes are reported as ``log10(e / L)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .entropy import ScaleScan
from .errors import (AnchorNotInSchedule, BoundsNotInSchedule, DegenerateAbscissa,
                     DegenerateInterval, NonpositiveDenominator, ScaleDimError)


@dataclass(frozen=True, eq=False)
class DimensionProfile:
    q: float
    midpoints: np.ndarray      # log10(e/L) at interval centres
    d: np.ndarray
    resolution: np.ndarray     # delta log10 e per interval
    lo_index: np.ndarray       # schedule index of each interval's smaller scale

    @property
    def ln_width(self) -> np.ndarray:
        return self.resolution * math.log(10.0)

    @property
    def tau(self) -> np.ndarray:
        """Correlation-integral scaling exponent (q - 1) * d_q."""
        return (self.q - 1.0) * self.d

    def window(self, lo: float, hi: float) -> np.ndarray:
        """Mask of intervals lying wholly inside ``[lo, hi]`` (log10 e/L)."""
        half = 0.5 * self.resolution
        eps = 1e-9
        return (self.midpoints - half >= lo - eps) & (self.midpoints + half <= hi + eps)


@dataclass(frozen=True, eq=False)
class AverageProfile:
    q: float
    anchor: float              # log10(e1/L)
    log10_ratio: np.ndarray
    dbar: np.ndarray


def entropy_row(scan: ScaleScan, q: float) -> np.ndarray:
    """S_q along the schedule; for ``q = 0`` falls back to log of the mean bin count."""
    if q in scan.q_list:
        return scan.row(q)
    if q == 0:
        return scan.ln_M()
    raise ScaleDimError(f"q = {q} not in scan (have {list(scan.q_list)})")


def _index(scan: ScaleScan, log10_ratio: float, exc, tol: float = 0.01) -> int:
    try:
        return scan.locate(log10_ratio, tol)
    except KeyError:
        raise exc(f"log10(e/L) = {log10_ratio} is not a schedule point of this scan "
                  f"(schedule spans [{scan.log10_ratio[0]:.3f}, {scan.log10_ratio[-1]:.3f}])") from None


def _range_mask(scan: ScaleScan, lo, hi) -> np.ndarray:
    lr = scan.log10_ratio
    mask = np.ones(lr.size, dtype=bool)
    if lo is not None:
        mask &= lr >= lo - 1e-9
    if hi is not None:
        mask &= lr <= hi + 1e-9
    return mask


def scale_local(scan: ScaleScan, q: float) -> DimensionProfile:
    """Adjacent-pair slopes [S(e_a) - S(e_b)] / [ln e_b - ln e_a], e_a < e_b."""
    S = entropy_row(scan, q)
    if S.size < 2:
        raise ScaleDimError("scale_local needs at least two scale points")
    ln_e = scan.ln_e
    lr = scan.log10_ratio
    width = np.diff(ln_e)
    if (width <= 0).any():
        j = int(np.flatnonzero(width <= 0)[0])
        raise DegenerateInterval(f"schedule points {j} and {j + 1} coincide")
    with np.errstate(invalid="ignore"):
        d = (S[:-1] - S[1:]) / width
    return DimensionProfile(q=float(q), midpoints=0.5 * (lr[:-1] + lr[1:]), d=d,
                            resolution=np.diff(lr), lo_index=np.arange(S.size - 1))


def running_average(scan: ScaleScan, q: float, anchor: float) -> AverageProfile:
    """Mean scale-local dimension between each smaller scale e and the anchor e1."""
    j1 = _index(scan, anchor, AnchorNotInSchedule)
    if scan.k[j1] >= scan.meta.get("m", np.inf):
        raise AnchorNotInSchedule("anchor must lie strictly below the whole-box scale")
    if j1 == 0:
        raise AnchorNotInSchedule("no schedule points below the anchor")
    S = entropy_row(scan, q)
    ln_e = scan.ln_e
    dbar = (S[:j1] - S[j1]) / (ln_e[j1] - ln_e[:j1])
    return AverageProfile(q=float(q), anchor=float(scan.log10_ratio[j1]),
                          log10_ratio=scan.log10_ratio[:j1].copy(), dbar=dbar)


def interval_average(scan: ScaleScan, q: float, lo: float, hi: float) -> float:
    """Mean scale-local dimension over ``[lo, hi]`` in log10(e/L)."""
    if not lo < hi:
        raise BoundsNotInSchedule(f"need lo < hi, got [{lo}, {hi}]")
    a = _index(scan, lo, BoundsNotInSchedule)
    b = _index(scan, hi, BoundsNotInSchedule)
    if a == b:
        raise BoundsNotInSchedule(f"[{lo}, {hi}] resolves to a single schedule point")
    S = entropy_row(scan, q)
    ln_e = scan.ln_e
    return float((S[a] - S[b]) / (ln_e[b] - ln_e[a]))


def estimator_Di(scan: ScaleScan, q: float = 0, indices=None) -> np.ndarray:
    """Local averages between consecutive chosen scale points (all points by default)."""
    S = entropy_row(scan, q)
    ln_e = scan.ln_e
    idx = np.arange(S.size) if indices is None else np.asarray(indices, dtype=int)
    if idx.size < 2:
        raise ScaleDimError("estimator_Di needs at least two scale points")
    # ln(L/e_{i+1}) - ln(L/e_i) with e_{i+1} the smaller scale
    return (S[idx[:-1]] - S[idx[1:]]) / (ln_e[idx[1:]] - ln_e[idx[:-1]])


def estimator_Dprime(scan: ScaleScan, L_prime: float, q: float = 0, lo=None, hi=None) -> np.ndarray:
    """Single-point estimates ln M(e) / [ln(L/e) - ln(L/L')] = ln M(e) / ln(L'/e)."""
    if not L_prime > 0:
        raise NonpositiveDenominator(f"L' must be positive, got {L_prime}")
    mask = _range_mask(scan, lo, hi)
    e = scan.e[mask]
    denom = np.log(L_prime / e)
    if (denom <= 0).any():
        raise NonpositiveDenominator(f"scale e = {e[denom <= 0][0]:.4g} is not below L' = {L_prime:.4g}")
    return entropy_row(scan, q)[mask] / denom


def estimator_Ddoubleprime(scan: ScaleScan, anchor: float, q: float = 0) -> AverageProfile:
    return running_average(scan, q, anchor)


def estimator_chi2_ratio(scan: ScaleScan, q: float = 0, L_eff: float | None = None,
                         lo=None, hi=None) -> float:
    """Sum S(e_i) ln(L_eff/e_i) / sum ln(L_eff/e_i)**2 over points with e_i < L_eff."""
    L_eff = scan.L if L_eff is None else float(L_eff)
    mask = _range_mask(scan, lo, hi) & (scan.e < L_eff)
    if not mask.any():
        raise ScaleDimError(f"no scale points below L_eff = {L_eff:.4g}")
    w = np.log(L_eff / scan.e[mask])
    S = entropy_row(scan, q)[mask]
    return math.fsum((S * w).tolist()) / math.fsum((w * w).tolist())


def fit_dimension(scan: ScaleScan, q: float = 0, lo=None, hi=None) -> dict:
    """Least-squares line of S_q against ln(1/e); free intercept absorbs d * ln L."""
    mask = _range_mask(scan, lo, hi)
    x = -scan.ln_e[mask]
    y = entropy_row(scan, q)[mask]
    if x.size < 2:
        raise ScaleDimError("fit_dimension needs at least two scale points")
    if np.ptp(x) == 0:
        raise DegenerateAbscissa("all scales are equal")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return {"slope": float(slope), "intercept": float(intercept),
            "rms_residual": float(np.sqrt(np.mean(resid ** 2)))}


def telescoping_residual(scan: ScaleScan, q: float, lo_index: int = 0, hi_index=None) -> float:
    """|sum d * dln e - (S(e_lo) - S(e_hi))| over a run of adjacent intervals."""
    prof = scale_local(scan, q)
    S = entropy_row(scan, q)
    hi_index = S.size - 1 if hi_index is None else hi_index
    sel = slice(lo_index, hi_index)
    total = math.fsum((prof.d[sel] * np.diff(scan.ln_e)[sel]).tolist())
    return abs(total - (S[lo_index] - S[hi_index]))


@dataclass
class EstimatorReport:
    q: float
    L: float
    D_i: list
    D_i_log10: list
    D_prime: dict = field(default_factory=dict)          # {L'/L: [values]}
    D_double_prime: dict = field(default_factory=dict)   # {anchor: {"log10": [...], "dbar": [...]}}
    chi2_ratio: dict = field(default_factory=dict)       # {"L_eff": ..., "value": ...}
    fit: dict = field(default_factory=dict)
    interval_mean: dict = field(default_factory=dict)    # {"lo": .., "hi": .., "value": ..}
    window: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def estimator_report(scan: ScaleScan, q: float = 0, lo: float | None = None, hi: float | None = None,
                     lprime_fractions=(0.8, 0.4), anchors=(-0.9,), L_eff: float | None = None) -> EstimatorReport:
    """Evaluate the full estimator family on the points of ``scan`` inside ``[lo, hi]``."""
    lr = scan.log10_ratio
    lo = float(lr[0]) if lo is None else lo
    hi = float(lr[-1]) if hi is None else hi
    mask = _range_mask(scan, lo, hi)
    idx = np.flatnonzero(mask)
    L = scan.L
    L_eff = L if L_eff is None else L_eff
    desc = idx[::-1]
    rep = EstimatorReport(q=float(q), L=L,
                          D_i=estimator_Di(scan, q, desc).tolist(),
                          D_i_log10=[[float(lr[b]), float(lr[a])] for a, b in zip(desc[:-1], desc[1:])],
                          window=[float(lr[idx[0]]), float(lr[idx[-1]])])
    for frac in lprime_fractions:
        rep.D_prime[str(frac)] = {"L_prime": frac * L, "log10": lr[mask].tolist(),
                                  "values": estimator_Dprime(scan, frac * L, q, lo, hi).tolist()}
    for anchor in anchors:
        ra = running_average(scan, q, anchor)
        keep = ra.log10_ratio >= lo - 1e-9
        rep.D_double_prime[str(anchor)] = {"anchor_log10": ra.anchor,
                                           "log10": ra.log10_ratio[keep].tolist(),
                                           "dbar": ra.dbar[keep].tolist()}
    rep.chi2_ratio = {"L_eff": L_eff, "value": estimator_chi2_ratio(scan, q, L_eff, lo, hi)}
    rep.fit = fit_dimension(scan, q, lo, hi)
    rep.interval_mean = {"lo": float(lr[idx[0]]), "hi": float(lr[idx[-1]]),
                         "value": interval_average(scan, q, float(lr[idx[0]]), float(lr[idx[-1]]))}
    return rep
