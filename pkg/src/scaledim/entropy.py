"""Correlation sums and Rényi entropies over a scale schedule.

Entropies are in nats.  For dithered scans the average over grid offsets is
taken of the correlation sum (inside the logarithm); for ``q = 0`` it is the
average occupied-bin count and for ``q = 1`` the average Shannon entropy.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientSample, ScaleDimError
from .grid import ZERO_OFFSET, CoarseHistogram, MicroGrid, ScalePoint, rebin

FACTORIAL = "factorial"
POWER = "power"
AUTO = "auto"
ESTIMATORS = (FACTORIAL, POWER, AUTO)


def resolve_estimator(q: float, estimator: str = AUTO) -> str:
    """Factorial for integer ``q >= 2`` under ``auto``, power otherwise."""
    if estimator not in ESTIMATORS:
        raise ScaleDimError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")
    if q < 0:
        raise ScaleDimError(f"q must be non-negative, got {q}")
    if estimator == AUTO:
        return FACTORIAL if (q >= 2 and float(q).is_integer()) else POWER
    if estimator == FACTORIAL and not (q >= 2 and float(q).is_integer()):
        raise ScaleDimError(f"factorial estimator needs integer q >= 2, got {q}")
    return estimator


def _falling(n: np.ndarray | float, q: int):
    """Falling factorial n (n-1) ... (n-q+1) in floating point; zero when n < q."""
    out = np.ones_like(n, dtype=float) if isinstance(n, np.ndarray) else 1.0
    for j in range(q):
        out = out * (n - j)
    return out


def _distinct(occupancies: np.ndarray):
    # void bins are never stored, but guard against zero entries anyway
    v, c = np.unique(occupancies[occupancies > 0], return_counts=True)
    return v.astype(float), c.astype(float)


def _sum(terms: np.ndarray) -> float:
    return math.fsum(terms.tolist())


def _power_sum(values, mult, N: int, q: float) -> float:
    if q == 0:
        return float(mult.sum())
    return _sum(mult * (values / N) ** q)


def _factorial_sum(values, mult, N: int, q: int) -> float:
    if N < q:
        raise InsufficientSample(f"factorial estimator needs N >= q, got N={N}, q={q}")
    return _sum(mult * _falling(values, q)) / _falling(float(N), q)


def _shannon(values, mult, N: int) -> float:
    p = values / N
    return -_sum(mult * p * np.log(p))


def correlation_sum(hist: CoarseHistogram, q: float, estimator: str = AUTO) -> float:
    """Normalized rank-q correlation sum of one histogram.

    ``factorial``: sum n_i (n_i - 1) ... (n_i - q + 1) / [N (N - 1) ... (N - q + 1)];
    ``power``: sum (n_i / N)**q.  The factorial form is zero when every bin
    holds fewer than ``q`` points.
    """
    est = resolve_estimator(q, estimator)
    if est == POWER and q == 1:
        raise ScaleDimError("the power correlation sum at q = 1 is identically 1; use renyi_entropy")
    values, mult = _distinct(np.asarray(hist.occupancies))
    if est == FACTORIAL:
        return _factorial_sum(values, mult, hist.N, int(q))
    return _power_sum(values, mult, hist.N, q)


def _histogram_stat(hist: CoarseHistogram, q: float, est: str, distinct=None) -> float:
    """Quantity averaged over offsets: M for q=0, Shannon for q=1, C_q otherwise."""
    values, mult = distinct or _distinct(np.asarray(hist.occupancies))
    if q == 1:
        return _shannon(values, mult, hist.N)
    if q == 0:
        return float(mult.sum())
    if est == FACTORIAL:
        return _factorial_sum(values, mult, hist.N, int(q))
    return _power_sum(values, mult, hist.N, q)


def _entropy_from_mean(mean: float, q: float) -> float:
    if q == 1:
        return mean
    if mean <= 0:
        # every bin below q points (factorial) -- entropy diverges
        return math.inf
    return math.log(mean) / (1.0 - q)


def histogram_entropy(hist: CoarseHistogram, q: float, estimator: str = AUTO) -> float:
    """Rényi entropy of a single histogram (no dithering)."""
    return _entropy_from_mean(_histogram_stat(hist, q, resolve_estimator(q, estimator)), q)


def renyi_entropy(grid: MicroGrid, sp: ScalePoint, q: float, offsets=(ZERO_OFFSET,),
                  estimator: str = AUTO) -> float:
    offsets = list(offsets)
    if not offsets:
        raise ScaleDimError("offsets must be non-empty")
    est = resolve_estimator(q, estimator)
    stats = [_histogram_stat(rebin(grid, sp.k, off), q, est) for off in offsets]
    return _entropy_from_mean(math.fsum(stats) / len(stats), q)


@dataclass(frozen=True, eq=False)
class ScaleScan:
    """Entropies ``S[iq, j]`` for ``q_list[iq]`` at ``schedule[j]`` (ascending scale)."""

    schedule: list
    q_list: tuple
    S: np.ndarray
    M_mean: np.ndarray
    estimators: tuple
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> np.ndarray:
        return np.array([sp.k for sp in self.schedule], dtype=np.int64)

    @property
    def e(self) -> np.ndarray:
        return np.array([sp.e for sp in self.schedule])

    @property
    def log10_ratio(self) -> np.ndarray:
        return np.array([sp.log_ratio for sp in self.schedule])

    @property
    def ln_e(self) -> np.ndarray:
        return np.log(self.e)

    @property
    def L(self) -> float:
        return float(self.meta["L"])

    @property
    def N(self) -> int:
        return int(self.meta["N"])

    def q_index(self, q: float) -> int:
        for i, qq in enumerate(self.q_list):
            if qq == q:
                return i
        raise ScaleDimError(f"q = {q} not in scan (have {list(self.q_list)})")

    def row(self, q: float) -> np.ndarray:
        return self.S[self.q_index(q)]

    def ln_M(self) -> np.ndarray:
        """Log of the (offset-averaged) occupied-bin count, i.e. S_0."""
        return np.log(self.M_mean)

    def locate(self, log10_ratio: float, tol: float = 0.01) -> int:
        """Index of the schedule point nearest ``log10(e/L)``; KeyError if none within ``tol``."""
        lr = self.log10_ratio
        j = int(np.argmin(np.abs(lr - log10_ratio)))
        if abs(lr[j] - log10_ratio) > tol:
            raise KeyError(log10_ratio)
        return j


def _scale_job(grid, k, offset, q_list, ests):
    hist = rebin(grid, k, offset)
    distinct = _distinct(hist.occupancies)
    return hist.M, [_histogram_stat(hist, q, est, distinct) for q, est in zip(q_list, ests)]


def entropy_scan(grid: MicroGrid, schedule, q_list=(0, 1, 2), offsets=(ZERO_OFFSET,),
                 estimator: str = AUTO, threads: int = 1, meta: dict | None = None) -> ScaleScan:
    """Entropies for every (scale point, q); (scale, offset) jobs may run on a thread pool.

    Reduction is in fixed offset order, so results do not depend on ``threads``.
    """
    schedule = list(schedule)
    offsets = list(offsets)
    q_list = tuple(float(q) for q in q_list)
    if not schedule:
        raise ScaleDimError("schedule must be non-empty")
    if any(b.k <= a.k for a, b in zip(schedule, schedule[1:])):
        raise ScaleDimError("schedule must be strictly increasing in k")
    if not offsets:
        raise ScaleDimError("offsets must be non-empty")
    if not q_list:
        raise ScaleDimError("q_list must be non-empty")
    ests = tuple(resolve_estimator(q, estimator) for q in q_list)
    if any(est == FACTORIAL for est in ests) and grid.N < max(q_list):
        raise InsufficientSample(f"N={grid.N} is smaller than q={max(q_list)}")

    jobs = [(sp.k, off) for sp in schedule for off in offsets]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _scale_job(grid, job[0], job[1], q_list, ests), jobs))
    else:
        results = [_scale_job(grid, k, off, q_list, ests) for k, off in jobs]

    n_off = len(offsets)
    S = np.empty((len(q_list), len(schedule)))
    M_mean = np.empty(len(schedule))
    for j in range(len(schedule)):
        block = results[j * n_off:(j + 1) * n_off]
        M_mean[j] = math.fsum(r[0] for r in block) / n_off
        for iq, q in enumerate(q_list):
            mean = math.fsum(r[1][iq] for r in block) / n_off
            S[iq, j] = _entropy_from_mean(mean, q)

    info = {"N": grid.N, "L": grid.L, "e0": grid.e0, "m": grid.m, "n_offsets": n_off,
            "offsets": [[o.dx, o.dy] for o in offsets], "estimator": estimator}
    info.update(meta or {})
    S.setflags(write=False)
    M_mean.setflags(write=False)
    return ScaleScan(schedule, q_list, S, M_mean, ests, info)
