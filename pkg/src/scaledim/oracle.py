"""Brute-force references: direct box counting of raw points and pair counting.

Deliberately naive (no micro grid, no spatial index) so they stay
independent of the fast paths they are used to check.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import PointOutsideBox, ScaleDimError
from .grid import ZERO_OFFSET, Box2, CoarseHistogram, OffsetVector

CHEBYSHEV = "chebyshev"
EUCLIDEAN = "euclidean"


def _points(orbit) -> np.ndarray:
    return np.asarray(getattr(orbit, "points", orbit), dtype=float)


def direct_box_count(orbit, box: Box2, e: float, offset: OffsetVector = ZERO_OFFSET) -> CoarseHistogram:
    """Bin raw points into boxes of side ``e`` whose origin is shifted by ``-offset * e``."""
    if not e > 0:
        raise ScaleDimError(f"scale must be positive, got {e}")
    pts = _points(orbit)
    inside = box.contains(pts)
    if not inside.all():
        bad = int(np.flatnonzero(~inside)[0])
        raise PointOutsideBox(bad, tuple(pts[bad]))
    bx = np.floor((pts[:, 0] - box.x_min) / e + offset.dx).astype(np.int64)
    by = np.floor((pts[:, 1] - box.y_min) / e + offset.dy).astype(np.int64)
    if offset.dx == 0 and offset.dy == 0:
        # points on the upper box edge belong to the last box
        n = max(1, math.ceil(box.L / e * (1 - 1e-12)))
        bx = np.minimum(bx, n - 1)
        by = np.minimum(by, n - 1)
    counts = {}
    for key in zip(bx.tolist(), by.tolist()):
        counts[key] = counts.get(key, 0) + 1
    occ = np.fromiter(counts.values(), dtype=np.int64, count=len(counts))
    return CoarseHistogram(e=float(e), occupancies=occ, N=len(pts), offset=offset)


def _distances(block: np.ndarray, pts: np.ndarray, norm: str) -> np.ndarray:
    dx = np.abs(block[:, None, 0] - pts[None, :, 0])
    dy = np.abs(block[:, None, 1] - pts[None, :, 1])
    if norm == CHEBYSHEV:
        return np.maximum(dx, dy)
    if norm == EUCLIDEAN:
        return np.hypot(dx, dy)
    raise ScaleDimError(f"unknown norm {norm!r}")


def pair_counts(orbit, scales, norm: str = CHEBYSHEV, block: int = 512) -> np.ndarray:
    """Number of ordered pairs (i, j), i != j, with distance <= e, for each e in ``scales``."""
    pts = _points(orbit)
    es = np.asarray(scales, dtype=float)
    order = np.argsort(es)
    sorted_es = es[order]
    hist = np.zeros(es.size + 1, dtype=np.int64)
    for start in range(0, len(pts), block):
        d = _distances(pts[start:start + block], pts, norm).ravel()
        # slot j counts distances in (e_{j-1}, e_j]
        hist += np.bincount(np.searchsorted(sorted_es, d, side="left"), minlength=es.size + 1)
    within = np.cumsum(hist)[:-1] - len(pts)   # drop the N self-pairs at distance 0
    out = np.empty_like(within)
    out[order] = within
    return out


def pairwise_correlation_curve(orbit, scales, norm: str = CHEBYSHEV, include_self: bool = True) -> np.ndarray:
    """Pair-counting correlation integral C_2(e) at each scale.

    ``include_self=True`` is the literal double sum over all N**2 ordered
    pairs; ``False`` drops i == j and divides by N (N - 1), the normalization
    of the factorial box estimator.
    """
    N = len(_points(orbit))
    if N < 2:
        raise ScaleDimError("pair counting needs at least two points")
    pairs = pair_counts(orbit, scales, norm).astype(float)
    if include_self:
        return (pairs + N) / (N * N)
    return pairs / (N * (N - 1))


def pairwise_correlation(orbit, e: float, norm: str = CHEBYSHEV, include_self: bool = True) -> float:
    return float(pairwise_correlation_curve(orbit, [e], norm, include_self)[0])
