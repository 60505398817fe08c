"""Zero-suppressed micro-scale occupancy grids and their coarse rebinning.

An orbit is binned once at an "atomic" micro scale ``e0 = L / m``.  Every
analysis scale is an integer multiple ``k * e0``, so coarse histograms are
obtained by integer arithmetic on occupied micro-cell indices only; memory is
bounded by the number of occupied cells, never by ``m**2``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import PointOutsideBox, ScaleDimError, ScheduleBelowMicroScale


@dataclass(frozen=True)
class Box2:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        vals = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise ScaleDimError(f"box bounds must be finite, got {vals}")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ScaleDimError(f"degenerate box {vals}")

    @property
    def L(self) -> float:
        """Boundary size: the longer side length."""
        return max(self.x_max - self.x_min, self.y_max - self.y_min)

    @classmethod
    def square(cls, half_width: float, center=(0.0, 0.0)) -> "Box2":
        cx, cy = center
        return cls(cx - half_width, cx + half_width, cy - half_width, cy + half_width)

    @classmethod
    def parse(cls, text: str) -> "Box2":
        """Parse ``"x_min,x_max,y_min,y_max"``."""
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ScaleDimError(f"box needs 4 comma-separated numbers, got {text!r}")
        return cls(*parts)

    def as_tuple(self):
        return (self.x_min, self.x_max, self.y_min, self.y_max)

    def contains(self, points: np.ndarray) -> np.ndarray:
        x, y = points[:, 0], points[:, 1]
        return (x >= self.x_min) & (x <= self.x_max) & (y >= self.y_min) & (y <= self.y_max)


HENON_BOX = Box2(-1.8, 1.8, -1.8, 1.8)


@dataclass(frozen=True)
class OffsetVector:
    """Fractional shift of the coarse-grid origin, in units of the coarse scale."""

    dx: float = 0.0
    dy: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.dx < 1.0 and 0.0 <= self.dy < 1.0):
            raise ScaleDimError(f"offset components must lie in [0, 1), got ({self.dx}, {self.dy})")

    def cell_shift(self, k: int) -> tuple[int, int]:
        """Integer micro-cell shift approximating this offset at rebin factor ``k``."""
        return int(round(self.dx * k)), int(round(self.dy * k))


ZERO_OFFSET = OffsetVector(0.0, 0.0)


@dataclass(frozen=True)
class ScalePoint:
    k: int
    e: float
    log_ratio: float

    @classmethod
    def from_factor(cls, k: int, e0: float, L: float) -> "ScalePoint":
        if k < 1:
            raise ScaleDimError(f"rebin factor must be >= 1, got {k}")
        e = k * e0
        return cls(int(k), e, math.log10(e / L))


@dataclass(frozen=True, eq=False)
class CoarseHistogram:
    e: float
    occupancies: np.ndarray
    N: int
    offset: OffsetVector = ZERO_OFFSET

    @property
    def M(self) -> int:
        return int(self.occupancies.size)

    def sorted_occupancies(self) -> np.ndarray:
        return np.sort(self.occupancies)


@dataclass(frozen=True, eq=False)
class MicroGrid:
    """Sparse occupancy of the ``m x m`` micro partition of ``box``.

    ``ix``, ``iy`` and ``counts`` are parallel arrays over occupied cells only,
    ordered by packed key ``ix * m + iy``.
    """

    box: Box2
    m: int
    ix: np.ndarray
    iy: np.ndarray
    counts: np.ndarray
    N: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "N", int(self.counts.sum()))
        for arr in (self.ix, self.iy, self.counts):
            arr.setflags(write=False)

    @property
    def e0(self) -> float:
        return self.box.L / self.m

    @property
    def L(self) -> float:
        return self.box.L

    @property
    def n_occupied(self) -> int:
        return int(self.counts.size)

    @property
    def cells(self) -> dict:
        return {(int(a), int(b)): int(c) for a, b, c in zip(self.ix, self.iy, self.counts)}

    @classmethod
    def from_cells(cls, box: Box2, m: int, cells) -> "MicroGrid":
        """Build from a mapping ``{(ix, iy): count}`` (zero counts dropped)."""
        items = [(int(i), int(j), int(c)) for (i, j), c in dict(cells).items() if c]
        if not items:
            arr = np.zeros(0, dtype=np.int64)
            return cls(box, m, arr, arr.copy(), arr.copy())
        a = np.array(items, dtype=np.int64)
        if (a[:, :2] < 0).any() or (a[:, :2] >= m).any():
            raise ScaleDimError("cell index outside [0, m)")
        if (a[:, 2] < 0).any():
            raise ScaleDimError("negative occupancy")
        order = np.argsort(a[:, 0] * m + a[:, 1], kind="stable")
        a = a[order]
        return cls(box, m, a[:, 0].copy(), a[:, 1].copy(), a[:, 2].copy())

    @classmethod
    def from_counts(cls, counts, m: int | None = None) -> "MicroGrid":
        """Place arbitrary occupancies in distinct cells of a unit box.

        Convenience for testing histogram-level functions through the grid API:
        at ``k = 1`` the coarse histogram is exactly ``counts``.
        """
        counts = np.asarray(counts, dtype=np.int64)
        counts = counts[counts > 0]
        m = m or max(2, int(math.ceil(math.sqrt(max(counts.size, 1)))))
        idx = np.arange(counts.size, dtype=np.int64)
        return cls.from_cells(Box2(0.0, 1.0, 0.0, 1.0), m,
                              {(int(i // m), int(i % m)): int(c) for i, c in zip(idx, counts)})


def _cell_indices(coords: np.ndarray, lo: float, e: float, n_cells: int) -> np.ndarray:
    idx = np.floor((coords - lo) / e).astype(np.int64)
    # upper box edge (and round-off just below it) goes into the last cell
    return np.clip(idx, 0, n_cells - 1)


def build_microgrid(orbit, box: Box2, m: int) -> MicroGrid:
    """Bin the orbit's points into the ``m x m`` micro grid of ``box``."""
    if not 2 <= m < 2 ** 30:
        raise ScaleDimError(f"micro divisor must lie in [2, 2**30), got {m}")
    pts = np.asarray(getattr(orbit, "points", orbit), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ScaleDimError("points must be an (n, 2) array")
    inside = box.contains(pts)
    if not inside.all():
        bad = int(np.flatnonzero(~inside)[0])
        raise PointOutsideBox(bad, tuple(pts[bad]))
    e0 = box.L / m
    ix = _cell_indices(pts[:, 0], box.x_min, e0, m)
    iy = _cell_indices(pts[:, 1], box.y_min, e0, m)
    keys, counts = np.unique(ix * m + iy, return_counts=True)
    return MicroGrid(box, m, keys // m, keys % m, counts.astype(np.int64))


# dense bincount is used below this many coarse cells, sort-based unique above
_DENSE_LIMIT = 1 << 22


def _coarse_axis(idx: np.ndarray, shift: int, k: int, m: int) -> np.ndarray:
    # int32 keeps the shift/wrap/divide passes cheap; indices plus shift stay below 2**31
    out = idx.astype(np.int32)
    if shift:
        out += shift
        out -= m * (out >= m)
    if k > 1:
        out //= k
    return out


def rebin(grid: MicroGrid, k: int, offset: OffsetVector = ZERO_OFFSET) -> CoarseHistogram:
    """Coarse histogram at scale ``k * e0``.

    The coarse origin is shifted by ``round(offset * k)`` micro cells, wrapping
    periodically within the ``m`` micro cells of each axis, so the whole-box
    scale ``k = m`` always yields a single bin.
    """
    m = grid.m
    if not 1 <= k <= m:
        raise ScaleDimError(f"rebin factor must satisfy 1 <= k <= m={m}, got {k}")
    nc = -(-m // k)
    ix = _coarse_axis(grid.ix, offset.cell_shift(k)[0], k, m)
    iy = _coarse_axis(grid.iy, offset.cell_shift(k)[1], k, m)
    key = ix.astype(np.int64) * nc + iy
    if nc * nc <= _DENSE_LIMIT:
        occ = np.bincount(key, weights=grid.counts, minlength=nc * nc)
        occ = occ[occ > 0].astype(np.int64)
    else:
        _, inv = np.unique(key, return_inverse=True)
        occ = np.bincount(inv.ravel(), weights=grid.counts).astype(np.int64)
    return CoarseHistogram(e=k * grid.e0, occupancies=occ, N=grid.N, offset=offset)


def scale_schedule(grid: MicroGrid, per_decade: int = 20, log_lo: float = -4.0,
                   log_hi: float = -1.0) -> list[ScalePoint]:
    """Geometric scale points ``L * 10**(log_lo + j/per_decade)`` snapped to integer ``k``."""
    if per_decade < 1:
        raise ScaleDimError(f"per_decade must be >= 1, got {per_decade}")
    if not log_lo < log_hi <= 0:
        raise ScaleDimError(f"need log_lo < log_hi <= 0, got [{log_lo}, {log_hi}]")
    L, e0 = grid.L, grid.e0
    lowest = L * 10.0 ** log_lo
    if lowest < e0 * (1 - 1e-9):
        raise ScheduleBelowMicroScale(
            f"lower scale bound 10^{log_lo}*L = {lowest:.3g} is below the micro scale "
            f"e0 = {e0:.3g}; increase the micro divisor to at least {math.ceil(10 * L / lowest)}")
    if lowest < 10 * e0 * (1 - 1e-9):
        warnings.warn(
            f"micro scale e0 = {e0:.3g} is less than a decade below the lower working "
            f"scale {lowest:.3g}; integer granularity may limit the scale resolution",
            stacklevel=2)
    n_steps = int(round((log_hi - log_lo) * per_decade))
    ks = []
    for j in range(n_steps + 1):
        target = L * 10.0 ** (log_lo + j / per_decade)
        k = min(max(1, int(round(target / e0))), grid.m)
        if not ks or k > ks[-1]:
            ks.append(k)
    return [ScalePoint.from_factor(k, e0, L) for k in ks]


def scale_points(grid: MicroGrid, factors) -> list[ScalePoint]:
    """Explicit schedule from a list of rebin factors (sorted, deduplicated)."""
    ks = sorted({int(k) for k in factors})
    if not ks or ks[0] < 1 or ks[-1] > grid.m:
        raise ScaleDimError(f"rebin factors must lie in [1, {grid.m}]")
    return [ScalePoint.from_factor(k, grid.e0, grid.L) for k in ks]


def dither_offsets(n_offsets: int, rng_seed=0) -> list[OffsetVector]:
    if n_offsets < 1:
        raise ScaleDimError(f"n_offsets must be >= 1, got {n_offsets}")
    rng = np.random.default_rng(rng_seed)
    draws = rng.random((n_offsets - 1, 2))
    return [ZERO_OFFSET] + [OffsetVector(float(a), float(b)) for a, b in draws]
