"""Point-set generators: Hénon orbits and analytic reference distributions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EscapedOrbit, ScaleDimError
from .grid import HENON_BOX, Box2


@dataclass(frozen=True)
class MapParams:
    a: float = 1.4
    b: float = 0.3

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ScaleDimError(f"map parameters must be finite, got a={self.a}, b={self.b}")


@dataclass(frozen=True, eq=False)
class Orbit:
    """A finite 2-D point sample plus the metadata needed to regenerate it."""

    points: np.ndarray
    box: Box2
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ScaleDimError(f"points must have shape (n, 2), got {pts.shape}")
        if not np.isfinite(pts).all():
            raise ScaleDimError("orbit points must be finite")
        if not self.box.contains(pts).all():
            raise ScaleDimError("orbit points must lie inside the declared box")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def n_keep(self) -> int:
        return len(self.points)


_CHUNK = 1 << 16


def iterate_henon(p, params: MapParams = MapParams()):
    x, y = p
    return (params.a + params.b * y - x * x, x)


def henon_orbit(params: MapParams = MapParams(), seed=(0.0, 0.0), n_discard: int = 1000,
                n_keep: int = 10_000, escape_bound: float = 1.8) -> Orbit:
    """Iterate the Hénon map from ``seed``, discard a transient, keep ``n_keep`` points.

    The seed counts as iterate 0, so ``n_discard=0, n_keep=1`` returns the seed.
    Raises EscapedOrbit as soon as any iterate, transient included, leaves
    ``[-escape_bound, escape_bound]**2``.
    """
    if n_discard < 0 or n_keep < 1:
        raise ScaleDimError(f"need n_discard >= 0 and n_keep >= 1, got {n_discard}, {n_keep}")
    if not escape_bound > 0:
        raise ScaleDimError(f"escape_bound must be positive, got {escape_bound}")
    a, b, bound = float(params.a), float(params.b), float(escape_bound)
    x, y = float(seed[0]), float(seed[1])
    # `not (v <= bound)` also rejects NaN
    if not (abs(x) <= bound and abs(y) <= bound):
        raise EscapedOrbit(0, (x, y))
    for i in range(1, n_discard + 1):
        x, y = a + b * y - x * x, x
        if not abs(x) <= bound:
            raise EscapedOrbit(i, (x, y))
    pts = np.empty((n_keep, 2))
    pts[0] = x, y
    i = 1
    while i < n_keep:
        # fill in chunks: python floats in the loop, one numpy copy per chunk
        n = min(_CHUNK, n_keep - i)
        xs = [0.0] * n
        ys = [0.0] * n
        for j in range(n):
            x, y = a + b * y - x * x, x
            if not abs(x) <= bound:
                raise EscapedOrbit(n_discard + i + j, (x, y))
            xs[j] = x
            ys[j] = y
        pts[i:i + n, 0] = xs
        pts[i:i + n, 1] = ys
        i += n
    meta = {"generator": "henon", "a": a, "b": b, "seed": [float(seed[0]), float(seed[1])],
            "n_discard": int(n_discard), "n_keep": int(n_keep), "escape_bound": bound}
    return Orbit(pts, Box2.square(bound), meta)


def random_henon_orbit(params: MapParams = MapParams(), rng_seed=None, n_discard: int = 1000,
                       n_keep: int = 10_000, escape_bound: float = 1.8, max_tries: int = 100) -> Orbit:
    """Hénon orbit from a seed drawn uniformly in ``[-0.5, 0.5]**2``, reseeding on escape."""
    rng = np.random.default_rng(rng_seed)
    for _ in range(max_tries):
        seed = tuple(float(v) for v in rng.uniform(-0.5, 0.5, size=2))
        try:
            orbit = henon_orbit(params, seed, n_discard, n_keep, escape_bound)
        except EscapedOrbit:
            continue
        orbit.meta["rng_seed"] = rng_seed
        return orbit
    raise EscapedOrbit(-1, None)


def uniform_lattice(m: int, box: Box2 = HENON_BOX) -> Orbit:
    """Cell centres of the regular ``m x m`` subdivision of ``box`` (dimension 2)."""
    if m < 1:
        raise ScaleDimError(f"lattice divisor must be >= 1, got {m}")
    cx = box.x_min + (np.arange(m) + 0.5) * ((box.x_max - box.x_min) / m)
    cy = box.y_min + (np.arange(m) + 0.5) * ((box.y_max - box.y_min) / m)
    gx, gy = np.meshgrid(cx, cy, indexing="xy")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    return Orbit(pts, box, {"generator": "lattice", "m": int(m), "n_keep": int(m * m)})


def cantor_centers(depth: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Centres of the ``2**depth`` intervals kept by middle-thirds removal on ``[lo, hi]``."""
    if depth < 1:
        raise ScaleDimError(f"cantor depth must be >= 1, got {depth}")
    # left ends in units of 3**-depth: digits 0 or 2 in base 3
    left = np.zeros(1, dtype=np.int64)
    for _ in range(depth):
        left = np.concatenate([3 * left, 3 * left + 2])
    left.sort()
    width = (hi - lo) / 3.0 ** depth
    return lo + (left + 0.5) * width


def cantor_dust(depth: int, axis_count: int = 1, box: Box2 = Box2(0.0, 1.0, 0.0, 1.0)) -> Orbit:
    """Middle-thirds Cantor set (``axis_count=1``) or its Cartesian square (``2``).

    For the 1-D case the y coordinate sits at the box centre.
    """
    if axis_count not in (1, 2):
        raise ScaleDimError(f"axis_count must be 1 or 2, got {axis_count}")
    xs = cantor_centers(depth, box.x_min, box.x_max)
    if axis_count == 1:
        ys = np.full_like(xs, 0.5 * (box.y_min + box.y_max))
        pts = np.column_stack([xs, ys])
    else:
        yc = cantor_centers(depth, box.y_min, box.y_max)
        gx, gy = np.meshgrid(xs, yc, indexing="xy")
        pts = np.column_stack([gx.ravel(), gy.ravel()])
    return Orbit(pts, box, {"generator": "cantor", "depth": int(depth), "axis_count": axis_count,
                            "n_keep": len(pts)})
