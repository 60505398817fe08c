import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scaledim import Box2, EscapedOrbit, MapParams, cantor_dust, henon_orbit, iterate_henon, uniform_lattice
from scaledim.errors import ScaleDimError
from scaledim.maps import Orbit, cantor_centers, random_henon_orbit


@pytest.mark.parametrize("p, params, expected", [
    ((0.0, 0.0), MapParams(1.4, 0.3), (1.4, 0.0)),
    ((1.4, 0.0), MapParams(1.4, 0.3), (-0.56, 1.4)),
    ((1.0, 1.0), MapParams(0.0, 1.0), (0.0, 1.0)),
])
def test_iterate_henon_examples(p, params, expected):
    assert iterate_henon(p, params) == pytest.approx(expected, abs=1e-15)


def test_orbit_stays_in_trapping_box():
    orbit = henon_orbit(MapParams(1.4, 0.3), (0.0, 0.0), 1000, 10_000)
    assert orbit.points.shape == (10_000, 2)
    assert np.abs(orbit.points).max() <= 1.8
    assert orbit.meta["a"] == 1.4 and orbit.meta["n_discard"] == 1000


def test_orbit_follows_the_map():
    orbit = henon_orbit(n_discard=5, n_keep=50)
    for p, nxt in zip(orbit.points[:-1], orbit.points[1:]):
        assert iterate_henon(tuple(p)) == pytest.approx(tuple(nxt), abs=0)


def test_seed_is_iterate_zero():
    orbit = henon_orbit(seed=(0.0, 0.0), n_discard=0, n_keep=1)
    np.testing.assert_array_equal(orbit.points, [[0.0, 0.0]])


def test_divergent_seed_raises_with_index():
    with pytest.raises(EscapedOrbit) as exc:
        henon_orbit(seed=(10.0, 10.0), n_discard=1000, n_keep=10)
    assert exc.value.index == 0
    with pytest.raises(EscapedOrbit) as exc:
        henon_orbit(seed=(1.7, -1.7), n_discard=1000, n_keep=10)
    assert exc.value.index == 1


def test_escape_during_kept_iterates():
    # a = 2.5 has no bounded attractor; escape happens eventually
    with pytest.raises(EscapedOrbit):
        henon_orbit(MapParams(2.5, 0.3), n_discard=0, n_keep=200)


def test_chunked_fill_matches_scalar_iteration():
    orbit = henon_orbit(n_discard=10, n_keep=70_000)
    x, y = orbit.points[65_535]
    for _ in range(3):
        x, y = iterate_henon((x, y))
    np.testing.assert_array_equal(orbit.points[65_538], [x, y])


def test_random_seed_reproducible():
    a = random_henon_orbit(rng_seed=5, n_keep=100)
    b = random_henon_orbit(rng_seed=5, n_keep=100)
    np.testing.assert_array_equal(a.points, b.points)
    assert a.meta["rng_seed"] == 5


def test_orbit_points_read_only():
    orbit = henon_orbit(n_keep=10)
    with pytest.raises(ValueError):
        orbit.points[0, 0] = 3.0


def test_orbit_rejects_points_outside_box():
    with pytest.raises(ScaleDimError):
        Orbit(np.array([[2.0, 0.0]]), Box2(0, 1, 0, 1))


def test_lattice_examples():
    pts = uniform_lattice(2, Box2(0, 1, 0, 1)).points
    assert sorted(map(tuple, pts)) == [(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)]
    assert len(uniform_lattice(1)) == 1
    assert len(uniform_lattice(1024)) == 2 ** 20


def test_cantor_examples():
    d1 = cantor_dust(1)
    np.testing.assert_allclose(sorted(d1.points[:, 0]), [1 / 6, 5 / 6])
    assert (d1.points[:, 1] == 0.5).all()
    np.testing.assert_allclose(cantor_dust(2).points[:, 0], [1 / 18, 5 / 18, 13 / 18, 17 / 18])
    assert len(cantor_dust(3, axis_count=2)) == 64


@given(st.integers(1, 9))
def test_cantor_centres_avoid_removed_thirds(depth):
    c = cantor_centers(depth)
    assert len(c) == 2 ** depth
    # every centre has base-3 digits 0 or 2 in its first `depth` places
    left = np.rint(c * 3 ** depth - 0.5).astype(np.int64)
    for _ in range(depth):
        assert ((left % 3) != 1).all()
        left //= 3


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
@settings(max_examples=30, deadline=None)
def test_orbits_from_basin_seeds_stay_bounded(x, y):
    try:
        orbit = henon_orbit(seed=(x, y), n_discard=200, n_keep=200)
    except EscapedOrbit:
        return
    assert np.isfinite(orbit.points).all()
    assert np.abs(orbit.points).max() <= 1.8


def test_map_params_must_be_finite():
    with pytest.raises(ScaleDimError):
        MapParams(math.nan, 0.3)
