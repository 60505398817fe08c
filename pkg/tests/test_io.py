import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scaledim import io as sio
from scaledim import MicroGrid, Box2, dimension_transport, running_average, scale_local
from scaledim.errors import ScaleDimError


def test_fmt_round_trips_exactly():
    for v in (0.1, 1 / 3, 1e-300, -2.5e17, float("inf")):
        assert float(sio.fmt(v)) == v


@pytest.mark.parametrize("suffix", [".csv", ".npy"])
def test_points_round_trip(tmp_path, henon_small, suffix):
    path = tmp_path / f"pts{suffix}"
    sio.write_points(path, henon_small.points)
    np.testing.assert_array_equal(sio.read_points(path), henon_small.points)


def test_points_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ScaleDimError):
        sio.read_points(path)


def test_microgrid_round_trip(tmp_path, henon_grid):
    path = tmp_path / "grid.csv"
    sio.write_microgrid(path, henon_grid)
    back = sio.read_microgrid(path)
    assert back.box == henon_grid.box and back.m == henon_grid.m and back.N == henon_grid.N
    np.testing.assert_array_equal(back.counts, henon_grid.counts)
    np.testing.assert_array_equal(back.ix, henon_grid.ix)


@given(st.dictionaries(st.tuples(st.integers(0, 99), st.integers(0, 99)), st.integers(1, 1000), max_size=30))
@settings(max_examples=30, deadline=None)
def test_microgrid_round_trip_property(tmp_path_factory, cells):
    grid = MicroGrid.from_cells(Box2(-1.0, 2.0, 0.5, 3.5), 100, cells)
    path = tmp_path_factory.mktemp("g") / "grid.csv"
    sio.write_microgrid(path, grid)
    assert sio.read_microgrid(path).cells == grid.cells


def test_microgrid_total_checked(tmp_path, henon_grid):
    path = tmp_path / "grid.csv"
    sio.write_microgrid(path, henon_grid)
    path.write_text(path.read_text().replace(f"# N={henon_grid.N}", "# N=3"))
    with pytest.raises(ScaleDimError):
        sio.read_microgrid(path)


def test_scan_round_trip(tmp_path, henon_scan):
    path = tmp_path / "scan.csv"
    sio.write_scan(path, henon_scan)
    sio.write_sidecar(path, {"scan": sio.scan_sidecar_fields(henon_scan)})
    back = sio.read_scan(path)
    np.testing.assert_array_equal(back.S, henon_scan.S)
    np.testing.assert_array_equal(back.M_mean, henon_scan.M_mean)
    np.testing.assert_array_equal(back.k, henon_scan.k)
    np.testing.assert_array_equal(back.e, henon_scan.e)
    assert back.q_list == henon_scan.q_list and back.N == henon_scan.N and back.L == henon_scan.L


def test_scan_without_sidecar_uses_S0(tmp_path, henon_scan):
    path = tmp_path / "scan.csv"
    sio.write_scan(path, henon_scan)
    back = sio.read_scan(path)
    np.testing.assert_allclose(back.M_mean, henon_scan.M_mean, rtol=1e-12)
    assert back.L == pytest.approx(henon_scan.L, rel=1e-12)


def test_profile_files(tmp_path, henon_scan):
    prof = [scale_local(henon_scan, q) for q in henon_scan.q_list]
    sio.write_profiles(tmp_path / "p.csv", prof)
    rows = sio.read_rows(tmp_path / "p.csv")
    assert list(rows[0]) == sio.PROFILE_COLUMNS
    assert len(rows) == sum(p.d.size for p in prof)
    assert rows[0]["d"] == prof[0].d[0]

    avg = running_average(henon_scan, 0, -1.0)
    sio.write_averages(tmp_path / "a.csv", [avg])
    rows = sio.read_rows(tmp_path / "a.csv")
    assert list(rows[0]) == sio.AVERAGE_COLUMNS and rows[0]["dbar"] == avg.dbar[0]

    tp = dimension_transport(henon_scan, henon_scan, 0)
    sio.write_transport(tmp_path / "t.csv", tp)
    rows = sio.read_rows(tmp_path / "t.csv")
    assert list(rows[0]) == sio.TRANSPORT_COLUMNS


def test_sidecar_records_version(tmp_path):
    path = tmp_path / "x.csv"
    sio.write_sidecar(path, {"a": np.float64(1.5), "b": np.arange(3)})
    side = sio.read_sidecar(path)
    assert side["tool"] == "scaledim" and "version" in side
    assert side["a"] == 1.5 and side["b"] == [0, 1, 2]
    assert sio.read_sidecar(tmp_path / "missing.csv") is None
