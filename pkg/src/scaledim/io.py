"""File formats: point lists, micro-grid snapshots, scans, profiles, JSON sidecars.

Floats are written with 17 significant digits so every CSV round-trips
exactly.  Each output file ``foo.csv`` may carry a sidecar ``foo.csv.json``
with the effective configuration that produced it.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .entropy import ScaleScan
from .errors import ScaleDimError
from .grid import Box2, MicroGrid, ScalePoint

SCAN_COLUMNS = ["k", "e", "log10_e_over_L", "q", "S_nats", "n_offsets", "estimator"]
PROFILE_COLUMNS = ["log10_e_over_L_mid", "q", "d", "delta_log10_e"]
AVERAGE_COLUMNS = ["log10_e_over_L", "q", "dbar", "anchor_log10"]
TRANSPORT_COLUMNS = ["log10_e_over_L_mid", "q", "delta_d", "I_nats"]


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def write_sidecar(path, payload: dict) -> Path:
    out = sidecar_path(path)
    body = {"tool": "scaledim", "version": __version__, **payload}
    out.write_text(json.dumps(body, indent=2, sort_keys=True, default=_json_default) + "\n")
    return out


def read_sidecar(path) -> dict | None:
    p = sidecar_path(path)
    if not p.exists():
        return None
    return json.loads(p.read_text())


def write_json(path, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


# -- points ---------------------------------------------------------------

def write_points(path, points: np.ndarray):
    path = Path(path)
    pts = np.asarray(points, dtype=float)
    if path.suffix == ".npy":
        np.save(path, pts)
    else:
        np.savetxt(path, pts, fmt="%.17g", delimiter=",", header="x,y", comments="")


def read_points(path) -> np.ndarray:
    path = Path(path)
    if path.suffix == ".npy":
        pts = np.load(path)
    else:
        with open(path) as fh:
            header = fh.readline().strip().replace(" ", "")
            if header != "x,y":
                raise ScaleDimError(f"{path}: expected header 'x,y', got {header!r}")
            pts = np.loadtxt(fh, delimiter=",", dtype=float, ndmin=2)
    if pts.size == 0:
        pts = pts.reshape(0, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ScaleDimError(f"{path}: expected two columns, got shape {pts.shape}")
    return pts


# -- micro grid -----------------------------------------------------------

def write_microgrid(path, grid: MicroGrid):
    with open(path, "w", newline="") as fh:
        fh.write("# box=" + ",".join(fmt(v) for v in grid.box.as_tuple()) + "\n")
        fh.write(f"# m={grid.m}\n# N={grid.N}\n")
        fh.write("ix,iy,count\n")
        np.savetxt(fh, np.column_stack([grid.ix, grid.iy, grid.counts]), fmt="%d", delimiter=",")


def read_microgrid(path) -> MicroGrid:
    header = {}
    with open(path) as fh:
        line = fh.readline()
        while line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            header[key.strip()] = val.strip()
            line = fh.readline()
        if line.strip() != "ix,iy,count":
            raise ScaleDimError(f"{path}: expected column header 'ix,iy,count'")
        with warnings.catch_warnings():
            # an empty grid has no data rows
            warnings.simplefilter("ignore", UserWarning)
            rows = np.loadtxt(fh, delimiter=",", dtype=np.int64, ndmin=2)
    try:
        box = Box2.parse(header["box"])
        m = int(header["m"])
        n_total = int(header["N"])
    except KeyError as exc:
        raise ScaleDimError(f"{path}: missing header field {exc}") from None
    rows = rows.reshape(-1, 3)
    order = np.argsort(rows[:, 0] * m + rows[:, 1], kind="stable")
    rows = rows[order]
    grid = MicroGrid(box, m, rows[:, 0].copy(), rows[:, 1].copy(), rows[:, 2].copy())
    if grid.N != n_total:
        raise ScaleDimError(f"{path}: occupancies sum to {grid.N}, header says N={n_total}")
    return grid


# -- scans ----------------------------------------------------------------

def scan_sidecar_fields(scan: ScaleScan) -> dict:
    return {"L": scan.L, "e0": scan.meta.get("e0"), "m": scan.meta.get("m"), "N": scan.N,
            "M_mean": [fmt(v) for v in scan.M_mean], "offsets": scan.meta.get("offsets"),
            "q_list": list(scan.q_list), "estimators": list(scan.estimators)}


def write_scan(path, scan: ScaleScan):
    n_off = scan.meta.get("n_offsets", 1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCAN_COLUMNS)
        for j, sp in enumerate(scan.schedule):
            for iq, q in enumerate(scan.q_list):
                w.writerow([sp.k, fmt(sp.e), fmt(sp.log_ratio), fmt(q), fmt(scan.S[iq, j]),
                            n_off, scan.estimators[iq]])


def read_scan(path, sidecar: dict | None = None) -> ScaleScan:
    """Rebuild a ScaleScan from its CSV (and sidecar, when present)."""
    sidecar = read_sidecar(path) if sidecar is None else sidecar
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ScaleDimError(f"{path}: empty scan")
    missing = set(SCAN_COLUMNS) - set(rows[0])
    if missing:
        raise ScaleDimError(f"{path}: missing columns {sorted(missing)}")
    ks, qs = [], []
    by_point = {}
    for r in rows:
        k, q = int(r["k"]), float(r["q"])
        if k not in by_point:
            ks.append(k)
            by_point[k] = (float(r["e"]), float(r["log10_e_over_L"]), {})
        if q not in qs:
            qs.append(q)
        by_point[k][2][q] = (float(r["S_nats"]), r["estimator"], int(r["n_offsets"]))
    schedule = [ScalePoint(k, by_point[k][0], by_point[k][1]) for k in ks]
    S = np.array([[by_point[k][2][q][0] for k in ks] for q in qs])
    ests = tuple(by_point[ks[0]][2][q][1] for q in qs)
    n_off = by_point[ks[0]][2][qs[0]][2]

    info = dict((sidecar or {}).get("scan", {}))
    if "M_mean" in info:
        M_mean = np.array([float(v) for v in info["M_mean"]])
    elif 0.0 in qs:
        M_mean = np.exp(S[qs.index(0.0)])
    else:
        M_mean = np.full(len(ks), math.nan)
    L = info.get("L") or schedule[-1].e / 10.0 ** schedule[-1].log_ratio
    # N = 0 marks an unknown sample size (no sidecar); occupancy checks then fail safe
    meta = {"L": L, "N": info.get("N") or 0, "e0": info.get("e0"), "m": info.get("m"),
            "n_offsets": n_off, "offsets": info.get("offsets"), "source": str(path)}
    return ScaleScan(schedule, tuple(qs), S, M_mean, ests, meta)


# -- profiles -------------------------------------------------------------

def _write_rows(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in r.items()} for r in csv.DictReader(fh)]


def write_profiles(path, profiles):
    _write_rows(path, PROFILE_COLUMNS,
                ((mid, p.q, d, res) for p in profiles for mid, d, res in zip(p.midpoints, p.d, p.resolution)))


def write_averages(path, averages):
    _write_rows(path, AVERAGE_COLUMNS,
                ((x, a.q, v, a.anchor) for a in averages for x, v in zip(a.log10_ratio, a.dbar)))


def write_transport(path, profile):
    _write_rows(path, TRANSPORT_COLUMNS,
                ((mid, profile.q, dd, info) for mid, dd, info in zip(profile.midpoints, profile.delta_d, profile.I_mid)))
