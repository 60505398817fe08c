"""Command-line driver: generate -> scan -> estimate / compare, plus check.

Every output file gets a JSON sidecar carrying the effective configuration,
including the full argument vector, so ``scaledim replay FILE.json`` reruns it.
"""
from __future__ import annotations

import argparse
import logging
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path


from . import __version__, checks
from . import io as sio
from .dimension import estimator_report, running_average, scale_local
from .entropy import AUTO, ESTIMATORS, entropy_scan
from .errors import ConfigError, ScaleDimError
from .grid import HENON_BOX, Box2, build_microgrid, dither_offsets, scale_schedule
from .maps import MapParams, Orbit, cantor_dust, henon_orbit, random_henon_orbit, uniform_lattice
from .transport import dimension_transport, log_correlation_residual

log = logging.getLogger("scaledim")

DEFAULT_MICRO_DIVISOR = 200_000


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return vals[0], vals[1]


def _box(text: str) -> Box2:
    try:
        return Box2.parse(text)
    except (ValueError, ScaleDimError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@dataclass
class RunConfig:
    """Effective configuration of one run; validated before any computation."""

    box: Box2 = HENON_BOX
    micro_divisor: int = DEFAULT_MICRO_DIVISOR
    per_decade: int = 20
    log_range: tuple = (-4.0, -1.0)
    q: list = field(default_factory=lambda: [0.0, 1.0, 2.0])
    n_offsets: int = 8
    rng_seed: int = 0
    estimator: str = AUTO
    threads: int = 1

    def validate(self):
        if self.micro_divisor < 2:
            raise ConfigError("micro_divisor", f"must be >= 2, got {self.micro_divisor}")
        if self.per_decade < 1:
            raise ConfigError("per_decade", f"must be >= 1, got {self.per_decade}")
        lo, hi = self.log_range
        if not lo < hi <= 0:
            raise ConfigError("log_range", f"need lo < hi <= 0, got {lo},{hi}")
        if not self.q or any(q < 0 for q in self.q):
            raise ConfigError("q", f"need a non-empty list of non-negative values, got {self.q}")
        if self.n_offsets < 1:
            raise ConfigError("offsets", f"must be >= 1, got {self.n_offsets}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError("estimator", f"must be one of {ESTIMATORS}, got {self.estimator!r}")
        if self.estimator == "factorial" and any(not (q >= 2 and float(q).is_integer()) for q in self.q):
            raise ConfigError("estimator", "factorial needs every q to be an integer >= 2")
        if self.threads < 1:
            raise ConfigError("threads", f"must be >= 1, got {self.threads}")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["box"] = list(self.box.as_tuple())
        d["log_range"] = list(self.log_range)
        return d


def _sidecar(path, args, extra=None):
    payload = {"command": args.command, "argv": args.argv, "config": {k: v for k, v in vars(args).items()
                                                                      if k not in ("func", "argv")}}
    payload.update(extra or {})
    sio.write_sidecar(path, payload)


# -- generate -------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.synthetic == "lattice":
        box = args.box or HENON_BOX
        orbit = uniform_lattice(args.m, box)
    elif args.synthetic == "cantor":
        box = args.box or Box2(0.0, 1.0, 0.0, 1.0)
        orbit = cantor_dust(args.depth, args.axis_count, box)
    else:
        if args.keep < 1 or args.discard < 0:
            raise ConfigError("keep/discard", "need --keep >= 1 and --discard >= 0")
        params = MapParams(args.a, args.b)
        if args.seed_xy is not None:
            orbit = henon_orbit(params, args.seed_xy, args.discard, args.keep, args.escape_bound)
        else:
            orbit = random_henon_orbit(params, args.rng_seed, args.discard, args.keep, args.escape_bound)
    out = Path(args.out) if args.out else Path(args.out_dir) / f"orbit.{args.format}"
    out.parent.mkdir(parents=True, exist_ok=True)
    sio.write_points(out, orbit.points)
    _sidecar(out, args, {"orbit": {**orbit.meta, "box": list(orbit.box.as_tuple()), "n_points": len(orbit)}})
    print(f"wrote {len(orbit)} points to {out}")
    return 0


# -- scan -----------------------------------------------------------------

def _scan_config(args) -> RunConfig:
    side = sio.read_sidecar(args.points) or {}
    box = args.box
    if box is None and "orbit" in side:
        box = Box2(*side["orbit"]["box"])
    return RunConfig(box=box or HENON_BOX, micro_divisor=args.micro_divisor, per_decade=args.per_decade,
                     log_range=tuple(args.log_range), q=list(args.q), n_offsets=args.offsets,
                     rng_seed=args.rng_seed, estimator=args.estimator, threads=args.threads).validate()


def cmd_scan(args) -> int:
    cfg = _scan_config(args)
    pts = sio.read_points(args.points)
    orbit = Orbit(pts, cfg.box, {"source": str(args.points)}) if cfg.box.contains(pts).all() else None
    if orbit is None:
        raise ConfigError("box", f"points in {args.points} fall outside box {cfg.box.as_tuple()}; pass --box")
    t0 = time.perf_counter()
    grid = build_microgrid(orbit, cfg.box, cfg.micro_divisor)
    schedule = scale_schedule(grid, cfg.per_decade, *cfg.log_range)
    offsets = dither_offsets(cfg.n_offsets, cfg.rng_seed)
    scan = entropy_scan(grid, schedule, cfg.q, offsets, cfg.estimator, threads=cfg.threads,
                        meta={"source": str(args.points)})
    log.info("scan of %d points, %d scale points x %d offsets in %.1fs", grid.N, len(schedule),
             len(offsets), time.perf_counter() - t0)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scan_path = out_dir / "scan.csv"
    prof_path = out_dir / "profile.csv"
    sio.write_scan(scan_path, scan)
    extra = {"run_config": cfg.to_dict(), "scan": sio.scan_sidecar_fields(scan)}
    _sidecar(scan_path, args, extra)
    sio.write_profiles(prof_path, [scale_local(scan, q) for q in scan.q_list])
    _sidecar(prof_path, args, extra)
    if args.save_grid:
        sio.write_microgrid(out_dir / "microgrid.csv", grid)
        _sidecar(out_dir / "microgrid.csv", args, {"run_config": cfg.to_dict()})
    print(f"wrote {scan_path} and {prof_path} ({len(schedule)} scale points, q = {list(scan.q_list)})")
    return 0


# -- estimate -------------------------------------------------------------

def cmd_estimate(args) -> int:
    scan = sio.read_scan(args.scan)
    lo, hi = args.log_range if args.log_range else (None, None)
    L_eff = args.l_eff * scan.L
    if not args.anchor_log10:
        args.anchor_log10 = [float(scan.log10_ratio[-1])]
    for anchor in args.anchor_log10:
        try:
            scan.locate(anchor)
        except KeyError:
            raise ConfigError("anchor_log10", f"{anchor} is not a schedule point of {args.scan} "
                              f"(scan spans {scan.log10_ratio[0]:.3f} .. {scan.log10_ratio[-1]:.3f})") from None
    reports = [estimator_report(scan, q, lo, hi, args.lprime, args.anchor_log10, L_eff).to_dict() for q in args.q]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "estimates.json"
    sio.write_json(out, {"scan": str(args.scan), "inputs": {"L_eff": L_eff, "L_prime_fractions": args.lprime,
                                                            "anchors_log10": args.anchor_log10,
                                                            "window": [lo, hi]},
                         "reports": reports})
    _sidecar(out, args)
    avg_path = out_dir / "running_average.csv"
    sio.write_averages(avg_path, [running_average(scan, q, a) for q in args.q for a in args.anchor_log10])
    _sidecar(avg_path, args)
    for rep in reports:
        print(f"q={rep['q']:g}: interval mean {rep['interval_mean']['value']:.4f} over "
              f"[{rep['interval_mean']['lo']:.2f}, {rep['interval_mean']['hi']:.2f}], "
              f"fit slope {rep['fit']['slope']:.4f}, chi2 ratio {rep['chi2_ratio']['value']:.4f}")
    print(f"wrote {out} and {avg_path}")
    return 0


# -- compare --------------------------------------------------------------

def cmd_compare(args) -> int:
    a, b = sio.read_scan(args.scan_a), sio.read_scan(args.scan_b)
    prof = dimension_transport(a, b, args.q, args.anchor_log10)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "transport.csv"
    sio.write_transport(out, prof)
    _sidecar(out, args, {"transport": {"anchor_log10": prof.anchor, "identity_residual": prof.identity_residual,
                                       "log_correlation_residual": log_correlation_residual(a, b, prof)}})
    print(f"wrote {out}; identity residual {prof.identity_residual:.2e}")
    return 0


# -- check ----------------------------------------------------------------

def cmd_check(args) -> int:
    t0 = time.perf_counter()
    results = checks.run_checks(args.n)
    for r in results:
        print(r.line())
    ok = checks.all_ok(results)
    print(f"{'all checks passed' if ok else 'CHECKS FAILED'} in {time.perf_counter() - t0:.1f}s")
    return 0 if ok else 1


def cmd_replay(args) -> int:
    side = sio.read_sidecar(args.sidecar[:-5]) if args.sidecar.endswith(".json") else None
    if not side or "argv" not in side:
        raise ConfigError("sidecar", f"{args.sidecar} has no recorded argv")
    return main(side["argv"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scaledim", description="Scale-local Rényi dimensions of 2-D point sets")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a Hénon orbit or synthetic reference point set")
    g.add_argument("--map", choices=["henon"], default="henon")
    g.add_argument("--synthetic", choices=["lattice", "cantor"])
    g.add_argument("--a", type=float, default=1.4)
    g.add_argument("--b", type=float, default=0.3)
    g.add_argument("--seed-xy", type=_pair, help="initial point x,y (default: random in [-0.5,0.5]^2)")
    g.add_argument("--rng-seed", type=int, default=0)
    g.add_argument("--discard", type=int, default=1000)
    g.add_argument("--keep", type=int, default=1_000_000)
    g.add_argument("--escape-bound", type=float, default=1.8)
    g.add_argument("--m", type=int, default=1024, help="lattice cells per side")
    g.add_argument("--depth", type=int, default=8, help="cantor construction depth")
    g.add_argument("--axis-count", type=int, choices=[1, 2], default=1)
    g.add_argument("--box", type=_box)
    g.add_argument("--format", choices=["csv", "npy"], default="csv")
    g.add_argument("--out")
    g.add_argument("--out-dir", default=".")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("scan", help="micro-bin a point file and compute entropies and scale-local dimensions")
    s.add_argument("points")
    s.add_argument("--box", type=_box, help="x_min,x_max,y_min,y_max (default: from sidecar, else Hénon box)")
    s.add_argument("--micro-divisor", type=int, default=DEFAULT_MICRO_DIVISOR)
    s.add_argument("--per-decade", type=int, default=20)
    s.add_argument("--log-range", type=_pair, default=(-4.0, -1.0))
    s.add_argument("--q", type=_floats, default=[0.0, 1.0, 2.0])
    s.add_argument("--offsets", type=int, default=8, help="number of dithered grid origins (1 = plain box counting)")
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--estimator", choices=list(ESTIMATORS), default=AUTO)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--save-grid", action="store_true", help="also write the micro-grid snapshot")
    s.add_argument("--out-dir", default=".")
    s.set_defaults(func=cmd_scan)

    e = sub.add_parser("estimate", help="limit-style estimators and running averages from a scan")
    e.add_argument("scan")
    e.add_argument("--q", type=_floats, default=[0.0])
    e.add_argument("--log-range", type=_pair, help="estimator window in log10(e/L) (default: whole scan)")
    e.add_argument("--lprime", type=_floats, default=[0.8, 0.4], help="L' values as fractions of L")
    e.add_argument("--anchor-log10", type=_floats, help="running-average anchors log10(e1/L) (default: largest scale)")
    e.add_argument("--l-eff", type=float, default=1.0, help="L_eff for the chi2 ratio, as a fraction of L")
    e.add_argument("--out-dir", default=".")
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("compare", help="dimension transport between two schedule-matched scans")
    c.add_argument("scan_a")
    c.add_argument("scan_b")
    c.add_argument("--q", type=float, default=0.0)
    c.add_argument("--anchor-log10", type=float, help="zero of the information (default: largest scale)")
    c.add_argument("--out-dir", default=".")
    c.set_defaults(func=cmd_compare)

    k = sub.add_parser("check", help="run oracle, telescoping, monotonicity and Kullback self-checks")
    k.add_argument("--n", type=int, default=10_000, help="Hénon sample size for the checks")
    k.set_defaults(func=cmd_check)

    r = sub.add_parser("replay", help="rerun the command recorded in an output sidecar")
    r.add_argument("sidecar")
    r.set_defaults(func=cmd_replay)
    return p


_NUMBER_LIST = re.compile(r"^-?[\d.]+(e-?\d+)?(,-?[\d.]+(e-?\d+)?)*$")


def _join_negative_values(argv):
    # argparse reads "-3,-1" as an option; glue it to the preceding flag instead
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and tok.startswith("-") and _NUMBER_LIST.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(argv))
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ScaleDimError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
