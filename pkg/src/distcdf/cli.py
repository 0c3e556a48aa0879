"""
Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 invalid input (usage,
JSON or schema), 3 geometry error, 4 no solution for the requested
probability.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from distcdf.analytic import BallSupport, DiskSupport, ball_pdf, disk_pdf
from distcdf.errors import DomainError, GeometryError, NoSolutionError
from distcdf.oracle import RasterDistances, mc_cdf
from distcdf.polygon import PolygonSupport
from distcdf.psha import design_pga, hazard_curve
from distcdf.scene import SchemaError, load_hazard, load_scene

EXIT_OK, EXIT_VERIFY, EXIT_SCHEMA, EXIT_GEOMETRY, EXIT_NO_SOLUTION = 0, 1, 2, 3, 4
FIGURE_R1 = (0.0, 0.5, 0.75, 6.0)


def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_table(header: list[str], rows, out: str | None, fmt: str) -> None:
    buf = io.StringIO()
    if fmt == "json":
        json.dump([{k: float(v) for k, v in zip(header, r)} for r in rows], buf, indent=1)
        buf.write("\n")
    else:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def cmd_cdf(args) -> int:
    dist = load_scene(args.scene).distribution
    if args.d is not None:
        ds = np.asarray(args.d, dtype=float)
    else:
        b = dist.bounds()
        ds = np.linspace(b.d_lo, b.d_hi, args.d_grid)
    write_table(["d", "F"], [(d, dist.cdf(d)) for d in ds], args.out, args.format)
    return EXIT_OK


def cmd_pdf(args) -> int:
    dist = load_scene(args.scene).distribution
    d, f, _ = dist.density_table(args.grid)
    write_table(["d", "f"], zip(d, f), args.out, args.format)
    return EXIT_OK


def _a_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError):
        raise SchemaError(f"--a-grid expects lo:hi:n[:log], got {spec!r}") from None
    if not 0.0 < lo < hi or n < 1:
        raise SchemaError("--a-grid needs 0 < lo < hi and n >= 1")
    if len(parts) > 3 and parts[3] == "log":
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def cmd_hazard(args) -> int:
    model = load_hazard(args.model, n_m=args.n_m, n_d=args.n_d)
    rows = hazard_curve(model.query, _a_grid(args.a_grid))
    write_table(["a_star", "lambda_t", "P"], rows, args.out, args.format)
    return EXIT_OK


def cmd_design_pga(args) -> int:
    model = load_hazard(args.model, n_m=args.n_m, n_d=args.n_d)
    res = design_pga(model.query, args.epsilon, args.a_lo, args.a_hi, args.tol)
    write_table(
        ["a_star", "P", "residual"],
        [(res.a_star, res.probability, res.residual)],
        args.out,
        args.format,
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    scene = load_scene(args.scene)
    dist = scene.distribution
    b = dist.bounds()
    ds = b.d_lo + (b.d_hi - b.d_lo) * np.arange(1, args.points + 1) / (args.points + 1)
    exact = dist.cdf_many(ds) - (0.01 if args.tamper else 0.0)
    est, se = mc_cdf(dist.site, dist.support, ds, args.samples, args.seed)
    # binomial error of the estimate, floored so that F in {0, 1} is not a zero-width test
    tol = args.sigmas * np.maximum(se, 1.0 / args.samples)
    checks = [("mc", d, e, m, t) for d, e, m, t in zip(ds, exact, est, tol)]

    s = dist.support
    if isinstance(s, PolygonSupport) and args.raster_cell > 0:
        xy, h, _ = s.site_geometry(dist.site)
        if h == 0.0:
            rd = RasterDistances(s.polygon, xy, args.raster_cell)
            ras = rd.overlap(ds) / s.measure
            checks += [("raster", d, e, r, args.raster_tol) for d, e, r in zip(ds, exact, ras)]

    worst = max(checks, key=lambda c: abs(c[2] - c[3]) / c[4])
    failed = [c for c in checks if abs(c[2] - c[3]) > c[4]]
    for kind, d, e, ref, t in checks:
        status = "ok" if abs(e - ref) <= t else "FAIL"
        print(f"{status:4s} {kind:6s} d={_fmt(d)} exact={_fmt(e)} ref={_fmt(ref)} tol={t:.3g}")
    kind, d, e, ref, t = worst
    print(f"worst: {kind} at d={_fmt(d)}, |exact-ref|={abs(e - ref):.3g} (tol {t:.3g})")
    if failed:
        print(f"verification FAILED: {len(failed)} of {len(checks)} checks out of tolerance", file=sys.stderr)
        return EXIT_VERIFY
    print(f"verification passed: {len(checks)} checks")
    return EXIT_OK


def figure_tables(n: int = 401) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Density tables for a unit disk and a unit ball, site at in-plane
    (or radial) distance R1 from the centre."""
    out = {}
    for R1 in FIGURE_R1:
        P = (R1, 0.0, 0.0)
        for name, sup, pdf in (
            ("disk", DiskSupport.from_normal((0, 0, 0), 1.0), disk_pdf),
            ("ball", BallSupport((0, 0, 0), 1.0), ball_pdf),
        ):
            b = sup.bounds(P)
            d = np.linspace(b.d_lo, b.d_hi, n)
            out[f"{name}_density_R1_{R1:g}"] = (d, np.array([pdf(P, sup, x) for x in d]))
    return out


def cmd_figures(args) -> int:
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, (d, f) in figure_tables(args.points).items():
        write_table(["d", "f"], zip(d, f), str(outdir / f"{name}.csv"), "csv")
        print(outdir / f"{name}.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="distcdf", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def output(sp):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("cdf", help="distance CDF table for a scene")
    sp.add_argument("scene")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--d-grid", type=int, metavar="N", help="N equally spaced distances over the support range")
    g.add_argument("--d", type=float, nargs="+", help="explicit distances")
    output(sp)
    sp.set_defaults(func=cmd_cdf)

    sp = sub.add_parser("pdf", help="distance density table for a scene")
    sp.add_argument("scene")
    sp.add_argument("--grid", type=int, default=1000, metavar="N")
    output(sp)
    sp.set_defaults(func=cmd_pdf)

    for name, func, helptext in (
        ("hazard", cmd_hazard, "hazard curve for a zone model"),
        ("design-pga", cmd_design_pga, "PGA level exceeded with probability epsilon"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("model")
        sp.add_argument("--n-m", type=int, help="magnitude cells (overrides the model file)")
        sp.add_argument("--n-d", type=int, help="distance cells (overrides the model file)")
        output(sp)
        sp.set_defaults(func=func)
        if name == "hazard":
            sp.add_argument("--a-grid", default="0.01:2:50:log", help="lo:hi:n[:log] (default %(default)s)")
        else:
            sp.add_argument("--epsilon", type=float, required=True)
            sp.add_argument("--tol", type=float, default=1e-6)
            sp.add_argument("--a-lo", type=float, default=0.01)
            sp.add_argument("--a-hi", type=float, default=10.0)

    sp = sub.add_parser("verify", help="compare exact CDF with Monte Carlo and raster references")
    sp.add_argument("scene")
    sp.add_argument("--samples", type=int, default=10 ** 6)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--sigmas", type=float, default=4.0)
    sp.add_argument("--raster-cell", type=float, default=2e-3)
    sp.add_argument("--raster-tol", type=float, default=5e-3)
    sp.add_argument("--tamper", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("figures", help="disk and ball density tables for plotting")
    sp.add_argument("--out-dir", default="figures")
    sp.add_argument("--points", type=int, default=401)
    sp.set_defaults(func=cmd_figures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except (GeometryError, DomainError) as e:
        print(f"geometry error: {e}", file=sys.stderr)
        return EXIT_GEOMETRY
    except NoSolutionError as e:
        print(f"no solution: {e}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
