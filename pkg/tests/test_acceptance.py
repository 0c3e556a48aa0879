"""
Acceptance gate: one test per criterion, each recording a PASS/FAIL line
that is printed in the terminal summary. Run directly with
``python3 tests/test_acceptance.py`` or through pytest.
"""
import csv
import math
import statistics
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import stats
from scipy.optimize import brentq

from distcdf.analytic import (
    BallSupport,
    DiskSupport,
    SegmentSupport,
    cap_sum_density,
    cap_sum_volume,
    lens_sum_area,
    lens_sum_density,
)
from distcdf.cli import FIGURE_R1, main
from distcdf.errors import GeometryError
from distcdf.mixture import DistanceDistribution, UnionSupport
from distcdf.oracle import (
    RasterDistances,
    arcs_agree,
    make_rng,
    mc_cdf,
    midpoint_arc_selection,
    sample_uniform,
    simulate_thinned_counts,
)
from distcdf.polygon import (
    Polygon,
    PolygonSupport,
    polygon_arc_assembly,
    polygon_cdf,
    polygon_cdf_at,
    polygon_summary,
)
from distcdf.psha import (
    Gmpe,
    HazardQuery,
    MagnitudeModel,
    SeismicZone,
    design_pga,
    event_probability,
    poisson_pmf,
    thinned_rate,
    zone_exceedance_p,
)

from conftest import analytic_cases, apply_motion, random_rigid_motion, regular_polygon

SEED = 42


def quantile_points(cdf, lo, hi, k=20):
    """Distances at which the exact CDF equals 1/(k+1), ..., k/(k+1)."""
    out = []
    for q in np.arange(1, k + 1) / (k + 1):
        out.append(brentq(lambda d: cdf(d) - q, lo, hi, xtol=1e-14))
    return np.array(out)


# ---------------------------------------------------------------------------

def test_c01_closed_form_vs_monte_carlo(report):
    t0 = time.perf_counter()
    worst, failures = 0.0, []
    for label, sup, P, _ in analytic_cases():
        b = sup.bounds(P)
        ds = quantile_points(lambda d: sup.cdf(P, d), b.d_lo, b.d_hi)
        F = np.array([sup.cdf(P, d) for d in ds])
        est, se = mc_cdf(P, sup, ds, 10 ** 6, SEED)
        z = np.abs(est - F) / se
        worst = max(worst, z.max())
        if np.any(z > 3):
            failures.append(label)
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 30
    report("criterion 1", ok, f"12 placements x 20 quantiles, max |z| = {worst:.2f}, {elapsed:.1f} s, failing: {failures}")
    assert ok


SPIRAL8 = [(0, 0), (3, 0), (3, 2), (2, 2), (2, 1), (1, 1), (1, 3), (0, 3)]
L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
STAR10 = [
    (math.cos(t) * r, math.sin(t) * r)
    for t, r in zip(np.arange(10) * 2 * math.pi / 10, [1.0, 0.45] * 5)
]
COMB = [(0, 0), (3, 0), (3, 2), (2.5, 2), (2.5, 0.6), (1.8, 0.6), (1.8, 2), (1.2, 2), (1.2, 0.6), (0.5, 0.6), (0.5, 2), (0, 2)]

POLYGON_CONFIGS = [
    ("triangle, site inside", [(0, 0), (2, 0.3), (0.7, 1.9)], (0.8, 0.6)),
    ("rectangle, site outside", [(0, 0), (2, 0), (2, 0.8), (0, 0.8)], (2.6, 1.5)),
    ("regular 12-gon, site inside", regular_polygon(12, 1.0, (0.0, 0.0)), (0.3, -0.2)),
    ("L shape, site in the notch", L_SHAPE, (1.5, 1.5)),
    ("spiral, site outside", SPIRAL8, (2.5, 3.0)),
    ("spiral, site inside", SPIRAL8, (0.5, 2.0)),
    ("square, site on an edge", [(0, 0), (1, 0), (1, 1), (0, 1)], (0.5, 0.0)),
    ("square, site at a vertex", [(0, 0), (1, 0), (1, 1), (0, 1)], (1.0, 1.0)),
    ("L shape, site at the reflex vertex", L_SHAPE, (1.0, 1.0)),
    ("10-point star, site inside", STAR10, (0.1, 0.05)),
    ("comb, site between teeth", COMB, (1.5, 1.5)),
]


def test_c02_polygon_vs_raster_and_mc(report):
    t0 = time.perf_counter()
    worst_raster, worst_z, failures = 0.0, 0.0, []
    for label, V, P in POLYGON_CONFIGS:
        poly = Polygon(V)
        s = polygon_summary(P, poly)
        lo = 0.0 if s.contains_site else s.d_min
        ds = lo + (s.d_max - lo) * np.arange(1, 51) / 51
        F = polygon_cdf(P, poly, ds, s)
        raster = RasterDistances(poly, P, 1e-3).overlap(ds) / poly.area
        err = np.max(np.abs(F - raster))
        dq = quantile_points(lambda d: polygon_cdf_at(P, poly, d, s), lo, s.d_max)
        Fq = polygon_cdf(P, poly, dq, s)
        est, se = mc_cdf(P, poly, dq, 10 ** 6, SEED)
        z = np.max(np.abs(est - Fq) / se)
        worst_raster, worst_z = max(worst_raster, err), max(worst_z, z)
        if err > 5e-3 or z > 3:
            failures.append(label)
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120 and len(POLYGON_CONFIGS) >= 10
    report(
        "criterion 2",
        ok,
        f"{len(POLYGON_CONFIGS)} configurations, max raster gap {worst_raster:.2e}, "
        f"max MC |z| {worst_z:.2f}, {elapsed:.1f} s, failing: {failures}",
    )
    assert ok


def test_c03_degenerate_trichotomy(report):
    cases = []
    for V, P, d_in, d_out in (
        ([(0, 0), (1, 0), (1, 1), (0, 1)], (0.5, 0.5), 0.3, 0.9),
        (regular_polygon(7, 2.0), (0.1, -0.2), 1.2, 2.5),
        (SPIRAL8, (0.5, 1.5), 0.4, 3.5),
    ):
        poly = Polygon(V)
        cases.append(("disk inside", polygon_cdf_at(P, poly, d_in), math.pi * d_in ** 2 / poly.area))
        cases.append(("polygon inside", polygon_cdf_at(P, poly, d_out), 1.0))
        cases.append(("disjoint", polygon_cdf_at((10.0, 10.0), poly, 1.0), 0.0))
    gap = max(abs(a - b) for _, a, b in cases)
    ok = gap <= 1e-12
    report("criterion 3", ok, f"{len(cases)} zero-intersection cases, max deviation {gap:.1e}")
    assert ok


def _clustered_mass(pdf, lo, hi, n=10 ** 4):
    u = 0.5 * (1 - np.cos(np.pi * np.arange(n + 1) / n))
    x = lo + (hi - lo) * u
    mid = 0.5 * (x[1:] + x[:-1])
    return float(np.sum(np.array([pdf(m) for m in mid]) * np.diff(x)))


def test_c04_density_normalisation(report):
    N = 10 ** 4
    masses = {}
    for label, sup, P, _ in analytic_cases():
        b = sup.bounds(P)
        masses[label] = _clustered_mass(lambda d: sup.pdf(P, d), b.d_lo, b.d_hi)
    for label, V, P in (
        ("polygon grid, planar site inside", SPIRAL8, (0.5, 2.0, 0.0)),
        ("polygon grid, planar site outside", SPIRAL8, (2.5, 3.0, 0.0)),
        ("polygon grid, site above interior", L_SHAPE, (0.5, 0.5, 0.7)),
        ("polygon grid, site off plane and outside", L_SHAPE, (1.5, 1.5, -0.4)),
    ):
        sup = PolygonSupport([(x, y, 0.0) for x, y in V])
        dist = DistanceDistribution(P, sup)
        d, f, exact = dist.density_table(N)
        _, h, s = sup.site_geometry(P)
        d_m, d_M = math.hypot(s.d_min, h), math.hypot(s.d_max, h)
        grid = np.sum(f[~exact]) * (d_M - d_m) / N
        prefix = math.pi * s.d_min ** 2 / s.area if s.contains_site else 0.0
        masses[label] = grid + prefix
    worst = max(abs(m - 1.0) for m in masses.values())
    ok = worst <= 1e-3
    report("criterion 4", ok, f"{len(masses)} densities, max |mass - 1| = {worst:.2e}")
    assert ok


def test_c05_pdf_matches_cdf_differences(report):
    worst = 0.0
    count = 0
    for label, sup, P, kinks in analytic_cases():
        b = sup.bounds(P)
        span = b.d_hi - b.d_lo
        step = 1e-6 * span
        cand = b.d_lo + span * np.arange(1, 400) / 400
        pts = [x for x in cand if all(abs(x - k) > 1e-3 * span for k in kinks)]
        pts = np.array(pts)[np.linspace(0, len(pts) - 1, 100).astype(int)]
        for d in pts:
            fd = (sup.cdf(P, d + step) - sup.cdf(P, d - step)) / (2 * step)
            worst = max(worst, abs(fd - sup.pdf(P, d)) / max(1.0, abs(fd)))
            count += 1
    ok = worst <= 1e-4
    report("criterion 5", ok, f"{count} interior points, max scaled |pdf - FD| = {worst:.2e}")
    assert ok


def test_c06_ngon_converges_to_disk(report):
    poly = Polygon(regular_polygon(1000), validate=False)
    disk = DiskSupport.from_normal((0, 0, 0), 1.0)
    s = polygon_summary((2.0, 0.0), poly)
    ds = np.linspace(0.9, 3.1, 1000)
    F = polygon_cdf((2.0, 0.0), poly, ds, s)
    Fd = np.array([disk.cdf((2.0, 0.0, 0.0), d) for d in ds])
    gap = float(np.max(np.abs(F - Fd)))
    ok = gap <= 1e-4
    report("criterion 6", ok, f"max |F_1000gon - F_disk| = {gap:.2e}")
    assert ok


def test_c07_complexity(report):
    ns = [10 ** 3, 10 ** 4, 10 ** 5]
    times = []
    for n in ns:
        poly = Polygon(regular_polygon(n), validate=False)
        d = 0.5 * (1.0 + math.cos(math.pi / n))  # crosses every edge twice
        polygon_cdf_at((0.0, 0.0), poly, d)
        runs = []
        for _ in range(7):
            t0 = time.perf_counter()
            polygon_cdf_at((0.0, 0.0), poly, d)
            runs.append(time.perf_counter() - t0)
        times.append(statistics.median(runs))
    slope = np.polyfit(np.log(ns), np.log(times), 1)[0]
    ok = slope <= 1.25 and times[-1] < 1.0
    report(
        "criterion 7",
        ok,
        "median times " + ", ".join(f"n={n}: {t * 1e3:.2f} ms" for n, t in zip(ns, times)) + f"; log-log slope {slope:.2f}",
    )
    assert ok


def fuzz_cases(count, seed):
    """Star-shaped random polygons with a mix of generic circles, vertices
    snapped onto the circle, circles tangent to an edge, sites at a vertex
    and sites on an edge."""
    rng = make_rng(seed)
    i = 0
    while count > 0:
        i += 1
        n = int(rng.integers(3, 40))
        ang = np.sort(rng.uniform(0, 2 * np.pi, n))
        if np.min(np.diff(np.append(ang, ang[0] + 2 * np.pi))) < 1e-3:
            continue
        r = rng.uniform(0.3, 1.5, n)
        V = np.column_stack((r * np.cos(ang), r * np.sin(ang))) + rng.normal(size=2)
        P = rng.uniform(-2, 2, 2)
        k = int(rng.integers(n))
        A, B = V[k], V[(k + 1) % n]
        mode = i % 5
        if mode == 1:
            d = float(np.hypot(*(V[k] - P)))
        elif mode == 2:
            foot = A + rng.uniform(0.1, 0.9) * (B - A)
            nrm = np.array([-(B - A)[1], (B - A)[0]]) / np.hypot(*(B - A))
            d = rng.uniform(0.1, 1.5)
            P = foot + d * nrm * rng.choice([-1.0, 1.0])
        elif mode == 3:
            P = V[k].copy()
            d = rng.uniform(0.05, 2.5)
        elif mode == 4:
            P = A + rng.uniform(0.2, 0.8) * (B - A)
            d = float(np.hypot(*(V[(k + 2) % n] - P)))
        else:
            d = rng.uniform(0.05, 3.0)
        if d < 1e-3:
            continue
        try:
            poly = Polygon(V)
        except GeometryError:
            continue
        count -= 1
        yield mode, poly, P, d


def test_c08_arc_selection_differential(report):
    total = agree = 0
    by_mode = {}
    for mode, poly, P, d in fuzz_cases(1000, SEED):
        fast = polygon_arc_assembly(P, poly, d).arcs
        slow = midpoint_arc_selection(P, poly, d)
        same = arcs_agree(fast, slow, tol=1e-7)
        total += 1
        agree += same
        by_mode[mode] = by_mode.get(mode, 0) + 1
    ok = total == 1000 and agree == total
    report("criterion 8", ok, f"{agree}/{total} fuzz cases agree (cases per mode {dict(sorted(by_mode.items()))})")
    assert ok


def test_c09_poisson_thinning(report):
    lam, p, t, n = 2.0, 0.5, 3.0, 10 ** 6
    counts = simulate_thinned_counts(lam, p, t, n, SEED)
    rate = thinned_rate(lam, p) * t
    observed = np.bincount(counts, minlength=16)
    pmf = np.array([poisson_pmf(k, rate) for k in range(16)])
    # bins k = 0..11 individually, k >= 12 pooled (expected counts >= 5 per bin)
    obs = np.append(observed[:12], observed[12:].sum())
    exp = n * np.append(pmf[:12], 1.0 - pmf[:12].sum())
    chi2, pval = stats.chisquare(obs, exp)
    worst_k = float(np.max(np.abs(observed[:16] / n - pmf) / np.sqrt(pmf * (1 - pmf) / n)))
    ok = pval > 1e-3
    report("criterion 9", ok, f"chi-square {chi2:.2f} on {len(obs) - 1} dof, p-value {pval:.3f}; max |z| over k=0..15 {worst_k:.2f}")
    assert ok


def test_c10_psha_pipeline(report):
    disk = DiskSupport.from_normal((20.0, 0.0, -10.0), 30.0)
    gr = MagnitudeModel(2.0, 4.0, 8.0)
    zone = SeismicZone(0.2, gr, disk, Gmpe.cornell())
    a = 0.15
    p = zone_exceedance_p(a, (0, 0, 0), zone, 256, 256)

    rng = make_rng(SEED)
    hits, n, chunk = 0, 10 ** 7, 10 ** 6
    for _ in range(n // chunk):
        u = rng.random(chunk)
        m = 4.0 - np.log1p(-u * (1 - math.exp(-8.0))) / 2.0
        D = np.linalg.norm(sample_uniform(disk, rng, chunk), axis=1)
        ln_pga = 0.152 + 0.859 * m - 1.803 * np.log(D + 25.0) + 0.57 * rng.standard_normal(chunk)
        hits += int(np.count_nonzero(ln_pga > math.log(a)))
    est = hits / n
    se = math.sqrt(est * (1 - est) / n)
    z = abs(p - est) / se

    q = HazardQuery((0, 0, 0), 50.0, (zone,), 256, 256)
    curve = [event_probability(x, q) for x in np.geomspace(0.01, 5.0, 100)]
    monotone = bool(np.all(np.diff(curve) <= 0))
    res = design_pga(q, 0.1, tol_a=1e-6)
    resid = abs(event_probability(res.a_star, q) - 0.1)
    ok = z <= 3 and monotone and resid <= 1e-4
    report(
        "criterion 10",
        ok,
        f"p grid {p:.6f} vs MC {est:.6f} (|z| {z:.2f}); curve monotone: {monotone}; "
        f"design PGA {res.a_star:.6f} with |P - eps| {resid:.1e}",
    )
    assert ok


def test_c11_isometry_invariance(report):
    rng = np.random.default_rng(SEED)
    V3 = [(x, y, 0.0) for x, y in SPIRAL8]
    scenes = [
        ("disk", lambda m: DiskSupport.from_boundary_points(*(apply_motion(m, q) for q in ((0, 0, 0), (1.2, 0, 0), (0, 1.2, 0)))), (0.4, 0.3, 0.6)),
        ("ball", lambda m: BallSupport(apply_motion(m, (0.5, 0, 0)), 1.3), (1.4, 0.7, -0.2)),
        ("segment", lambda m: SegmentSupport(apply_motion(m, (0, 0, 0)), apply_motion(m, (2, 1, 0))), (0.8, 1.0, 0.5)),
        ("polygon 3D", lambda m: PolygonSupport([apply_motion(m, v) for v in V3]), (1.5, 2.0, 0.7)),
        ("union of disks", lambda m: UnionSupport((
            DiskSupport.from_boundary_points(*(apply_motion(m, q) for q in ((0, 0, 0), (1, 0, 0), (0, 1, 0)))),
            DiskSupport.from_boundary_points(*(apply_motion(m, q) for q in ((3, 0, 0), (3.5, 0, 0), (3, 0, 1)))),
        )), (1.0, 1.0, 1.0)),
    ]
    identity = (np.eye(3), np.zeros(3))
    # Interior distances only: at a support endpoint where the CDF has an
    # infinite slope (segment, d = h) a rounding-level change of h moves F by
    # about sqrt(h * 1e-16), which is input conditioning, not an algorithmic
    # difference. That endpoint deviation is reported separately.
    worst, worst_endpoint = 0.0, 0.0
    for name, build, P in scenes:
        base = build(identity)
        b = base.bounds(P)
        ds = np.linspace(b.d_lo, b.d_hi, 32)
        inner = ds[1:-1]
        F0 = np.array([base.cdf(P, d) for d in inner])
        has_pdf = getattr(base, "has_pdf", True)
        f0 = np.array([base.pdf(P, d) for d in inner]) if has_pdf else None
        for _ in range(20):
            m = random_rigid_motion(rng)
            moved = build(m)
            Pm = apply_motion(m, P)
            F = np.array([moved.cdf(Pm, d) for d in inner])
            worst = max(worst, float(np.max(np.abs(F - F0))))
            ends = [abs(moved.cdf(Pm, d) - base.cdf(P, d)) for d in (ds[0], ds[-1])]
            worst_endpoint = max(worst_endpoint, *ends)
            if has_pdf:
                f = np.array([moved.pdf(Pm, d) for d in inner])
                worst = max(worst, float(np.max(np.abs(f - f0) / np.maximum(1.0, np.abs(f0)))))
    ok = worst <= 1e-9
    report("criterion 11", ok, f"5 scenes x 20 rigid motions x 30 interior distances, max deviation {worst:.1e} (support endpoints, informational: {worst_endpoint:.1e})")
    assert ok


def test_c12_figure_reproduction(report, tmp_path, capsys):
    assert main(["figures", "--out-dir", str(tmp_path), "--points", "801"]) == 0
    capsys.readouterr()
    problems = []
    R0 = 1.0
    for kind in ("disk", "ball"):
        for R1 in FIGURE_R1:
            path = Path(tmp_path) / f"{kind}_density_R1_{R1:g}.csv"
            with open(path) as fh:
                rows = list(csv.reader(fh))
            if rows[0] != ["d", "f"]:
                problems.append(f"{path.name}: header")
            d, f = np.array([[float(x) for x in r] for r in rows[1:]]).T
            lo, hi = max(R1 - R0, 0.0), R1 + R0
            if abs(d[0] - lo) > 1e-12 or abs(d[-1] - hi) > 1e-12:
                problems.append(f"{path.name}: support [{d[0]}, {d[-1]}]")
            if np.any(f < 0):
                problems.append(f"{path.name}: negative density")
            inner = (d <= R0 - R1) if R1 < R0 else np.zeros(len(d), bool)
            ramp = 2 * d / R0 ** 2 if kind == "disk" else 3 * d ** 2 / R0 ** 3
            if np.any(np.abs(f[inner] - ramp[inner]) > 1e-12):
                problems.append(f"{path.name}: inner ramp")
            if np.any(f[1:-1] <= 0):
                problems.append(f"{path.name}: density vanishes inside the support")
            if R1 == 0:
                if abs(f[-1] - ramp[-1]) > 1e-12:
                    problems.append(f"{path.name}: endpoint value")
                continue
            # branch points: both formulas agree at |R1 - R0| and the density vanishes at R1 + R0
            b = abs(R1 - R0)
            if kind == "disk":
                inner_F, inner_f = (math.pi * b * b, 2 * b) if R1 < R0 else (0.0, 0.0)
                jumps = [
                    abs(lens_sum_area(R0, R1, b) - inner_F),
                    abs(lens_sum_density(R0, R1, b) - inner_f),
                    abs(lens_sum_area(R0, R1, hi) - math.pi),
                    abs(lens_sum_density(R0, R1, hi)),
                ]
            else:
                inner_F, inner_f = (4 * math.pi * b ** 3 / 3, 3 * b * b) if R1 < R0 else (0.0, 0.0)
                jumps = [
                    abs(cap_sum_volume(R0, R1, b) - inner_F),
                    abs(cap_sum_density(R0, R1, b) - inner_f),
                    abs(cap_sum_volume(R0, R1, hi) - 4 * math.pi / 3),
                    abs(cap_sum_density(R0, R1, hi)),
                ]
            if max(jumps) > 1e-9:
                problems.append(f"{path.name}: branch mismatch {max(jumps):.1e}")
    ok = not problems
    report("criterion 12", ok, "8 figure tables (disk and ball, R1 in {0, 0.5, 0.75, 6}); " + ("all checks hold" if ok else "; ".join(problems)))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
