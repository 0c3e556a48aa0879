"""
Reference computations that share no code path with the exact evaluators:
uniform samplers and Monte Carlo CDFs, raster overlap areas, and the
quadratic-time arc selection that tests the midpoint of every arc.

Random streams come from numpy's counter-based Philox generator, so a seed
reproduces the same numbers on every platform.
"""
from __future__ import annotations

import math

import numpy as np

from distcdf.analytic import BallSupport, DiskSupport, SegmentSupport
from distcdf.errors import GeometryError
from distcdf.geom_core import as_point, segment_sphere_intersections
from distcdf.mixture import UnionSupport
from distcdf.polygon import Polygon, PolygonSupport

MAX_TRIES = 10 ** 6
TWO_PI = 2.0 * math.pi


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & (2 ** 64 - 1)))


def points_in_polygon(V: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Even-odd test of many points against one polygon (loop over edges)."""
    x, y = Q[:, 0], Q[:, 1]
    inside = np.zeros(len(Q), dtype=bool)
    n = len(V)
    for i in range(n):
        x0, y0 = V[i]
        x1, y1 = V[(i + 1) % n]
        if y0 == y1:
            continue
        cond = (y0 > y) != (y1 > y)
        xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        inside ^= cond & (x < xc)
    return inside


def boundary_distance(V: np.ndarray, Q: np.ndarray) -> np.ndarray:
    best = np.full(len(Q), np.inf)
    n = len(V)
    for i in range(n):
        a, b = V[i], V[(i + 1) % n]
        ab = b - a
        t = np.clip((Q - a) @ ab / (ab @ ab), 0.0, 1.0)
        best = np.minimum(best, np.hypot(*(Q - a - t[:, None] * ab).T))
    return best


class RejectionStats:
    def __init__(self):
        self.tries = 0
        self.accepted = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.tries if self.tries else float("nan")


def sample_polygon2d(V: np.ndarray, n: int, rng, stats: RejectionStats | None = None) -> np.ndarray:
    """Uniform points in a planar polygon by bounding-box rejection."""
    lo, hi = V.min(axis=0), V.max(axis=0)
    out = []
    got = 0
    dry = 0
    batch = max(1024, n)
    while got < n:
        Q = lo + (hi - lo) * rng.random((batch, 2))
        ok = points_in_polygon(V, Q)
        k = int(ok.sum())
        if stats is not None:
            stats.tries += batch
            stats.accepted += k
        if k == 0:
            dry += batch
            if dry >= MAX_TRIES:
                raise GeometryError("rejection sampler found no point in 1e6 tries")
            continue
        dry = 0
        out.append(Q[ok])
        got += k
    return np.concatenate(out)[:n]


def sample_uniform(support, rng, n: int = 1) -> np.ndarray:
    """n uniform points on ``support``, as an (n, 3) array ((n, 2) for a
    planar :class:`Polygon`)."""
    if isinstance(support, DiskSupport):
        r = support.radius * np.sqrt(rng.random(n))
        th = TWO_PI * rng.random(n)
        f = support.frame
        return support.center + np.outer(r * np.cos(th), f.u) + np.outer(r * np.sin(th), f.v)
    if isinstance(support, BallSupport):
        g = rng.standard_normal((n, 3))
        g /= np.linalg.norm(g, axis=1)[:, None]
        return support.center + support.radius * np.cbrt(rng.random(n))[:, None] * g
    if isinstance(support, SegmentSupport):
        return support.A + rng.random(n)[:, None] * (support.B - support.A)
    if isinstance(support, Polygon):
        return sample_polygon2d(support.vertices, n, rng)
    if isinstance(support, PolygonSupport):
        xy = sample_polygon2d(support.polygon.vertices, n, rng)
        f = support.frame
        return f.origin + np.outer(xy[:, 0], f.u) + np.outer(xy[:, 1], f.v)
    if isinstance(support, UnionSupport):
        k = rng.choice(len(support.components), size=n, p=support.weights)
        out = np.empty((n, 3))
        for j, comp in enumerate(support.components):
            idx = np.nonzero(k == j)[0]
            if idx.size:
                out[idx] = sample_uniform(comp, rng, idx.size)
        return out
    raise TypeError(f"no sampler for {type(support).__name__}")


def sample_distances(P, support, n: int, seed: int) -> np.ndarray:
    X = sample_uniform(support, make_rng(seed), n)
    P = np.asarray(P, dtype=float).reshape(-1)
    if X.shape[1] == 3:
        P = as_point(P)
    return np.linalg.norm(X - P, axis=1)


def mc_cdf(P, support, d, n: int, seed: int):
    """Fraction of n samples within distance d of P and its binomial standard
    error. ``d`` may be an array (all evaluated on one sample)."""
    if n < 1:
        raise ValueError("need n >= 1")
    D = np.sort(sample_distances(P, support, n, seed))
    d_arr = np.atleast_1d(np.asarray(d, dtype=float))
    p = np.searchsorted(D, d_arr, side="right") / n
    se = np.sqrt(p * (1.0 - p) / n)
    if np.ndim(d) == 0:
        return float(p[0]), float(se[0])
    return p, se


def _cell_centers(lo, hi, cell):
    nx = max(int(math.ceil((hi[0] - lo[0]) / cell)), 0)
    ny = max(int(math.ceil((hi[1] - lo[1]) / cell)), 0)
    xs = lo[0] + cell * (np.arange(nx) + 0.5)
    ys = lo[1] + cell * (np.arange(ny) + 0.5)
    return xs, ys


def _snap(lo, cell):
    return np.floor(np.asarray(lo) / cell) * cell


def raster_overlap(poly: Polygon, center, radius: float, cell: float) -> float:
    """Area of poly n disk, counting cell centres inside both (cells aligned
    to a global lattice of spacing ``cell``)."""
    if not cell > 0.0:
        raise ValueError("cell must be positive")
    V = poly.vertices
    c = np.asarray(center, dtype=float).reshape(-1)[:2]
    lo = np.maximum(V.min(axis=0), c - radius)
    hi = np.minimum(V.max(axis=0), c + radius)
    if np.any(hi <= lo):
        return 0.0
    lo = _snap(lo, cell)
    xs, ys = _cell_centers(lo, hi, cell)
    count = 0
    for y in ys:
        row = np.column_stack((xs, np.full_like(xs, y)))
        m = np.hypot(xs - c[0], y - c[1]) <= radius
        if m.any():
            count += int(points_in_polygon(V, row[m]).sum())
    return count * cell * cell


class RasterDistances:
    """Sorted distances from a site to all raster cells inside a polygon;
    answers raster_overlap for many radii at once."""

    def __init__(self, poly: Polygon, center, cell: float):
        V = poly.vertices
        c = np.asarray(center, dtype=float).reshape(-1)[:2]
        lo = _snap(V.min(axis=0), cell)
        xs, ys = _cell_centers(lo, V.max(axis=0), cell)
        dist = []
        for y in ys:
            row = np.column_stack((xs, np.full_like(xs, y)))
            ok = points_in_polygon(V, row)
            dist.append(np.hypot(xs[ok] - c[0], y - c[1]))
        self.distances = np.sort(np.concatenate(dist))
        self.cell = cell

    def overlap(self, radius) -> np.ndarray:
        return np.searchsorted(self.distances, np.asarray(radius), side="right") * self.cell ** 2


# ---------------------------------------------------------------------------
# quadratic-time arc selection

def _canonical_arcs(arcs, tol: float) -> list[tuple[float, float]]:
    """Drop arcs shorter than ``tol``, merge arcs that touch end-to-start
    (also across the angle origin) and express a full circle as (0, 2 pi)."""
    arcs = sorted(((s % TWO_PI, w) for s, w in arcs if w > tol), key=lambda a: a[0])
    if not arcs:
        return []
    merged = [list(arcs[0])]
    for s, w in arcs[1:]:
        end = merged[-1][0] + merged[-1][1]
        if abs(s - end) <= tol:
            merged[-1][1] += w + (s - end)
        else:
            merged.append([s, w])
    if len(merged) > 1:
        last_end = (merged[-1][0] + merged[-1][1]) % TWO_PI
        if abs(last_end - merged[0][0]) <= tol or abs(last_end - merged[0][0] - TWO_PI) <= tol:
            merged[0] = [merged[-1][0], merged[-1][1] + merged[0][1]]
            merged.pop()
    if len(merged) == 1 and merged[0][1] >= TWO_PI - tol:
        return [(0.0, TWO_PI)]
    return [(s % TWO_PI, w) for s, w in merged]


def arcs_agree(a, b, tol: float = 1e-7) -> bool:
    ca, cb = _canonical_arcs(a, tol), _canonical_arcs(b, tol)
    if len(ca) != len(cb):
        return False
    for (s1, w1), (s2, w2) in zip(sorted(ca), sorted(cb)):
        ds = abs(s1 - s2)
        if min(ds, TWO_PI - ds) > tol or abs(w1 - w2) > tol:
            return False
    return True


def midpoint_arc_selection(P, poly: Polygon, d: float, tol: float = 1e-9) -> list[tuple[float, float]]:
    """Arcs of the circle C(P, d) lying in the polygon, as (start angle, sweep).

    Every edge is intersected with the circle; between consecutive
    intersection angles the arc midpoint is classified by the even-odd rule
    (or by lying on the boundary). Adjacent kept arcs are merged.
    """
    P2 = np.asarray(P, dtype=float).reshape(-1)[:2]
    P3 = as_point(P2)
    V = poly.vertices
    n = len(V)
    angles = []
    for i in range(n):
        res = segment_sphere_intersections(V[i], V[(i + 1) % n], P3, d)
        for Q in res.points:
            a = math.atan2(Q[1] - P2[1], Q[0] - P2[0])
            angles.append(a + TWO_PI if a < 0.0 else a)
    scale = max(1.0, d)

    def kept(theta: np.ndarray) -> np.ndarray:
        M = P2 + d * np.column_stack((np.cos(theta), np.sin(theta)))
        return points_in_polygon(V, M) | (boundary_distance(V, M) <= 1e-12 * scale)

    if not angles:
        return [(0.0, TWO_PI)] if kept(np.array([0.0]))[0] else []
    angles = np.sort(np.array(angles))
    uniq = [angles[0]]
    for a in angles[1:]:
        if a - uniq[-1] > tol:
            uniq.append(a)
    if len(uniq) > 1 and uniq[0] + TWO_PI - uniq[-1] <= tol:
        uniq.pop()
    starts = np.array(uniq)
    sweeps = np.diff(np.append(starts, starts[0] + TWO_PI))
    keep = kept(starts + 0.5 * sweeps)
    return _canonical_arcs(zip(starts[keep], sweeps[keep]), tol)


def simulate_thinned_counts(lam: float, p: float, t: float, n_trials: int, seed: int) -> np.ndarray:
    """Counts of kept arrivals when a rate-lam Poisson stream over [0, t] is
    thinned with keep-probability p."""
    rng = make_rng(seed)
    N = rng.poisson(lam * t, size=n_trials)
    return rng.binomial(N, p)
