"""
Exact distance CDF for a uniform point in a simple planar polygon.

The area of ``S n D(P, d)`` is assembled as a Green line integral
``1/2 * closed-integral(x dy - y dx)`` over its boundary: straight pieces of
polygon edges clipped to the disk, plus the arcs of the circle ``C(P, d)``
that lie inside the polygon. Edge/circle intersections are classified while
walking the boundary once, so that after sorting them by polar angle the arcs
to keep are read off directly. One evaluation costs O(n log n).

All per-edge work is vectorised over the edge list; coordinates are shifted
so that the site sits at the origin before any integral is formed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from distcdf.analytic import DistBounds
from distcdf.errors import GeometryError
from distcdf.geom_core import TOL, DELTA_TOL, PlaneFrame, as_point, build_plane_frame

TWO_PI = 2.0 * math.pi
# Chords shorter than CHORD_TOL * max(1, d) count as tangencies.
CHORD_TOL = 2e-6
ANGLE_TIE = 1e-12


def _as_xy(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(-1)
    if a.size != 2:
        raise GeometryError(f"expected a planar point, got {a.size} components")
    return a


def _signed_area(V: np.ndarray) -> float:
    x, y = V[:, 0], V[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - y * np.roll(x, -1)))


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _self_intersections(V: np.ndarray) -> list[tuple[int, int]]:
    """Pairs of edges (i, j) that touch or cross, other than the shared
    endpoint of consecutive edges. O(n^2), vectorised per edge."""
    n = len(V)
    W = np.roll(V, -1, axis=0)
    bad = []
    # consecutive edges folding back on themselves
    e = W - V
    e_next = np.roll(e, -1, axis=0)
    cross = e[:, 0] * e_next[:, 1] - e[:, 1] * e_next[:, 0]
    dot = np.sum(e * e_next, axis=1)
    for i in np.nonzero((cross == 0.0) & (dot < 0.0))[0]:
        bad.append((int(i), int((i + 1) % n)))
    for i in range(n - 2):
        j = np.arange(i + 2, n)
        if i == 0:
            j = j[j != n - 1]
        if j.size == 0:
            continue
        p1x, p1y, p2x, p2y = V[i, 0], V[i, 1], W[i, 0], W[i, 1]
        q1x, q1y, q2x, q2y = V[j, 0], V[j, 1], W[j, 0], W[j, 1]
        o1 = _orient(p1x, p1y, p2x, p2y, q1x, q1y)
        o2 = _orient(p1x, p1y, p2x, p2y, q2x, q2y)
        o3 = _orient(q1x, q1y, q2x, q2y, p1x, p1y)
        o4 = _orient(q1x, q1y, q2x, q2y, p2x, p2y)
        hit = (o1 * o2 <= 0.0) & (o3 * o4 <= 0.0)
        collinear = (o1 == 0.0) & (o2 == 0.0)
        if np.any(collinear):
            # collinear pairs only meet if their extents overlap
            lo_p, hi_p = min(p1x, p2x), max(p1x, p2x)
            lo_py, hi_py = min(p1y, p2y), max(p1y, p2y)
            overlap = (
                (np.maximum(q1x, q2x) >= lo_p) & (np.minimum(q1x, q2x) <= hi_p)
                & (np.maximum(q1y, q2y) >= lo_py) & (np.minimum(q1y, q2y) <= hi_py)
            )
            hit = np.where(collinear, overlap, hit)
        for k in j[hit]:
            bad.append((i, int(k)))
    return bad


class Polygon:
    """Simple planar polygon, stored counter-clockwise.

    Clockwise input is reversed. ``validate=False`` skips the O(n^2)
    self-intersection check (intended for large, known-good polygons).
    """

    def __init__(self, vertices, validate: bool = True):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2:
            raise GeometryError("polygon vertices must be an (n, 2) array")
        if len(V) < 3:
            raise GeometryError("a polygon needs at least 3 vertices")
        if not np.all(np.isfinite(V)):
            raise GeometryError("non-finite polygon vertex")
        if len(np.unique(V, axis=0)) != len(V):
            raise GeometryError("repeated polygon vertex")
        area = _signed_area(V)
        scale = float(np.ptp(V, axis=0).max())
        if abs(area) <= TOL * scale * scale:
            raise GeometryError("polygon has zero area")
        if area < 0.0:
            V = V[::-1].copy()
            area = -area
        if validate:
            bad = _self_intersections(V)
            if bad:
                raise GeometryError(f"self-intersecting polygon, edges {bad[:5]}")
        V.setflags(write=False)
        self.vertices = V
        self.area = area

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Polygon(n={len(self)}, area={self.area:.6g})"


@dataclass(frozen=True, eq=False)
class PolygonSummary:
    """Area, crossing number and boundary distance range for a site/polygon pair."""
    site: np.ndarray
    n_vertices: int
    area: float
    crossing_number: int
    d_min: float
    d_max: float

    @property
    def contains_site(self) -> bool:
        return self.crossing_number % 2 == 1 or self.d_min == 0.0


@dataclass(frozen=True)
class ArcEvent:
    """Intersection of the polygon boundary with C(P, d).

    ``arc_start`` is True when an arc of the clipped region begins here
    (travelling counter-clockwise around P).
    """
    point: tuple[float, float]
    angle: float
    arc_start: bool


def segment_integral(A, B) -> float:
    """Integral of x dy - y dx along the straight segment A -> B."""
    A, B = _as_xy(A), _as_xy(B)
    return float(B[1] * A[0] - A[1] * B[0])


def polar_angle(point, P) -> float:
    """Polar angle of ``point`` around P, in [0, 2 pi)."""
    point, P = _as_xy(point), _as_xy(P)
    a = math.atan2(point[1] - P[1], point[0] - P[0])
    return a + TWO_PI if a < 0.0 else a


def arc_integral(A, B, P, R0: float) -> float:
    """Integral of x dy - y dx along the counter-clockwise arc A -> B of the
    circle C(P, R0). Equal end angles give a zero sweep."""
    A, B, P = _as_xy(A), _as_xy(B), _as_xy(P)
    tol = TOL * max(1.0, R0)
    for Q in (A, B):
        if abs(math.hypot(Q[0] - P[0], Q[1] - P[1]) - R0) > tol:
            raise GeometryError(f"point {Q} is not on the circle C({P}, {R0})")
    a_A, a_B = polar_angle(A, P), polar_angle(B, P)
    theta = a_B - a_A if a_A <= a_B else TWO_PI + a_B - a_A
    return R0 * R0 * theta + P[0] * (B[1] - A[1]) - P[1] * (B[0] - A[0])


def classify_vertex_on_circle(P, d: float, S_i, S_next, S_after, in_flag: bool) -> bool:
    """Does the vertex ``S_next``, lying on C(P, d), start or end an arc of
    the clipped boundary?

    ``in_flag`` tells whether the incoming edge S_i -> S_next passes through
    the open disk. The vertex matters iff the outgoing edge leaves the disk
    (incoming from inside) or enters it (incoming from outside); both are
    sign tests of ``S_after`` against the tangent line at ``S_next``.
    """
    P, S_next, S_after = _as_xy(P), _as_xy(S_next), _as_xy(S_after)
    xP, yP = (float(c) for c in P)
    x1, y1 = (float(c) for c in S_next)
    x2, y2 = (float(c) for c in S_after)
    if abs(math.hypot(x1 - xP, y1 - yP) - d) > TOL * max(1.0, d):
        raise GeometryError("S_next is not on the circle")

    if yP != y1:
        slope = (xP - x1) / (y1 - yP)
        tangent_at_P = y1 + slope * (xP - x1)
        tangent_at_next = y1 + slope * (x2 - x1)
        if in_flag:
            if yP > tangent_at_P and y2 <= tangent_at_next:
                return True
            if yP < tangent_at_P and y2 >= tangent_at_next:
                return True
            return False
        if yP > tangent_at_P and y2 > tangent_at_next:
            return True
        if yP < tangent_at_P and y2 < tangent_at_next:
            return True
        return False
    # vertical tangent
    if in_flag:
        return (xP < x1 and x2 >= x1) or (xP > x1 and x2 <= x1)
    return (xP < x1 and x2 < x1) or (xP > x1 and x2 > x1)


def polygon_summary(P, poly: Polygon) -> PolygonSummary:
    """Area, crossing number of the rightward ray from P, and the min/max
    distance from P to the polygon boundary."""
    P = _as_xy(P)
    X = poly.vertices - P
    Y = np.roll(X, -1, axis=0)
    x0, y0, x1, y1 = X[:, 0], X[:, 1], Y[:, 0], Y[:, 1]

    area = 0.5 * float(np.sum(y1 * x0 - y0 * x1))
    if area <= 0.0:
        raise GeometryError("polygon has non-positive area")

    # half-open rule: upward edges count their final vertex, downward their start
    straddle = ((y0 < 0.0) & (0.0 <= y1)) | ((y1 < 0.0) & (0.0 <= y0))
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = x0 + (x1 - x0) / (y1 - y0) * (0.0 - y0)
    crossing = int(np.count_nonzero(straddle & (x_cross > 0.0)))

    r = np.hypot(x0, y0)
    e = Y - X
    ee = np.sum(e * e, axis=1)
    t = -np.sum(X * e, axis=1) / ee
    foot = X + t[:, None] * e
    on_edge = np.sum((X - foot) * (Y - foot), axis=1) <= 0.0
    dist_edge = np.where(on_edge, np.hypot(foot[:, 0], foot[:, 1]), np.minimum(r, np.roll(r, -1)))
    return PolygonSummary(
        site=P.copy(),
        n_vertices=len(poly),
        area=area,
        crossing_number=crossing,
        d_min=float(dist_edge.min()),
        d_max=float(r.max()),
    )


def _roots(a, b, delta):
    """Ordered roots of a t^2 + 2 b t + c = 0 given delta = b^2 - a c >= 0."""
    sq = np.sqrt(np.maximum(delta, 0.0))
    q = -(b + np.copysign(sq, b))
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = q / a
        r2 = np.where(q != 0.0, (b * b - delta) / a / np.where(q != 0.0, q, 1.0), r1)
    return np.minimum(r1, r2), np.maximum(r1, r2)


@dataclass(frozen=True, eq=False)
class ArcAssembly:
    """Intermediate products of one CDF evaluation.

    ``ell`` is the accumulated half line integral (the clipped area when
    events exist). ``event_points`` (in site-centred coordinates),
    ``event_angles`` and ``event_flags`` are sorted by angle. ``arcs`` lists
    the kept arcs as (start angle, sweep).
    """
    value: float
    ell: float
    event_points: np.ndarray
    event_angles: np.ndarray
    event_flags: np.ndarray
    arcs: list[tuple[float, float]]

    @property
    def events(self) -> list[ArcEvent]:
        return [
            ArcEvent((float(p[0]), float(p[1])), float(a), bool(f))
            for p, a, f in zip(self.event_points, self.event_angles, self.event_flags)
        ]


def _check_pairing(P: np.ndarray, poly: Polygon, summary: PolygonSummary) -> None:
    if (
        summary.n_vertices != len(poly)
        or not np.array_equal(summary.site, P)
        or abs(summary.area - poly.area) > 1e-9 * poly.area
    ):
        raise GeometryError("summary was computed for a different site or polygon")


def polygon_arc_assembly(P, poly: Polygon, d: float, summary: PolygonSummary | None = None) -> ArcAssembly:
    P = _as_xy(P)
    if summary is None:
        summary = polygon_summary(P, poly)
    else:
        _check_pairing(P, poly, summary)
    area = summary.area
    empty = np.zeros((0, 2))
    if d <= 0.0:
        return ArcAssembly(0.0, 0.0, empty, np.zeros(0), np.zeros(0, bool), [])

    A = poly.vertices - P
    B = np.roll(A, -1, axis=0)
    C = np.roll(A, -2, axis=0)
    r = np.hypot(A[:, 0], A[:, 1])
    tol_on = TOL * max(1.0, d)
    on = np.abs(r - d) <= tol_on
    inside = (r < d) & ~on
    outside = (r > d) & ~on
    on_B, in_B, out_B = np.roll(on, -1), np.roll(inside, -1), np.roll(outside, -1)
    in_or_on_A = inside | on

    ab = B - A
    a = np.sum(ab * ab, axis=1)
    len_ab = np.sqrt(a)
    b = np.sum(A * ab, axis=1)
    c = r * r - d * d
    delta = b * b - a * c
    t_lo, t_hi = _roots(a, b, delta)
    chord_tol = 0.5 * CHORD_TOL * max(1.0, d)

    def cross(U, V):
        return U[:, 0] * V[:, 1] - U[:, 1] * V[:, 0]

    def at(t, mask):
        return A[mask] + t[:, None] * ab[mask]

    half_I = np.zeros(len(A))
    ev_pts, ev_flags = [], []

    # Vertex B on the circle: does the outgoing edge B -> C leave the disk?
    bc = C - B
    s_B = -np.sum(bc * B, axis=1)
    leaves_at_B = s_B <= chord_tol * np.sqrt(np.sum(bc * bc, axis=1))

    # (i) A in the closed disk, B strictly inside
    m = in_or_on_A & in_B
    half_I[m] = 0.5 * cross(A[m], B[m])

    # (ii) A in the closed disk, B outside: exit point other than A
    m_in = inside & out_B
    I = at(np.clip(t_hi[m_in], 0.0, 1.0), m_in)
    half_I[m_in] = 0.5 * cross(A[m_in], I)
    ev_pts.append(I)
    ev_flags.append(np.ones(len(I), bool))
    s_A = -b
    m_on = on & out_B & (s_A > chord_tol * len_ab)
    I = at(np.clip(2.0 * s_A[m_on] / a[m_on], 0.0, 1.0), m_on)
    half_I[m_on] = 0.5 * cross(A[m_on], I)
    ev_pts.append(I)
    ev_flags.append(np.ones(len(I), bool))

    # (iii) A in the closed disk, B on the circle: whole edge, then classify B
    m = in_or_on_A & on_B
    half_I[m] = 0.5 * cross(A[m], B[m])
    starts = m & leaves_at_B
    ev_pts.append(B[starts])
    ev_flags.append(np.ones(int(starts.sum()), bool))

    # (iv) A outside, B strictly inside: single entry point
    m = outside & in_B
    I = at(np.clip(t_lo[m], 0.0, 1.0), m)
    half_I[m] = 0.5 * cross(I, B[m])
    ev_pts.append(I)
    ev_flags.append(np.zeros(len(I), bool))

    # (v) both outside: a proper chord, tangencies ignored
    tol_delta = DELTA_TOL * a * max(1.0, d * d)
    with np.errstate(divide="ignore", invalid="ignore"):
        foot = -b / a
    m = outside & out_B & (delta >= tol_delta) & (foot > 0.0) & (foot < 1.0)
    I1 = at(np.clip(t_lo[m], 0.0, 1.0), m)
    I2 = at(np.clip(t_hi[m], 0.0, 1.0), m)
    half_I[m] = 0.5 * cross(I1, I2)
    ev_pts += [I1, I2]
    ev_flags += [np.zeros(len(I1), bool), np.ones(len(I2), bool)]

    # (vi) A outside, B on the circle
    q = np.sum((A - B) * (-B), axis=1)
    two = outside & on_B & (q > chord_tol * len_ab)
    tau = 2.0 * q[two] / a[two]
    I = B[two] - np.clip(tau, 0.0, 1.0)[:, None] * ab[two]
    half_I[two] = 0.5 * cross(I, B[two])
    ev_pts.append(I)
    ev_flags.append(np.zeros(len(I), bool))
    starts = two & leaves_at_B
    ev_pts.append(B[starts])
    ev_flags.append(np.ones(int(starts.sum()), bool))
    ends = outside & on_B & ~two & ~leaves_at_B
    ev_pts.append(B[ends])
    ev_flags.append(np.zeros(int(ends.sum()), bool))

    ell = float(np.sum(half_I))
    pts = np.concatenate(ev_pts) if ev_pts else empty
    flags = np.concatenate(ev_flags) if ev_flags else np.zeros(0, bool)

    if len(pts) == 0:
        if abs(ell - area) <= 1e-9 * area:
            value = 1.0
            arcs = []
        elif summary.crossing_number % 2 == 1:
            value = math.pi * d * d / area
            arcs = [(0.0, TWO_PI)]
        else:
            value = 0.0
            arcs = []
        return ArcAssembly(min(max(value, 0.0), 1.0), ell, pts, np.zeros(0), flags, arcs)

    ang = np.arctan2(pts[:, 1], pts[:, 0])
    ang = np.where(ang < 0.0, ang + TWO_PI, ang)
    order = np.lexsort((flags, ang))
    ang, flags, pts = ang[order], flags[order], pts[order]
    # angle ties: a closing event goes before an opening one
    swap = np.nonzero((np.diff(ang) <= ANGLE_TIE) & flags[:-1] & ~flags[1:])[0]
    for k in swap:
        flags[[k, k + 1]] = flags[[k + 1, k]]
        pts[[k, k + 1]] = pts[[k + 1, k]]
        ang[[k, k + 1]] = ang[[k + 1, k]]

    nxt = np.roll(ang, -1)
    sweep = nxt - ang
    sweep = np.where(sweep < 0.0, sweep + TWO_PI, sweep)
    kept = flags
    ell += 0.5 * d * d * float(np.sum(sweep[kept]))
    arcs = [(float(s), float(w)) for s, w in zip(ang[kept], sweep[kept])]
    value = min(max(ell / area, 0.0), 1.0)
    return ArcAssembly(value, ell, pts, ang, flags, arcs)


def polygon_cdf_at(P, poly: Polygon, d: float, summary: PolygonSummary | None = None) -> float:
    """P(|X - P| <= d) for X uniform in the polygon, P in its plane."""
    return polygon_arc_assembly(P, poly, d, summary).value


def polygon_cdf(P, poly: Polygon, ds, summary: PolygonSummary | None = None) -> np.ndarray:
    """:func:`polygon_cdf_at` over an array of distances."""
    P = _as_xy(P)
    if summary is None:
        summary = polygon_summary(P, poly)
    return np.array([polygon_arc_assembly(P, poly, float(d), summary).value for d in np.ravel(ds)])


def polygon_density_grid(P, poly: Polygon, N: int, summary: PolygonSummary | None = None):
    """Forward-difference density on ``d_i = d_min + (d_max - d_min) i / N``,
    i = 1..N-1.

    The CDF is seeded at ``pi d_min^2 / area`` for an interior site (the disk
    of radius d_min lies inside the polygon) and at 0 otherwise. Below d_min
    an interior site has the exact density ``2 pi d / area``; that part is
    left to the caller.

    Returns:
        (d, f) arrays of length N - 1.
    """
    if N < 2:
        raise GeometryError(f"grid size must be >= 2, got {N}")
    P = _as_xy(P)
    if summary is None:
        summary = polygon_summary(P, poly)
    lo, hi = summary.d_min, summary.d_max
    d = lo + (hi - lo) * np.arange(1, N) / N
    F = polygon_cdf(P, poly, d, summary)
    F0 = math.pi * lo * lo / summary.area if summary.crossing_number % 2 == 1 else 0.0
    f = N * np.diff(np.concatenate(([F0], F))) / (hi - lo)
    return d, f


# ---------------------------------------------------------------------------
# polygons embedded in R^3

class PolygonSupport:
    """Planar polygon given by 3D vertices (a plane section of a seismic zone).

    The plane frame is built by Gram-Schmidt from the first three vertices
    (or the first non-collinear consecutive triple).
    """

    dimension = 2
    has_pdf = False

    def __init__(self, vertices, validate: bool = True):
        V = np.array([as_point(v) for v in vertices])
        if len(V) < 3:
            raise GeometryError("a polygon needs at least 3 vertices")
        frame = None
        for k in range(len(V)):
            try:
                frame = build_plane_frame(V[k], V[(k + 1) % len(V)], V[(k + 2) % len(V)])
                break
            except GeometryError:
                continue
        if frame is None:
            raise GeometryError("all polygon vertices are collinear")
        diameter = float(np.max(np.linalg.norm(V - V[0], axis=1)))
        dev = np.abs((V - frame.origin) @ frame.normal)
        if dev.max() > 1e-8 * diameter:
            raise GeometryError(
                f"polygon vertices are not coplanar: max deviation {dev.max():.3g} "
                f"(vertex {int(dev.argmax())}), allowed {1e-8 * diameter:.3g}"
            )
        self.vertices3d = V
        self.frame: PlaneFrame = frame
        self.polygon = Polygon(frame.coords_many(V), validate=validate)
        self._cache: tuple | None = None

    @property
    def measure(self) -> float:
        return self.polygon.area

    def site_geometry(self, P) -> tuple[np.ndarray, float, PolygonSummary]:
        """Planar coordinates of the projected site, its distance to the plane,
        and the planar summary. The last site is cached."""
        P = as_point(P)
        if self._cache is not None and np.array_equal(self._cache[0], P):
            return self._cache[1]
        xy = np.array(self.frame.coords(P))
        h = self.frame.offset(P)
        out = (xy, h, polygon_summary(xy, self.polygon))
        self._cache = (P.copy(), out)
        return out

    def bounds(self, P) -> DistBounds:
        _, h, s = self.site_geometry(P)
        lo = h if s.contains_site else math.hypot(s.d_min, h)
        return DistBounds(lo, math.hypot(s.d_max, h))

    def cdf(self, P, d: float) -> float:
        return polygon3d_cdf(P, self, d)

    def pdf(self, P, d: float) -> float:
        raise NotImplementedError("polygon supports only provide density grids")


def polygon3d_cdf(P, support: PolygonSupport, d: float) -> float:
    xy, h, summary = support.site_geometry(P)
    if d <= h:
        return 0.0
    r = math.sqrt((d - h) * (d + h))
    return polygon_cdf_at(xy, support.polygon, r, summary)


def polygon3d_density_grid(P, support: PolygonSupport, N: int):
    """Density grid on ``[d_m, d_M]``, the distances at which the sphere
    around P first meets and last leaves the polygon boundary.

    Returns:
        (d, f) arrays of length N - 1.
    """
    if N < 2:
        raise GeometryError(f"grid size must be >= 2, got {N}")
    xy, h, summary = support.site_geometry(P)
    d_m = math.hypot(summary.d_min, h)
    d_M = math.hypot(summary.d_max, h)
    d = d_m + (d_M - d_m) * np.arange(1, N) / N
    F = np.array([polygon3d_cdf(P, support, float(x)) for x in d])
    lo = summary.d_min
    F0 = math.pi * lo * lo / summary.area if summary.crossing_number % 2 == 1 else 0.0
    f = N * np.diff(np.concatenate(([F0], F))) / (d_M - d_m)
    return d, f
