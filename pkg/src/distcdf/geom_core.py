"""
Vector primitives, segment/sphere intersection, projections onto lines and
planes, and the orthonormal reparametrization of a plane in R^3.

Points and vectors are plain float64 numpy arrays of shape (3,).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from distcdf.errors import GeometryError

# Relative tolerance, scaled by scene size where a length is compared.
TOL = 1e-9
# Relative threshold on the quadratic discriminant below which a line is
# treated as tangent to the sphere.
DELTA_TOL = 1e-12


def as_point(p) -> np.ndarray:
    """Coerce a 2- or 3-sequence to a float64 3-vector (z defaults to 0)."""
    a = np.asarray(p, dtype=float).reshape(-1)
    if a.size == 2:
        a = np.array([a[0], a[1], 0.0])
    if a.size != 3:
        raise GeometryError(f"expected a 2D or 3D point, got {a.size} components")
    if not np.all(np.isfinite(a)):
        raise GeometryError(f"non-finite coordinates: {a}")
    return a


def norm(v: np.ndarray) -> float:
    return math.sqrt(float(np.dot(v, v)))


@dataclass(frozen=True, eq=False)
class SegmentSphereResult:
    """Points of a segment at a given distance from a centre, ordered by the
    parameter ``t`` of ``A + t (B - A)``."""
    count: int
    points: tuple[np.ndarray, ...]
    params: tuple[float, ...]


def segment_sphere_intersections(A, B, P, d: float) -> SegmentSphereResult:
    """Intersect segment [A, B] with the sphere of centre P and radius d.

    A discriminant within ``DELTA_TOL * |AB|^2 * max(1, d^2)`` of zero is
    treated as a tangency and yields a single point.

    Raises:
        GeometryError: if A == B.
    """
    A, B, P = as_point(A), as_point(B), as_point(P)
    ab = B - A
    pa = A - P
    a = float(np.dot(ab, ab))
    if a == 0.0:
        raise GeometryError("degenerate segment: A == B")
    b = float(np.dot(pa, ab))
    c = float(np.dot(pa, pa)) - d * d
    delta = b * b - a * c
    tol_delta = DELTA_TOL * a * max(1.0, d * d)
    eps_t = 1e-12

    if delta <= -tol_delta:
        return SegmentSphereResult(0, (), ())
    if delta < tol_delta:
        roots = [-b / a]
    else:
        sq = math.sqrt(delta)
        # stable pairing of the two roots
        q = -(b + math.copysign(sq, b))
        r1, r2 = q / a, c / q if q != 0.0 else -b / a
        roots = sorted((r1, r2))

    ts = []
    for t in roots:
        if -eps_t <= t <= 1.0 + eps_t:
            ts.append(min(max(t, 0.0), 1.0))
    pts = tuple(A + t * ab for t in ts)
    return SegmentSphereResult(len(ts), pts, tuple(ts))


def project_point_to_line(P, A, B) -> tuple[np.ndarray, bool]:
    """Orthogonal projection of P onto line (AB) and whether it lies on [A, B]."""
    P, A, B = as_point(P), as_point(A), as_point(B)
    ab = B - A
    a = float(np.dot(ab, ab))
    if a == 0.0:
        raise GeometryError("degenerate segment: A == B")
    P0 = A + (float(np.dot(ab, P - A)) / a) * ab
    on_segment = float(np.dot(A - P0, B - P0)) <= 0.0
    return P0, on_segment


@dataclass(frozen=True, eq=False)
class PlaneFrame:
    """Orthonormal frame (origin, u, v) of a plane in R^3."""
    origin: np.ndarray
    u: np.ndarray
    v: np.ndarray

    @property
    def normal(self) -> np.ndarray:
        return np.cross(self.u, self.v)

    @classmethod
    def from_normal(cls, origin, normal) -> "PlaneFrame":
        """Frame through ``origin`` orthogonal to ``normal`` (any in-plane basis)."""
        origin = as_point(origin)
        n = as_point(normal)
        nn = norm(n)
        if nn == 0.0:
            raise GeometryError("zero normal vector")
        n = n / nn
        # seed with the coordinate axis least aligned with n
        seed = np.zeros(3)
        seed[int(np.argmin(np.abs(n)))] = 1.0
        u = seed - np.dot(seed, n) * n
        u /= norm(u)
        v = np.cross(n, u)
        return cls(origin, u, v)

    def to_plane(self, x: float, y: float) -> np.ndarray:
        return self.origin + x * self.u + y * self.v

    def coords(self, Q) -> tuple[float, float]:
        w = as_point(Q) - self.origin
        return float(np.dot(w, self.u)), float(np.dot(w, self.v))

    def coords_many(self, Q: np.ndarray) -> np.ndarray:
        w = np.asarray(Q, dtype=float) - self.origin
        return np.column_stack((w @ self.u, w @ self.v))

    def offset(self, Q) -> float:
        """Unsigned distance of Q to the plane."""
        return abs(float(np.dot(as_point(Q) - self.origin, self.normal)))


def build_plane_frame(S1, S2, S3) -> PlaneFrame:
    """Gram-Schmidt frame at S2 with u along S2->S1 and v completing S2->S3.

    Raises:
        GeometryError: if the three points are (numerically) collinear.
    """
    S1, S2, S3 = as_point(S1), as_point(S2), as_point(S3)
    w1 = S1 - S2
    w3 = S3 - S2
    n1, n3 = norm(w1), norm(w3)
    if n1 == 0.0 or n3 == 0.0 or norm(np.cross(w1, w3)) <= TOL * n1 * n3:
        raise GeometryError("collinear points do not define a plane")
    u = w1 / n1
    r = w3 - np.dot(w3, u) * u
    v = r / norm(r)
    return PlaneFrame(S2, u, v)


def project_to_plane(P, frame: PlaneFrame) -> tuple[np.ndarray, tuple[float, float], float]:
    """Project P onto the frame's plane.

    Returns the projected point, its (u, v) coordinates relative to the frame
    origin and the distance from P to the plane. Because (u, v) is
    orthonormal the coordinates are plain dot products.
    """
    P = as_point(P)
    x, y = frame.coords(P)
    P0 = frame.to_plane(x, y)
    return P0, (x, y), frame.offset(P)
