"""
Closed-form distance distributions for uniform points in a disk, a ball or
on a line segment.

For a support S and a site P, ``F(d) = mu(B(P, d) n S) / mu(S)``. Disks and
balls reduce to lens / spherical-cap areas; a site off the disk's plane is
handled through the in-plane radius ``R(d) = sqrt(d^2 - h^2)`` where ``h`` is
the distance from P to the plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from distcdf.errors import DomainError, GeometryError
from distcdf.geom_core import (
    PlaneFrame,
    as_point,
    build_plane_frame,
    norm,
    project_point_to_line,
    project_to_plane,
)


def _opening(R: float, h: float) -> float:
    """arccos((R - h) / R) written as 2 arcsin(sqrt(h / 2R)), which keeps full
    accuracy for small h where the arccos argument is close to 1."""
    return 2.0 * math.asin(math.sqrt(min(max(h / (2.0 * R), 0.0), 1.0)))


def _check_height(R: float, h: float) -> None:
    if R <= 0.0:
        raise DomainError(f"radius must be positive, got {R}")
    if h < 0.0 or h > 2.0 * R:
        raise DomainError(f"height {h} outside [0, {2.0 * R}]")


# ---------------------------------------------------------------------------
# lenses and caps

def lens_area(R: float, h: float) -> float:
    """Area of the circular segment of height h cut from a disk of radius R."""
    _check_height(R, h)
    return _lens(R, h)


def _lens(R: float, h: float) -> float:
    if R <= 0.0:
        return 0.0
    h = min(max(h, 0.0), 2.0 * R)
    if h > R:
        # complement of the smaller lens: avoids arccos near -1
        return math.pi * R * R - _lens(R, 2.0 * R - h)
    c = R - h
    return R * R * _opening(R, h) - c * math.sqrt(h * (2.0 * R - h))


def lens_area_partials(R: float, h: float) -> tuple[float, float]:
    """(dA/dR, dA/dh) of :func:`lens_area`; endpoint values by continuity."""
    _check_height(R, h)
    return _lens_partials(R, h)


def _lens_partials(R: float, h: float) -> tuple[float, float]:
    if R <= 0.0:
        return 0.0, 0.0
    h = min(max(h, 0.0), 2.0 * R)
    s = math.sqrt(max(h * (2.0 * R - h), 0.0))
    return 2.0 * R * _opening(R, h) - 2.0 * s, 2.0 * s


def cap_volume(R: float, h: float) -> float:
    """Volume of the spherical cap of height h in a ball of radius R."""
    _check_height(R, h)
    return _cap(R, h)


def _cap(R: float, h: float) -> float:
    h = min(max(h, 0.0), 2.0 * R)
    return math.pi * h * h * (3.0 * R - h) / 3.0


def cap_volume_partials(R: float, h: float) -> tuple[float, float]:
    """(dV/dR, dV/dh) of :func:`cap_volume`."""
    _check_height(R, h)
    return _cap_partials(R, h)


def _cap_partials(R: float, h: float) -> tuple[float, float]:
    h = min(max(h, 0.0), 2.0 * R)
    return math.pi * h * h, math.pi * h * (2.0 * R - h)


def _heights(R0: float, R1: float, d: float) -> tuple[float, float]:
    """Lens/cap heights (in the radius-d body, in the radius-R0 body) when the
    centres are R1 apart. The chord abscissa is written to avoid cancellation
    when R1 is tiny."""
    x_star = ((R0 - d) * (R0 + d) + R1 * R1) / (2.0 * R1)
    h1 = d - R1 + x_star
    h2 = R0 - x_star
    return min(max(h1, 0.0), 2.0 * d), min(max(h2, 0.0), 2.0 * R0)


def circle_circle_area(R0: float, R1: float, d: float) -> float:
    """Area of D(S0, R0) n D(P, d) with |S0 P| = R1 > 0."""
    if R1 <= 0.0:
        raise DomainError("circle_circle_area needs R1 > 0; use the concentric formula")
    if d <= 0.0:
        return 0.0
    if d >= R1 + R0:
        return math.pi * R0 * R0
    if d <= R1 - R0:
        return 0.0
    if d <= R0 - R1:
        return math.pi * d * d
    return lens_sum_area(R0, R1, d)


def lens_sum_area(R0: float, R1: float, d: float) -> float:
    """Partial-overlap formula: the two lenses cut off by the common chord.
    Valid for |R1 - R0| <= d <= R1 + R0; exposed for branch-point checks."""
    h1, h2 = _heights(R0, R1, d)
    return _lens(d, h1) + _lens(R0, h2)


def _circle_circle_density(R0: float, R1: float, r: float) -> float:
    """d/dr of circle_circle_area(R0, R1, r) / (pi R0^2)."""
    if r <= 0.0 or r >= R1 + R0 or r < R1 - R0:
        return 0.0
    if r <= R0 - R1:
        return 2.0 * r / (R0 * R0)
    return lens_sum_density(R0, R1, r)


def lens_sum_density(R0: float, R1: float, r: float) -> float:
    """Derivative of :func:`lens_sum_area` in r, divided by pi R0^2."""
    h1, h2 = _heights(R0, R1, r)
    dA1_dR, dA1_dh = _lens_partials(r, h1)
    _, dA2_dh = _lens_partials(R0, h2)
    total = (r / R1) * dA2_dh + dA1_dR + (1.0 - r / R1) * dA1_dh
    return max(total, 0.0) / (math.pi * R0 * R0)


@dataclass(frozen=True)
class DistBounds:
    """Smallest and largest distance from the site to the support."""
    d_lo: float
    d_hi: float


# ---------------------------------------------------------------------------
# disk

@dataclass(frozen=True, eq=False)
class DiskSupport:
    center: np.ndarray
    radius: float
    frame: PlaneFrame

    dimension = 2

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0.0:
            raise GeometryError(f"disk radius must be positive, got {self.radius}")

    @classmethod
    def from_normal(cls, center, radius: float, normal=(0.0, 0.0, 1.0)) -> "DiskSupport":
        center = as_point(center)
        return cls(center, float(radius), PlaneFrame.from_normal(center, normal))

    @classmethod
    def from_boundary_points(cls, center, S1, S2) -> "DiskSupport":
        """Disk centred at ``center`` through S1, with S2 a second boundary
        point fixing the plane. The radius is |center S1|."""
        center, S1, S2 = as_point(center), as_point(S1), as_point(S2)
        frame = build_plane_frame(S1, center, S2)
        return cls(center, norm(S1 - center), frame)

    @property
    def measure(self) -> float:
        return math.pi * self.radius ** 2

    def site_geometry(self, P) -> tuple[float, float]:
        """(distance of P to the plane, in-plane distance of its projection to the centre)."""
        _, (x, y), h = project_to_plane(P, self.frame)
        cx, cy = self.frame.coords(self.center)
        return h, math.hypot(x - cx, y - cy)

    def bounds(self, P) -> DistBounds:
        h, R1 = self.site_geometry(P)
        R0 = self.radius
        lo = h if R1 <= R0 else math.hypot(h, R1 - R0)
        return DistBounds(lo, math.hypot(h, R1 + R0))

    def cdf(self, P, d: float) -> float:
        return disk_cdf(P, self, d)

    def pdf(self, P, d: float) -> float:
        return disk_pdf(P, self, d)


def _disk_planar_cdf(R0: float, R1: float, r: float) -> float:
    if r <= 0.0:
        return 0.0
    if R1 == 0.0:
        return min(r / R0, 1.0) ** 2
    return min(max(circle_circle_area(R0, R1, r) / (math.pi * R0 * R0), 0.0), 1.0)


def _disk_planar_pdf(R0: float, R1: float, r: float) -> float:
    if r <= 0.0:
        return 0.0
    if R1 == 0.0:
        return 2.0 * r / (R0 * R0) if r <= R0 else 0.0
    return _circle_circle_density(R0, R1, r)


def disk_cdf(P, disk: DiskSupport, d: float) -> float:
    h, R1 = disk.site_geometry(P)
    if d <= h:
        return 0.0
    r = math.sqrt((d - h) * (d + h))
    return _disk_planar_cdf(disk.radius, R1, r)


def disk_pdf(P, disk: DiskSupport, d: float) -> float:
    h, R1 = disk.site_geometry(P)
    if d <= h:
        return 0.0
    r = d if h == 0.0 else math.sqrt((d - h) * (d + h))
    if r == 0.0:
        # limit of f(r) d / r as r -> 0
        return 2.0 * d / disk.radius ** 2 if R1 < disk.radius else 0.0
    # chain rule through r(d): dr/dd = d / r
    return _disk_planar_pdf(disk.radius, R1, r) * d / r


# ---------------------------------------------------------------------------
# ball

@dataclass(frozen=True, eq=False)
class BallSupport:
    center: np.ndarray
    radius: float

    dimension = 3

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0.0:
            raise GeometryError(f"ball radius must be positive, got {self.radius}")

    @property
    def measure(self) -> float:
        return 4.0 * math.pi * self.radius ** 3 / 3.0

    def bounds(self, P) -> DistBounds:
        R1 = norm(as_point(P) - self.center)
        return DistBounds(max(R1 - self.radius, 0.0), R1 + self.radius)

    def cdf(self, P, d: float) -> float:
        return ball_cdf(P, self, d)

    def pdf(self, P, d: float) -> float:
        return ball_pdf(P, self, d)


def ball_cdf(P, ball: BallSupport, d: float) -> float:
    R0 = ball.radius
    R1 = norm(as_point(P) - ball.center)
    if d <= 0.0:
        return 0.0
    if R1 == 0.0:
        return min(d / R0, 1.0) ** 3
    if d >= R1 + R0:
        return 1.0
    if d <= R1 - R0:
        return 0.0
    if d <= R0 - R1:
        return (d / R0) ** 3
    return min(cap_sum_volume(R0, R1, d) * 3.0 / (4.0 * math.pi * R0 ** 3), 1.0)


def cap_sum_volume(R0: float, R1: float, d: float) -> float:
    """Partial-overlap formula for two balls: the two caps cut off by the
    common plane. Valid for |R1 - R0| <= d <= R1 + R0."""
    h1, h2 = _heights(R0, R1, d)
    return _cap(d, h1) + _cap(R0, h2)


def ball_pdf(P, ball: BallSupport, d: float) -> float:
    R0 = ball.radius
    R1 = norm(as_point(P) - ball.center)
    if d <= 0.0:
        return 0.0
    if R1 == 0.0:
        return 3.0 * d * d / R0 ** 3 if d <= R0 else 0.0
    if d >= R1 + R0 or d < R1 - R0:
        return 0.0
    if d <= R0 - R1:
        return 3.0 * d * d / R0 ** 3
    return cap_sum_density(R0, R1, d)


def cap_sum_density(R0: float, R1: float, d: float) -> float:
    """Derivative of :func:`cap_sum_volume` in d, divided by the ball volume."""
    h1, h2 = _heights(R0, R1, d)
    dV1_dR, dV1_dh = _cap_partials(d, h1)
    _, dV2_dh = _cap_partials(R0, h2)
    total = dV1_dR + (1.0 - d / R1) * dV1_dh + (d / R1) * dV2_dh
    return max(total, 0.0) * 3.0 / (4.0 * math.pi * R0 ** 3)


# ---------------------------------------------------------------------------
# segment

@dataclass(frozen=True, eq=False)
class SegmentSupport:
    A: np.ndarray
    B: np.ndarray

    dimension = 1

    def __post_init__(self):
        object.__setattr__(self, "A", as_point(self.A))
        object.__setattr__(self, "B", as_point(self.B))
        if norm(self.B - self.A) == 0.0:
            raise GeometryError("degenerate segment: A == B")

    @property
    def measure(self) -> float:
        return norm(self.B - self.A)

    def site_geometry(self, P) -> dict:
        P = as_point(P)
        P0, on_segment = project_point_to_line(P, self.A, self.B)
        dA, dB = norm(P - self.A), norm(P - self.B)
        return {
            "h": norm(P - P0),
            "on_segment": on_segment,
            "d_min": min(dA, dB),
            "d_max": max(dA, dB),
            "foot_to_end": min(norm(P0 - self.A), norm(P0 - self.B)),
        }

    def bounds(self, P) -> DistBounds:
        g = self.site_geometry(P)
        lo = g["h"] if g["on_segment"] else g["d_min"]
        return DistBounds(lo, g["d_max"])

    def cdf(self, P, d: float) -> float:
        return segment_cdf(P, self, d)

    def pdf(self, P, d: float) -> float:
        return segment_pdf(P, self, d)


def _half_chord(d: float, h: float) -> float:
    return math.sqrt(max((d - h) * (d + h), 0.0))


def segment_cdf(P, seg: SegmentSupport, d: float) -> float:
    g = seg.site_geometry(P)
    L = seg.measure
    h = g["h"]
    if g["on_segment"]:
        if d < h:
            return 0.0
        if d <= g["d_min"]:
            return min(2.0 * _half_chord(d, h) / L, 1.0)
        if d <= g["d_max"]:
            return min((g["foot_to_end"] + _half_chord(d, h)) / L, 1.0)
        return 1.0
    if d < g["d_min"]:
        return 0.0
    if d <= g["d_max"]:
        F = (_half_chord(d, h) - _half_chord(g["d_min"], h)) / L
        return min(max(F, 0.0), 1.0)
    return 1.0


def segment_pdf(P, seg: SegmentSupport, d: float) -> float:
    """Density of the distance; infinite at d = h when the site is off the
    line but projects onto the segment (integrable singularity)."""
    g = seg.site_geometry(P)
    L = seg.measure
    h = g["h"]
    lo = h if g["on_segment"] else g["d_min"]
    if d < lo or d > g["d_max"]:
        return 0.0
    R = _half_chord(d, h)
    if R == 0.0:
        if h > 0.0:
            return math.inf
        # site on the line: R(d) = d
        return (2.0 if g["on_segment"] and d < g["d_min"] else 1.0) / L
    factor = 2.0 if g["on_segment"] and d < g["d_min"] else 1.0
    return factor * d / (L * R)
