"""Latitude/longitude/depth to Cartesian coordinates on a spherical earth."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from distcdf.errors import DomainError

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class GeodeticPoint:
    """Unsigned angles in degrees plus hemisphere letters; depth below the surface."""
    latitude_deg: float
    hemisphere_ns: str
    longitude_deg: float
    hemisphere_ew: str
    depth: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.latitude_deg <= 90.0:
            raise DomainError(f"latitude must be in [0, 90], got {self.latitude_deg}")
        if not 0.0 <= self.longitude_deg <= 180.0:
            raise DomainError(f"longitude must be in [0, 180], got {self.longitude_deg}")
        if self.hemisphere_ns not in ("N", "S"):
            raise DomainError(f"hemisphere must be N or S, got {self.hemisphere_ns!r}")
        if self.hemisphere_ew not in ("E", "W"):
            raise DomainError(f"hemisphere must be E or W, got {self.hemisphere_ew!r}")
        if not self.depth >= 0.0:
            raise DomainError(f"depth must be >= 0, got {self.depth}")


def geodetic_to_cartesian(g: GeodeticPoint, R: float = EARTH_RADIUS_KM) -> np.ndarray:
    """Earth-centred coordinates: x towards (0N, 0E), z towards the north pole.
    West longitudes flip the sign of y, southern latitudes that of z."""
    if not R > 0.0:
        raise DomainError(f"earth radius must be positive, got {R}")
    if g.depth >= R:
        raise DomainError(f"depth {g.depth} is not below the radius {R}")
    phi = math.radians(g.latitude_deg)
    lam = math.radians(g.longitude_deg)
    r = R - g.depth
    x = r * math.cos(phi) * math.cos(lam)
    y = r * math.cos(phi) * math.sin(lam)
    z = r * math.sin(phi)
    if g.hemisphere_ew == "W":
        y = -y
    if g.hemisphere_ns == "S":
        z = -z
    return np.array([x, y, z])
