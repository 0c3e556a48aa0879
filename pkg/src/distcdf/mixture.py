"""
Distance distribution over a disjoint union of supports, and a small
site-bound wrapper used by the CLI and the hazard code.

Disjoint components add their measures, so the union CDF is the
measure-weighted mixture of the component CDFs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from distcdf.analytic import DistBounds
from distcdf.errors import GeometryError
from distcdf.geom_core import as_point
from distcdf.polygon import PolygonSupport, polygon3d_density_grid


@dataclass(frozen=True, eq=False)
class UnionSupport:
    """Pairwise-disjoint supports of one common dimension (disjointness is
    the caller's responsibility)."""
    components: tuple
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise GeometryError("a union needs at least one component")
        dims = {c.dimension for c in comps}
        if len(dims) != 1:
            raise GeometryError(
                f"union mixes dimensions {sorted(dims)}; a uniform law on such a set is ill-defined"
            )
        mu = [c.measure for c in comps]
        total = math.fsum(mu)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "weights", np.array([m / total for m in mu]))

    @property
    def dimension(self) -> int:
        return self.components[0].dimension

    @property
    def measure(self) -> float:
        return math.fsum(c.measure for c in self.components)

    @property
    def has_pdf(self) -> bool:
        return all(getattr(c, "has_pdf", True) for c in self.components)

    def bounds(self, P) -> DistBounds:
        bs = [c.bounds(P) for c in self.components]
        return DistBounds(min(b.d_lo for b in bs), max(b.d_hi for b in bs))

    def cdf(self, P, d: float) -> float:
        return union_cdf(P, self, d)

    def pdf(self, P, d: float) -> float:
        return union_pdf(P, self, d)


def union_cdf(P, u: UnionSupport, d: float) -> float:
    # fsum is exact-rounded, so the result does not depend on component order
    return min(math.fsum(w * c.cdf(P, d) for w, c in zip(u.weights, u.components)), 1.0)


def union_pdf(P, u: UnionSupport, d: float) -> float:
    if not u.has_pdf:
        raise NotImplementedError("unions containing polygons only provide density grids")
    return math.fsum(w * c.pdf(P, d) for w, c in zip(u.weights, u.components))


@dataclass(frozen=True, eq=False)
class DistanceDistribution:
    """Law of ``|X - P|`` for X uniform on ``support``."""
    site: np.ndarray
    support: object

    def __post_init__(self):
        object.__setattr__(self, "site", as_point(self.site))

    @property
    def has_pdf(self) -> bool:
        return getattr(self.support, "has_pdf", True)

    def bounds(self) -> DistBounds:
        return self.support.bounds(self.site)

    def cdf(self, d: float) -> float:
        return float(self.support.cdf(self.site, float(d)))

    def pdf(self, d: float) -> float:
        return float(self.support.pdf(self.site, float(d)))

    def cdf_many(self, ds) -> np.ndarray:
        return np.array([self.cdf(d) for d in np.ravel(ds)])

    def density_grid(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """Forward-difference density on N - 1 interior points of the
        distance range, ``N (F(d_i) - F(d_{i-1})) / (d_hi - d_lo)``."""
        if N < 2:
            raise GeometryError(f"grid size must be >= 2, got {N}")
        b = self.bounds()
        d = b.d_lo + (b.d_hi - b.d_lo) * np.arange(0, N) / N
        F = self.cdf_many(d)
        return d[1:], N * np.diff(F) / (b.d_hi - b.d_lo)

    def density_table(self, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Density rows for output: exact pdf values on N points for the
        closed-form supports; for a polygon, the exact ``2 pi d / area``
        prefix (when the site projects inside) followed by the
        forward-difference grid.

        Returns:
            (d, f, exact) where ``exact`` flags closed-form rows.
        """
        s = self.support
        if isinstance(s, PolygonSupport):
            _, h, summary = s.site_geometry(self.site)
            d, f = polygon3d_density_grid(self.site, s, N)
            exact = np.zeros(len(d), dtype=bool)
            if summary.contains_site and summary.d_min > 0.0:
                d_m = math.hypot(summary.d_min, h)
                dp = h + (d_m - h) * np.arange(0, N) / N
                fp = 2.0 * math.pi * dp / summary.area
                d = np.concatenate((dp, d))
                f = np.concatenate((fp, f))
                exact = np.concatenate((np.ones(N, dtype=bool), exact))
            return d, f, exact
        if not self.has_pdf:
            d, f = self.density_grid(N)
            return d, f, np.zeros(len(d), dtype=bool)
        b = self.bounds()
        d = np.linspace(b.d_lo, b.d_hi, N)
        f = np.array([self.pdf(x) for x in d])
        return d, f, np.ones(N, dtype=bool)
