"""
Zone-based probabilistic seismic hazard.

Each zone carries a Poisson occurrence rate, a truncated Gutenberg-Richter
magnitude law, a source geometry and a ground-motion model. The probability
that one event of the zone exceeds a PGA threshold at the site is a double
sum over magnitude and distance cells; independent thinning of the Poisson
streams then gives the rate of exceeding events and the probability of at
least one over the horizon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import erfc

from distcdf.errors import DomainError, NoSolutionError
from distcdf.geom_core import as_point

UNIT_TO_KM = {"km": 1.0, "m": 1e-3}
MIN_GRID = 16


@dataclass(frozen=True)
class MagnitudeModel:
    """Gutenberg-Richter law truncated to [m_min, m_max]."""
    beta: float
    m_min: float
    m_max: float

    def __post_init__(self):
        if not self.beta > 0.0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if not self.m_min < self.m_max:
            raise DomainError(f"need m_min < m_max, got [{self.m_min}, {self.m_max}]")

    def _norm(self) -> float:
        return -math.expm1(-self.beta * (self.m_max - self.m_min))

    def cdf(self, m):
        m = np.clip(np.asarray(m, dtype=float), self.m_min, self.m_max)
        return -np.expm1(-self.beta * (m - self.m_min)) / self._norm()

    def cell_masses(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Midpoints and exact probabilities of n equal magnitude cells."""
        edges = np.linspace(self.m_min, self.m_max, n + 1)
        mass = np.diff(self.cdf(edges))
        return 0.5 * (edges[:-1] + edges[1:]), mass


def gr_pdf(m, model: MagnitudeModel):
    m = np.asarray(m, dtype=float)
    inside = (m >= model.m_min) & (m <= model.m_max)
    f = model.beta * np.exp(-model.beta * (m - model.m_min)) / model._norm()
    out = np.where(inside, f, 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Gmpe:
    """ln PGA = mean(M, D) + sigma(M, D) * eps, eps standard normal, D in km."""
    mean: Callable
    sigma: Callable
    name: str = "custom"
    coeffs: tuple = ()

    @classmethod
    def cornell(cls, coeffs=(0.152, 0.859, -1.803, 25.0, 0.57)) -> "Gmpe":
        c0, c1, c2, c3, s = (float(c) for c in coeffs)
        if not s > 0.0:
            raise DomainError("GMPE sigma must be positive")
        return cls(
            mean=lambda m, D: c0 + c1 * m + c2 * np.log(D + c3),
            sigma=lambda m, D: s + 0.0 * (m + D),
            name="cornell",
            coeffs=(c0, c1, c2, c3, s),
        )

    @classmethod
    def linear(cls, coeffs) -> "Gmpe":
        c0, c1, c2, s = (float(c) for c in coeffs)
        if not s > 0.0:
            raise DomainError("GMPE sigma must be positive")
        return cls(
            mean=lambda m, D: c0 + c1 * m + c2 * D,
            sigma=lambda m, D: s + 0.0 * (m + D),
            name="linear",
            coeffs=(c0, c1, c2, s),
        )


def normal_sf(z):
    """Upper tail of the standard normal, accurate far into both tails."""
    return 0.5 * erfc(np.asarray(z, dtype=float) / math.sqrt(2.0))


def exceed_prob(a_star: float, m, d_epi, gmpe: Gmpe):
    """P(PGA > a_star | M = m, D = d_epi)."""
    if not a_star > 0.0:
        raise DomainError(f"a_star must be positive, got {a_star}")
    mu = np.asarray(gmpe.mean(m, d_epi), dtype=float)
    sd = np.asarray(gmpe.sigma(m, d_epi), dtype=float)
    with np.errstate(invalid="ignore"):
        z = (math.log(a_star) - mu) / sd
    z = np.where(np.isposinf(mu), -np.inf, np.where(np.isneginf(mu), np.inf, z))
    out = normal_sf(z)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class SeismicZone:
    rate: float
    magnitude: MagnitudeModel
    geometry: object
    gmpe: Gmpe
    units: str = "km"

    def __post_init__(self):
        if not self.rate > 0.0:
            raise DomainError(f"zone rate must be positive, got {self.rate}")
        if self.units not in UNIT_TO_KM:
            raise DomainError(f"unknown length unit {self.units!r}")


@dataclass(frozen=True, eq=False)
class ZoneGrid:
    """Discretised (magnitude, distance) law of one zone seen from a site."""
    m_mid: np.ndarray
    m_mass: np.ndarray
    d_mid_km: np.ndarray
    d_mass: np.ndarray


def discretize_zone(site, zone: SeismicZone, n_M: int, n_D: int) -> ZoneGrid:
    """Magnitude cells carry exact GR masses; distance cells carry CDF
    increments ``F(d_{j+1}) - F(d_j)`` over [d_lo, d_hi]."""
    if n_M < MIN_GRID or n_D < MIN_GRID:
        raise DomainError(f"grid sizes must be >= {MIN_GRID}")
    site = as_point(site)
    m_mid, m_mass = zone.magnitude.cell_masses(n_M)
    b = zone.geometry.bounds(site)
    edges = np.linspace(b.d_lo, b.d_hi, n_D + 1)
    F = np.array([zone.geometry.cdf(site, float(x)) for x in edges])
    F[0], F[-1] = 0.0, 1.0
    d_mass = np.diff(F)
    d_mid = 0.5 * (edges[:-1] + edges[1:]) * UNIT_TO_KM[zone.units]
    return ZoneGrid(m_mid, m_mass, d_mid, d_mass)


def grid_exceedance(a_star: float, grid: ZoneGrid, gmpe: Gmpe) -> float:
    P = exceed_prob(a_star, grid.m_mid[:, None], grid.d_mid_km[None, :], gmpe)
    p = float(grid.m_mass @ np.asarray(P) @ grid.d_mass)
    return min(max(p, 0.0), 1.0)


def zone_exceedance_p(a_star: float, site, zone: SeismicZone, n_M: int = 256, n_D: int = 256) -> float:
    """Probability that a single event of ``zone`` produces PGA > a_star at ``site``."""
    return grid_exceedance(a_star, discretize_zone(site, zone, n_M, n_D), zone.gmpe)


@dataclass(frozen=True, eq=False)
class HazardQuery:
    site: np.ndarray
    horizon: float
    zones: tuple
    n_M: int = 256
    n_D: int = 256
    _grids: list = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "site", as_point(self.site))
        object.__setattr__(self, "zones", tuple(self.zones))
        if not self.zones:
            raise DomainError("a hazard query needs at least one zone")
        if not self.horizon > 0.0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if self.n_M < MIN_GRID or self.n_D < MIN_GRID:
            raise DomainError(f"grid sizes must be >= {MIN_GRID}")

    def grids(self) -> list[ZoneGrid]:
        # distance CDFs are the expensive part; compute them once per query
        if not self._grids:
            self._grids.extend(discretize_zone(self.site, z, self.n_M, self.n_D) for z in self.zones)
        return self._grids

    def exceedance(self, a_star: float) -> list[float]:
        return [grid_exceedance(a_star, g, z.gmpe) for g, z in zip(self.grids(), self.zones)]

    @property
    def total_rate(self) -> float:
        return math.fsum(z.rate for z in self.zones)


def aggregate_rate(a_star: float, query: HazardQuery) -> float:
    """Mean number of events exceeding a_star at the site over the horizon."""
    p = query.exceedance(a_star)
    return math.fsum(z.rate * pi for z, pi in zip(query.zones, p)) * query.horizon


def event_probability(a_star: float, query: HazardQuery) -> float:
    return -math.expm1(-aggregate_rate(a_star, query))


def hazard_curve(query: HazardQuery, a_values) -> list[tuple[float, float, float]]:
    rows = []
    for a in np.ravel(a_values):
        lam = aggregate_rate(float(a), query)
        rows.append((float(a), lam, -math.expm1(-lam)))
    return rows


@dataclass(frozen=True)
class DesignPga:
    a_star: float
    probability: float
    residual: float
    iterations: int


def design_pga(
    query: HazardQuery,
    epsilon: float,
    a_lo: float = 0.01,
    a_hi: float = 10.0,
    tol_a: float = 1e-6,
) -> DesignPga:
    """PGA level whose exceedance probability over the horizon is ``epsilon``,
    by bisection (the probability decreases with the level)."""
    p_max = -math.expm1(-query.total_rate * query.horizon)
    attainable = (0.0, p_max)
    if not 0.0 < epsilon < p_max:
        raise NoSolutionError(
            f"epsilon={epsilon} is outside the attainable range (0, {p_max:.6g})", attainable
        )
    if not 0.0 < a_lo < a_hi:
        raise DomainError("need 0 < a_lo < a_hi")

    def P(a):
        return event_probability(a, query)

    for _ in range(60):
        if P(a_lo) >= epsilon:
            break
        a_lo /= 2.0
    else:
        raise NoSolutionError(f"could not bracket epsilon={epsilon} from below", attainable)
    for _ in range(60):
        if P(a_hi) <= epsilon:
            break
        a_hi *= 2.0
    else:
        raise NoSolutionError(f"could not bracket epsilon={epsilon} from above", attainable)

    it = 0
    while a_hi - a_lo > tol_a:
        mid = 0.5 * (a_lo + a_hi)
        if P(mid) >= epsilon:
            a_lo = mid
        else:
            a_hi = mid
        it += 1
    a = 0.5 * (a_lo + a_hi)
    p = P(a)
    return DesignPga(a, p, abs(p - epsilon), it)


def poisson_pmf(k: int, rate: float) -> float:
    if k < 0 or rate < 0.0 or int(k) != k:
        raise DomainError(f"poisson_pmf needs integer k >= 0 and rate >= 0, got k={k}, rate={rate}")
    k = int(k)
    if rate == 0.0:
        return 1.0 if k == 0 else 0.0
    if k > 20:
        return math.exp(k * math.log(rate) - rate - math.lgamma(k + 1))
    return math.exp(-rate) * rate ** k / math.factorial(k)


def thinned_rate(lam: float, p: float) -> float:
    """Rate of a Poisson stream after keeping each arrival with probability p."""
    if lam < 0.0 or not 0.0 <= p <= 1.0:
        raise DomainError(f"need lam >= 0 and p in [0, 1], got {lam}, {p}")
    return lam * p
