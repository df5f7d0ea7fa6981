"""Projected-sphere laws and the Beta law of subsystem probabilities.

A uniform point on ``S^{n-1}`` projected onto ``m`` coordinates has a
closed-form density on the unit ball, and its squared radius is
``Beta(m/2, (n-m)/2)``. For a Haar-random pure state on ``C^{d_S} x C^{d_E}``
the outcome probability ``P_k`` is such a squared radius with ``n = 2N`` and
``m = 2 d_E``, so ``P_k ~ Beta(d_E, d_E (d_S - 1))``.

This module also compares that law with the Gaussian of matched mean and
variance, which has unbounded support and overstates the tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dims import SubsystemDims
from .errors import DomainError
from .special_fn import log_beta, reg_incomplete_beta

__all__ = [
    "ProjectionGeometry",
    "BetaLaw",
    "SubsystemDims",
    "TailComparison",
    "PkMoments",
    "projected_density",
    "radial_squared_law",
    "pk_law",
    "pk_moments",
    "pk_density",
    "gaussian_matched_density",
    "tail_comparison",
    "figure1_data",
    "FIGURE_P_MAX",
]

FIGURE_P_MAX = 1.05


@dataclass(frozen=True)
class ProjectionGeometry:
    n: int
    m: int

    def __post_init__(self):
        if not 1 <= self.m < self.n:
            raise DomainError(f"need 1 <= m < n, got n={self.n}, m={self.m}")

    @classmethod
    def for_subsystem(cls, dims: SubsystemDims) -> "ProjectionGeometry":
        return cls(n=2 * dims.N, m=2 * dims.d_E)


@dataclass(frozen=True)
class BetaLaw:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(f"Beta shapes must be positive, got {self}")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        a, b = self.alpha, self.beta
        return a * b / ((a + b) ** 2 * (a + b + 1))

    @property
    def excess_kurtosis(self) -> float:
        a, b = self.alpha, self.beta
        s = a + b
        num = 6.0 * ((a - b) ** 2 * (s + 1) - a * b * (s + 2))
        return num / (a * b * (s + 2) * (s + 3))

    def logpdf(self, p: float) -> float:
        return (_xlogy(self.alpha - 1.0, p) + _xlogy(self.beta - 1.0, 1.0 - p)
                - log_beta(self.alpha, self.beta))

    def pdf(self, p):
        """Density; zero outside ``[0, 1]``. Accepts scalars or arrays."""
        if np.ndim(p) == 0:
            if not 0.0 <= p <= 1.0:
                return 0.0
            return math.exp(self.logpdf(p))
        p = np.asarray(p, dtype=float)
        inside = (p >= 0.0) & (p <= 1.0)
        q = np.where(inside, p, 0.5)
        with np.errstate(divide="ignore"):
            la = 0.0 if self.alpha == 1.0 else (self.alpha - 1.0) * np.log(q)
            lb = 0.0 if self.beta == 1.0 else (self.beta - 1.0) * np.log1p(-q)
        return np.where(inside, np.exp(la + lb - log_beta(self.alpha, self.beta)), 0.0)

    def cdf(self, p):
        return reg_incomplete_beta(p, self.alpha, self.beta)

    def sf(self, p: float) -> float:
        """Upper tail ``P(X > p)``, computed without cancellation."""
        if p <= 0.0:
            return 1.0
        if p >= 1.0:
            return 0.0
        return reg_incomplete_beta(1.0 - p, self.beta, self.alpha)


def _xlogy(c: float, y: float) -> float:
    """``c * ln(y)`` with the convention ``0 * ln(0) = 0``."""
    if c == 0.0:
        return 0.0
    if y == 0.0:
        return -math.inf if c > 0 else math.inf
    return c * math.log(y)


@dataclass(frozen=True)
class TailComparison:
    """Exact and matched-Gaussian densities and upper tails at one point."""

    threshold: float
    exact_density: float
    gaussian_density: float
    exact_tail: float
    gaussian_tail: float

    @property
    def density_ratio(self) -> float:
        """Gaussian over exact density (inf where the exact density vanishes)."""
        if self.exact_density == 0.0:
            return math.inf
        return self.gaussian_density / self.exact_density

    @property
    def tail_ratio(self) -> float:
        if self.exact_tail == 0.0:
            return math.inf
        return self.gaussian_tail / self.exact_tail


@dataclass(frozen=True)
class PkMoments:
    mean: float
    variance: float
    excess_kurtosis: float


def projected_density(geom: ProjectionGeometry, x: Sequence[float]) -> float:
    """Density of the ``m``-dimensional projection of a uniform point on ``S^{n-1}``.

    Zero outside the unit ball. Evaluated in log space.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size != geom.m:
        raise DomainError(f"expected a vector of length {geom.m}, got {x.size}")
    r2 = float(np.dot(x, x))
    if r2 > 1.0:
        return 0.0
    n, m = geom.n, geom.m
    log_norm = (math.lgamma(n / 2) - 0.5 * m * math.log(math.pi)
                - math.lgamma((n - m) / 2))
    expo = (n - m - 2) / 2
    log_body = _xlogy(expo, 1.0 - r2)
    if log_body == math.inf:
        return math.inf
    return math.exp(log_norm + log_body)


def radial_squared_law(geom: ProjectionGeometry) -> BetaLaw:
    """Law of ``|X|^2`` for the projection: ``Beta(m/2, (n-m)/2)``."""
    return BetaLaw(geom.m / 2, (geom.n - geom.m) / 2)


def _require_subsystem(dims: SubsystemDims):
    if dims.d_S < 2:
        raise DomainError(f"need d_S >= 2 for a non-degenerate law, got {dims.d_S}")


def pk_law(dims: SubsystemDims) -> BetaLaw:
    """``P_k ~ Beta(d_E, d_E (d_S - 1))``."""
    _require_subsystem(dims)
    return BetaLaw(float(dims.d_E), float(dims.d_E * (dims.d_S - 1)))


def pk_moments(dims: SubsystemDims) -> PkMoments:
    law = pk_law(dims)
    d_S, N = dims.d_S, dims.N
    return PkMoments(
        mean=1.0 / d_S,
        variance=(d_S - 1) / (d_S ** 2 * (N + 1)),
        excess_kurtosis=law.excess_kurtosis,
    )


def pk_density(dims: SubsystemDims, p):
    """Beta density of ``P_k`` at ``p`` in ``[0, 1]`` (scalar or array)."""
    arr = np.asarray(p, dtype=float)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    return pk_law(dims).pdf(p)


def _matched_normal(dims: SubsystemDims) -> tuple[float, float]:
    _require_subsystem(dims)
    mu = 1.0 / dims.d_S
    sigma = math.sqrt((dims.d_S - 1) / (dims.d_S ** 2 * (dims.N + 1)))
    return mu, sigma


def gaussian_matched_density(dims: SubsystemDims, p: float) -> float:
    """Normal density with the mean and variance of ``P_k``, defined for all real ``p``."""
    mu, sigma = _matched_normal(dims)
    z = (p - mu) / sigma
    return math.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))


def _gaussian_upper_tail(dims: SubsystemDims, p: float) -> float:
    mu, sigma = _matched_normal(dims)
    return 0.5 * math.erfc((p - mu) / (sigma * math.sqrt(2.0)))


def _row(dims: SubsystemDims, law: BetaLaw, p: float) -> TailComparison:
    return TailComparison(
        threshold=p,
        exact_density=law.pdf(p),
        gaussian_density=gaussian_matched_density(dims, p),
        exact_tail=law.sf(p),
        gaussian_tail=_gaussian_upper_tail(dims, p),
    )


def tail_comparison(dims: SubsystemDims, threshold: float) -> TailComparison:
    """Exact Beta vs matched Gaussian at ``threshold``; tails are one-sided ``P(X > t)``."""
    if not 0.0 < threshold <= 1.0:
        raise DomainError(f"threshold must lie in (0, 1], got {threshold!r}")
    return _row(dims, pk_law(dims), float(threshold))


def figure1_data(dims: SubsystemDims, grid_points: int = 211) -> list[TailComparison]:
    """Rows on a uniform grid over ``[0, 1.05]``.

    The grid runs past ``p = 1`` so the Gaussian mass on unphysical values is
    visible; the exact density and tail are zero there.
    """
    if grid_points < 2:
        raise DomainError("grid_points must be at least 2")
    law = pk_law(dims)
    grid = np.linspace(0.0, FIGURE_P_MAX, int(grid_points))
    return [_row(dims, law, float(p)) for p in grid]
