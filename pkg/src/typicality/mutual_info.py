"""Typical mutual information ``<I(A:B)>`` of a Haar-random tripartite pure state.

Three equivalent routes are provided:

* exact harmonic-number form (any dimensions; the Page arguments are ordered
  per subsystem, so it is also correct when ``d_A d_B > d_E``);
* the asymptotic ``1/N`` series whose ``k``-th term carries
  ``B_2k (d_A^2k - 1)(d_B^2k - 1)``, in Bernoulli and in ``zeta(1 - 2k)`` form;
* the closed form ``(d_A^2 - 1)(d_B^2 - 1) [1/(2N) - 2 J]`` with ``J`` a
  Bose-Einstein weighted integral, evaluated on the half line or folded onto
  ``[0, sqrt(d_A d_B)]``.

The last two only hold for ``d_A d_B <= d_E`` and raise :class:`RegimeError`
otherwise. All values are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .dims import TripartiteDims
from .errors import DomainError, RegimeError
from .quad import QuadConfig, QuadResult, integrate_decaying, integrate_finite
from .special_fn import (bernoulli_even_unbounded, harmonic_diff, harmonic_exact,
                         zeta_negative_odd)

__all__ = [
    "TripartiteDims",
    "MIDecomposition",
    "SeriesEvaluation",
    "RationalDelta",
    "PartialFractionCheck",
    "mi_exact",
    "mi_exact_rational",
    "mi_naive_factorized",
    "mi_leading",
    "mi_bernoulli_series",
    "mi_zeta_series",
    "optimal_truncation",
    "collapse_identity",
    "rational_delta",
    "mi_closed_form",
    "bose_einstein_J",
    "bose_einstein_J_folded",
    "folded_integrand",
    "log_folded_integrand",
    "partial_fraction_check",
    "factor_G",
    "DEFAULT_TOL",
    "MAX_SERIES_TERMS",
]

DEFAULT_TOL = 1e-12
MAX_SERIES_TERMS = 64


@dataclass(frozen=True)
class MIDecomposition:
    """Exact ``<I(A:B)>`` split into its diagonal (Shannon) part and the eigenvalue correction.

    ``coherence_term`` and ``cartan_term`` are the two rational pieces
    ``(d_A^2-1)(d_B^2-1)/(2N)`` and ``(d_A-1)(d_B-1)/(2N)``; their difference
    equals ``eigenvalue_correction`` only in the page regime.
    """

    diagonal_mi: float
    eigenvalue_correction: float
    total: float
    coherence_term: float
    cartan_term: float
    page_regime: bool


@dataclass(frozen=True)
class SeriesEvaluation:
    order_k: int
    value: float
    leading: float
    terms: tuple[float, ...]
    truncation_estimate: float
    coefficients: tuple[Fraction, ...] = field(repr=False)
    exact_terms: tuple[Fraction, ...] = field(repr=False)
    exact_value: Fraction = field(repr=False)
    exact_next_term: Fraction = field(repr=False)


@dataclass(frozen=True)
class RationalDelta:
    assembled: Fraction
    coherence: Fraction
    cartan: Fraction


@dataclass(frozen=True)
class PartialFractionCheck:
    lhs: float
    rhs: float


def _ordered(d_A: int, d_B: int) -> tuple[int, int]:
    return (d_A, d_B) if d_A <= d_B else (d_B, d_A)


def _require_page_regime(dims: TripartiteDims, what: str):
    if not dims.page_regime:
        raise RegimeError(
            f"{what} requires d_A*d_B <= d_E; got d_A={dims.d_A}, "
            f"d_B={dims.d_B}, d_E={dims.d_E}")


def _diagonal_mi(a: int, b: int, N: int) -> float:
    # (H_N - H_{N/a}) - (H_{N/b} - H_{N/ab}); each bracket is an exactly rounded sum
    return harmonic_diff(N // a, N) - harmonic_diff(N // (a * b), N // b)


def _eigen_gap(d_sub: int, N: int) -> float:
    """``<S_vN> - <S_diag>`` for one subsystem of dimension ``d_sub`` inside ``N``."""
    d_env = N // d_sub
    if d_sub <= d_env:
        return -(d_sub - 1) / (2 * d_env)
    # The spectrum is the environment's: psi(d_env+1) -> psi(d_sub+1) in the bracket.
    return -harmonic_diff(d_env, d_sub) - (d_env - 1) / (2 * d_sub)


def _coherence_cartan(a: int, b: int, N: int) -> tuple[float, float]:
    return ((a * a - 1) * (b * b - 1) / (2 * N),
            (a - 1) * (b - 1) / (2 * N))


def mi_exact(dims: TripartiteDims) -> MIDecomposition:
    """Exact average ``S(A) + S(B) - S(AB)`` for every ordering of the dimensions.

    The diagonal part is always ``H_N - H_{N/d_A} - H_{N/d_B} + H_{N/(d_A d_B)}``.
    In the page regime the eigenvalue correction is the rational
    ``[(d_A^2-1)(d_B^2-1) - (d_A-1)(d_B-1)]/(2N)``; outside it the ``S(AB)``
    (and, if needed, ``S(A)`` or ``S(B)``) term uses the environment-sized
    spectrum.
    """
    a, b = _ordered(dims.d_A, dims.d_B)
    N = dims.N
    diag = _diagonal_mi(a, b, N)
    coherence, cartan = _coherence_cartan(a, b, N)
    if dims.page_regime:
        corr = coherence - cartan
    else:
        corr = math.fsum([_eigen_gap(a, N), _eigen_gap(b, N), -_eigen_gap(a * b, N)])
    return MIDecomposition(diag, corr, diag + corr, coherence, cartan,
                           dims.page_regime)


def _page_rational(d_sub: int, N: int) -> Fraction:
    d_env = N // d_sub
    small, large = min(d_sub, d_env), max(d_sub, d_env)
    return harmonic_exact(N) - harmonic_exact(large) - Fraction(small - 1, 2 * large)


def mi_exact_rational(dims: TripartiteDims) -> Fraction:
    """``<I(A:B)>`` as an exact rational number (slow for large ``N``)."""
    N = dims.N
    return (_page_rational(dims.d_A, N) + _page_rational(dims.d_B, N)
            - _page_rational(dims.d_A * dims.d_B, N))


def mi_naive_factorized(dims: TripartiteDims) -> float:
    """Harmonic form plus the unswapped rational correction, in every regime.

    Equals :func:`mi_exact` in the page regime and is wrong outside it; it is
    kept to measure that discrepancy.
    """
    a, b = _ordered(dims.d_A, dims.d_B)
    delta = rational_delta(a, b, dims.N)
    return _diagonal_mi(a, b, dims.N) + float(delta.assembled)


def mi_leading(dims: TripartiteDims) -> float:
    """Leading term ``(d_A^2 - 1)(d_B^2 - 1)/(2N)``."""
    _require_page_regime(dims, "mi_leading")
    return (dims.d_A ** 2 - 1) * (dims.d_B ** 2 - 1) / (2 * dims.N)


def _series(dims: TripartiteDims, k_terms: int,
            coefficients: Callable[[int], list[Fraction]]) -> SeriesEvaluation:
    _require_page_regime(dims, "the 1/N series")
    if isinstance(k_terms, bool) or int(k_terms) != k_terms or not 0 <= k_terms <= MAX_SERIES_TERMS:
        raise DomainError(f"k_terms must be an integer in [0, {MAX_SERIES_TERMS}]")
    k_terms = int(k_terms)
    a, b, N = dims.d_A, dims.d_B, dims.N
    coefs = coefficients(k_terms + 1)
    exact = []
    for k, coef in enumerate(coefs, start=1):
        dim_factor = (a ** (2 * k) - 1) * (b ** (2 * k) - 1)
        exact.append(coef * dim_factor / N ** (2 * k))
    leading = Fraction((a * a - 1) * (b * b - 1), 2 * N)
    kept = exact[:k_terms]
    total = leading + sum(kept, Fraction(0))
    return SeriesEvaluation(
        order_k=k_terms,
        value=float(total),
        leading=float(leading),
        terms=tuple(float(t) for t in kept),
        truncation_estimate=abs(float(exact[k_terms])),
        coefficients=tuple(coefs[:k_terms]),
        exact_terms=tuple(kept),
        exact_value=total,
        exact_next_term=exact[k_terms],
    )


def _bernoulli_coefficients(k_max: int, bernoulli=None) -> list[Fraction]:
    table = (bernoulli or bernoulli_even_unbounded)(k_max)
    return [-b2k / (2 * k) for k, b2k in enumerate(table, start=1)]


def _zeta_coefficients(k_max: int) -> list[Fraction]:
    return [zeta_negative_odd(k) for k in range(1, k_max + 1)]


def mi_bernoulli_series(dims: TripartiteDims, k_terms: int,
                        bernoulli: Callable[[int], list[Fraction]] | None = None) -> SeriesEvaluation:
    """Leading term minus ``sum_k B_2k/(2k N^2k) (d_A^2k - 1)(d_B^2k - 1)`` for ``k <= k_terms``.

    Terms are exact rationals; each is rounded to float once. ``bernoulli``
    replaces the ``[B_2, ..., B_2k]`` provider (used for negative controls).
    """
    return _series(dims, k_terms, lambda k: _bernoulli_coefficients(k, bernoulli))


def mi_zeta_series(dims: TripartiteDims, k_terms: int) -> SeriesEvaluation:
    """Same series written with ``zeta(1 - 2k)`` coefficients."""
    return _series(dims, k_terms, _zeta_coefficients)


def optimal_truncation(dims: TripartiteDims, k_cap: int = MAX_SERIES_TERMS,
                       bernoulli: Callable[[int], list[Fraction]] | None = None) -> SeriesEvaluation:
    """Series truncated at its smallest term (searched over ``1..k_cap``)."""
    full = mi_bernoulli_series(dims, k_cap, bernoulli)
    mags = [abs(t) for t in full.exact_terms]
    k_star = 1 + min(range(len(mags)), key=mags.__getitem__)
    return mi_bernoulli_series(dims, k_star, bernoulli)


def collapse_identity(d_A: int, d_B: int, k: int) -> int:
    """``(d_A^2k - 1) + (d_B^2k - 1) - (d_A^2k d_B^2k - 1)``, which is ``-(d_A^2k - 1)(d_B^2k - 1)``."""
    if k < 1:
        raise DomainError("k must be at least 1")
    x, y = d_A ** (2 * k), d_B ** (2 * k)
    return (x - 1) + (y - 1) - (x * y - 1)


def rational_delta(d_A: int, d_B: int, N: int) -> RationalDelta:
    """The three Page corrections combined, and the two-term form they reduce to."""
    if N % (d_A * d_B):
        raise DomainError(f"d_A*d_B={d_A * d_B} does not divide N={N}")
    two_n = 2 * N
    assembled = (Fraction(-d_A * (d_A - 1), two_n) - Fraction(d_B * (d_B - 1), two_n)
                 + Fraction(d_A * d_B * (d_A * d_B - 1), two_n))
    coherence = Fraction((d_A ** 2 - 1) * (d_B ** 2 - 1), two_n)
    cartan = Fraction((d_A - 1) * (d_B - 1), two_n)
    return RationalDelta(assembled, coherence, cartan)


def _rational_part(a: int, b: int):
    a2, b2, c2 = float(a * a), float(b * b), float(a * b) ** 2

    def r(u):
        u2 = u * u
        return u * (c2 - u2 * u2) / ((u2 + 1.0) * (u2 + a2) * (u2 + b2) * (u2 + c2))

    return r


def _kernel(d_E: int):
    rate = 2.0 * math.pi * d_E

    def f(x):
        with np.errstate(over="ignore"):
            return 1.0 / np.expm1(rate * x)

    return f


def _semi_infinite_integrand(dims: TripartiteDims):
    a, b = _ordered(dims.d_A, dims.d_B)
    r, f = _rational_part(a, b), _kernel(dims.d_E)
    return lambda u: r(u) * f(u)


def folded_integrand(dims: TripartiteDims) -> Callable[[np.ndarray], np.ndarray]:
    """``R(u) [f(u) - f(C/u)]`` on ``(0, sqrt(C))`` with ``C = d_A d_B``; positive there."""
    a, b = _ordered(dims.d_A, dims.d_B)
    c = float(a * b)
    r, f = _rational_part(a, b), _kernel(dims.d_E)
    return lambda u: r(u) * (f(u) - f(c / u))


def log_folded_integrand(dims: TripartiteDims) -> Callable[[np.ndarray], np.ndarray]:
    """Natural log of :func:`folded_integrand`, finite wherever the integrand is positive.

    The folded integrand underflows to 0.0 near ``sqrt(C)`` when ``d_E`` is
    large; this form keeps its sign information.
    """
    a, b = _ordered(dims.d_A, dims.d_B)
    c = float(a * b)
    rate = 2.0 * math.pi * dims.d_E
    r = _rational_part(a, b)

    def log_kernel(x):
        # -ln(e^{rx} - 1) = -rx - ln(1 - e^{-rx})
        return -rate * x - np.log(-np.expm1(-rate * x))

    def g(u):
        u = np.asarray(u, dtype=float)
        lu, lv = log_kernel(u), log_kernel(c / u)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(r(u)) + lu + np.log(-np.expm1(lv - lu))

    return g


def bose_einstein_J(dims: TripartiteDims, tol: float = DEFAULT_TOL) -> QuadResult:
    """``J`` on the half line ``[0, inf)``, cut where the kernel tail is negligible."""
    _require_page_regime(dims, "bose_einstein_J")
    rate = 2.0 * math.pi * dims.d_E
    # |R| <= 1 everywhere and 1/(e^x - 1) <= 2 e^{-x} for x >= ln 2
    return integrate_decaying(_semi_infinite_integrand(dims), 0.0, rate,
                              QuadConfig(abs_tol=tol), scale=2.0,
                              onset=math.log(2.0) / rate)


def bose_einstein_J_folded(dims: TripartiteDims, tol: float = DEFAULT_TOL) -> QuadResult:
    """``J`` folded onto the finite interval ``[0, sqrt(d_A d_B)]``."""
    _require_page_regime(dims, "bose_einstein_J_folded")
    upper = math.sqrt(dims.d_A * dims.d_B)
    return integrate_finite(folded_integrand(dims), 0.0, upper, QuadConfig(abs_tol=tol))


def _prefactor(dims: TripartiteDims) -> int:
    return (dims.d_A ** 2 - 1) * (dims.d_B ** 2 - 1)


def mi_closed_form(dims: TripartiteDims, tol: float = DEFAULT_TOL) -> QuadResult:
    """``(d_A^2 - 1)(d_B^2 - 1) [1/(2N) - 2J]`` via the folded integral."""
    _require_page_regime(dims, "mi_closed_form")
    if not tol > 0:
        raise DomainError("tol must be positive")
    pre = _prefactor(dims)
    j = bose_einstein_J_folded(dims, tol / (2.0 * max(pre, 1)))
    return QuadResult(pre * (1.0 / (2 * dims.N) - 2.0 * j.value),
                      2.0 * pre * j.abs_error_estimate, j.evaluations)


def factor_G(dims: TripartiteDims, tol: float = DEFAULT_TOL) -> float:
    """``G = 1/(2N) - 2J``, so that ``<I(A:B)> = (d_A^2 - 1)(d_B^2 - 1) G``."""
    _require_page_regime(dims, "factor_G")
    j = bose_einstein_J_folded(dims, tol / 2.0)
    return 1.0 / (2 * dims.N) - 2.0 * j.value


def partial_fraction_check(d_A: int, d_B: int, u: float) -> PartialFractionCheck:
    """Both sides of the partial-fraction split of ``R(u)``."""
    if d_A < 2 or d_B < 2:
        raise DomainError("partial fractions need d_A, d_B >= 2")
    if not u > 0:
        raise DomainError("u must be positive")
    u = float(u)
    lhs = float(_rational_part(d_A, d_B)(u))
    a2, b2, c2 = d_A * d_A, d_B * d_B, (d_A * d_B) ** 2
    u2 = u * u
    bracket = u / (u2 + 1) - u / (u2 + a2) - u / (u2 + b2) + u / (u2 + c2)
    return PartialFractionCheck(lhs, bracket / ((a2 - 1) * (b2 - 1)))
