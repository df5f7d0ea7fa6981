"""Special functions used by the analytic formulas.

Harmonic numbers, digamma (asymptotic and Binet-integral routes), exact
Bernoulli numbers, zeta at negative odd integers, the log-Beta normaliser and
the regularized incomplete Beta function.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError
from .quad import QuadConfig, QuadResult, integrate_decaying

__all__ = [
    "EULER_GAMMA",
    "harmonic",
    "harmonic_diff",
    "harmonic_exact",
    "digamma",
    "digamma_binet",
    "bernoulli_even",
    "zeta_negative_odd",
    "log_beta",
    "reg_incomplete_beta",
]

EULER_GAMMA = 0.57721566490153286061

# Asymptotic tail coefficients B_2k / (2k) for k = 1..7.
_DIGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

_DIGAMMA_SHIFT = 10.0
_FSUM_LIMIT = 200_000


def harmonic(n: int) -> float:
    """Return ``H_n = 1 + 1/2 + ... + 1/n`` (``H_0 = 0``).

    The sum is exactly rounded (``math.fsum``).
    """
    n = _check_count(n)
    return math.fsum(1.0 / j for j in range(1, n + 1))


def harmonic_diff(m: int, n: int) -> float:
    """Return ``H_n - H_m`` for ``0 <= m <= n`` without cancellation.

    This equals ``psi(n + 1) - psi(m + 1)``; long ranges fall back to the
    digamma difference.
    """
    m, n = _check_count(m), _check_count(n)
    if m > n:
        return -harmonic_diff(n, m)
    if n - m > _FSUM_LIMIT:
        return digamma(n + 1.0) - digamma(m + 1.0)
    return math.fsum(1.0 / j for j in range(m + 1, n + 1))


@lru_cache(maxsize=256)
def harmonic_exact(n: int) -> Fraction:
    """``H_n`` as an exact rational."""
    n = _check_count(n)
    total = Fraction(0)
    for j in range(1, n + 1):
        total += Fraction(1, j)
    return total


def _check_count(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"expected a non-negative integer, got {n!r}")
    return int(n)


def digamma(x: float) -> float:
    """Digamma function ``psi(x)`` for real ``x > 0``.

    Shifts upward with ``psi(x) = psi(x + 1) - 1/x`` until ``x >= 10``, then
    uses the asymptotic series with seven Bernoulli terms.
    """
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"digamma needs x > 0, got {x!r}")
    shift = []
    while x < _DIGAMMA_SHIFT:
        shift.append(1.0 / x)
        x += 1.0
    inv2 = 1.0 / (x * x)
    # Horner in 1/x^2 over the tail coefficients
    tail = 0.0
    for coef in reversed(_DIGAMMA_TAIL):
        tail = (tail + coef) * inv2
    return math.fsum([math.log(x), -0.5 / x, -tail] + [-s for s in shift])


def digamma_binet(z: float, tol: float = 1e-12) -> float:
    """``psi(z + 1)`` from Binet's second integral, for ``z > 0``.

    ``psi(z + 1) = ln z + 1/(2z) - 2 * int_0^inf t / ((t^2 + z^2)(e^{2 pi t} - 1)) dt``

    The argument follows the integral's own convention: ``digamma_binet(z)``
    is compared against ``digamma(z + 1)``.
    """
    z = float(z)
    if not z > 0:
        raise DomainError(f"digamma_binet needs z > 0, got {z!r}")
    if not tol > 0:
        raise DomainError("tol must be positive")
    res = binet_integral(z, tol / 2.0)
    return math.log(z) + 0.5 / z - 2.0 * res.value


def binet_integral(z: float, tol: float = 1e-12) -> QuadResult:
    """The integral ``int_0^inf t / ((t^2 + z^2)(e^{2 pi t} - 1)) dt``."""
    z2 = z * z
    two_pi = 2.0 * math.pi

    def integrand(t):
        return t / ((t * t + z2) * np.expm1(two_pi * t))

    # for t >= ln 2 / (2 pi): t / (e^{2 pi t} - 1) <= 2 t e^{-2 pi t} <= e^{-pi t}
    return integrate_decaying(integrand, 0.0, math.pi, QuadConfig(abs_tol=tol),
                              scale=1.0 / z2,
                              onset=math.log(2.0) / two_pi)


@lru_cache(maxsize=None)
def _bernoulli_upto(m_max: int) -> tuple[Fraction, ...]:
    """Bernoulli numbers ``B_0 .. B_m_max`` (``B_1 = -1/2``) as exact rationals."""
    b = [Fraction(1)]
    for m in range(1, m_max + 1):
        # sum_{j=0}^{m} C(m+1, j) B_j = 0
        acc = Fraction(0)
        binom = 1  # C(m+1, 0)
        for j in range(m):
            acc += binom * b[j]
            binom = binom * (m + 1 - j) // (j + 1)
        b.append(-acc / (m + 1))
    return tuple(b)


def bernoulli_even_unbounded(k_max: int) -> list[Fraction]:
    """``[B_2, ..., B_{2 k_max}]`` with no upper limit on ``k_max``."""
    table = _bernoulli_upto(2 * k_max)
    return [table[2 * k] for k in range(1, k_max + 1)]


def bernoulli_even(k_max: int) -> list[Fraction]:
    """Even-index Bernoulli numbers ``[B_2, B_4, ..., B_{2 k_max}]``.

    >>> bernoulli_even(3)
    [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42)]
    """
    if isinstance(k_max, bool) or int(k_max) != k_max or not 1 <= k_max <= 64:
        raise DomainError(f"k_max must be an integer in [1, 64], got {k_max!r}")
    return bernoulli_even_unbounded(int(k_max))


def zeta_negative_odd(k: int) -> Fraction:
    """``zeta(1 - 2k) = -B_2k / (2k)`` exactly, for ``k >= 1``."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    return -_bernoulli_upto(2 * k)[2 * k] / (2 * k)


def log_beta(a: float, b: float) -> float:
    """``ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b)``."""
    if not (a > 0 and b > 0):
        raise DomainError(f"log_beta needs a, b > 0, got a={a!r}, b={b!r}")
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


_LENTZ_MAX_ITER = 300
_LENTZ_EPS = 1e-15
_LENTZ_TINY = 1e-300


def _beta_cf(x: float, a: float, b: float) -> float:
    """Continued fraction for ``I_x(a, b)`` by the modified Lentz method."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _LENTZ_TINY:
        d = _LENTZ_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _LENTZ_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _LENTZ_TINY:
            d = _LENTZ_TINY
        c = 1.0 + aa / c
        if abs(c) < _LENTZ_TINY:
            c = _LENTZ_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _LENTZ_TINY:
            d = _LENTZ_TINY
        c = 1.0 + aa / c
        if abs(c) < _LENTZ_TINY:
            c = _LENTZ_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _LENTZ_EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge for "
        f"x={x!r}, a={a!r}, b={b!r}")


def _reg_incomplete_beta_scalar(x: float, a: float, b: float) -> float:
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (a * math.log(x) + b * math.log1p(-x)) - log_beta(a, b)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    return 1.0 - front * _beta_cf(1.0 - x, b, a) / b


def reg_incomplete_beta(x, a: float, b: float):
    """Regularized incomplete Beta function ``I_x(a, b)``.

    ``x`` may be a scalar or an array; arrays are evaluated elementwise.
    """
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise DomainError(f"shape parameters must be positive, got a={a!r}, b={b!r}")
    if np.ndim(x) == 0:
        x = float(x)
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x must lie in [0, 1], got {x!r}")
        return _reg_incomplete_beta_scalar(x, a, b)
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or not np.all(np.isfinite(arr)):
        raise DomainError("x must lie in [0, 1]")
    flat = [_reg_incomplete_beta_scalar(v, a, b) for v in arr.ravel().tolist()]
    return np.array(flat, dtype=float).reshape(arr.shape)
