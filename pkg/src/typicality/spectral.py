"""Closed-form Haar averages built from the eigenvalue and diagonal structure.

Purity (Lubkin), Page entropy split into its diagonal and eigenvalue parts,
the Dirichlet ``<P ln P>`` moment, the leading-order entropy, and the
per-generator Bloch variance. Entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .dims import SubsystemDims
from .errors import DomainError, RegimeError
from .special_fn import harmonic_diff

__all__ = [
    "PuritySplit",
    "EntropySplit",
    "BlochVariancePrediction",
    "lubkin_purity",
    "dirichlet_cross_moment",
    "page_entropy",
    "dirichlet_plogp",
    "entropy_leading",
    "bloch_variance_prediction",
]


@dataclass(frozen=True)
class PuritySplit:
    diagonal: float
    off_diagonal: float
    total: float
    d_S: int
    d_E: int

    def exact(self) -> tuple[Fraction, Fraction, Fraction]:
        """``(diagonal, off_diagonal, total)`` as exact rationals."""
        n1 = self.d_S * self.d_E + 1
        diag = Fraction(self.d_E + 1, n1)
        off = Fraction(self.d_S - 1, n1)
        return diag, off, diag + off


@dataclass(frozen=True)
class EntropySplit:
    diagonal_entropy: float
    eigenvalue_correction: float
    von_neumann: float


@dataclass(frozen=True)
class BlochVariancePrediction:
    cartan_total: float
    offdiag_total: float
    per_generator: float
    cartan_count: int
    offdiag_count: int

    @property
    def total(self) -> float:
        return self.cartan_total + self.offdiag_total


def lubkin_purity(dims: SubsystemDims) -> PuritySplit:
    """Average purity ``<Tr rho_S^2> = (d_S + d_E)/(N + 1)`` and its diagonal/off-diagonal parts."""
    d_S, d_E = dims.d_S, dims.d_E
    n1 = dims.N + 1
    diag = (d_E + 1) / n1
    off = (d_S - 1) / n1
    return PuritySplit(diag, off, (d_S + d_E) / n1, d_S, d_E)


def dirichlet_cross_moment(N: int) -> float:
    """``<|c_kj|^2 |c_lm|^2>`` for two distinct coefficients of a Haar state in dimension ``N``."""
    if N < 2:
        raise DomainError(f"need N >= 2, got {N}")
    return 1.0 / (N * (N + 1))


def page_entropy(d_sub: int, d_env: int) -> EntropySplit:
    """Exact average entanglement entropy of a ``d_sub``-dimensional subsystem.

    ``<S> = [psi(N+1) - psi(d_env+1)] - (d_sub - 1)/(2 d_env)`` with
    ``N = d_sub d_env``. The bracket is the average diagonal entropy and the
    second term the (non-positive) eigenvalue correction. Requires
    ``d_sub <= d_env``; pass the smaller factor first.
    """
    if d_sub < 1 or d_env < 1:
        raise DomainError("dimensions must be positive")
    if d_sub > d_env:
        raise RegimeError(
            f"subsystem exceeds environment (d_sub={d_sub}, d_env={d_env})")
    N = d_sub * d_env
    diag = harmonic_diff(d_env, N)
    corr = -(d_sub - 1) / (2 * d_env)
    return EntropySplit(diag, corr, diag + corr)


def dirichlet_plogp(dims: SubsystemDims) -> float:
    """``<P_k ln P_k> = (1/d_S) [psi(d_E + 1) - psi(N + 1)]``."""
    return -harmonic_diff(dims.d_E, dims.N) / dims.d_S


def entropy_leading(dims: SubsystemDims) -> float:
    """Leading-order entropy ``ln d_S - (d_S^2 - 1)/(2N)``."""
    if dims.d_S > dims.d_E:
        raise RegimeError("entropy_leading needs d_S <= d_E")
    return math.log(dims.d_S) - (dims.d_S ** 2 - 1) / (2 * dims.N)


def bloch_variance_prediction(d: int, N: int) -> BlochVariancePrediction:
    """Per-generator and per-family Bloch variances ``<r_a^2>`` for ``rho_S`` of dimension ``d``.

    Every one of the ``d^2 - 1`` generators carries ``2/[d(N+1)]``.
    """
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    if N % d:
        raise DomainError(f"d={d} does not divide N={N}")
    per = 2.0 / (d * (N + 1))
    return BlochVariancePrediction(
        cartan_total=2.0 * (d - 1) / (d * (N + 1)),
        offdiag_total=2.0 * (d - 1) / (N + 1),
        per_generator=per,
        cartan_count=d - 1,
        offdiag_count=d * (d - 1),
    )
