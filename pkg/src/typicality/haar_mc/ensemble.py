"""Streaming Monte Carlo ensembles with mergeable accumulators.

Samples are processed in fixed blocks of :data:`BLOCK_SIZE` consecutive
indices. Every block is reduced to its own accumulator and the blocks are
merged in index order, so the statistics are bit-identical whatever the
number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ..dims import SubsystemDims, TripartiteDims
from ..errors import DomainError, InsufficientSamplesError
from ..pclt import BetaLaw, pk_law
from .gellmann import GellMannBasis, gellmann_basis
from .linalg import hermitize, jacobi_eigvalsh
from .states import entropy_from_eigenvalues, sample_coefficients, shannon_entropy

__all__ = [
    "Moments",
    "EnsembleStats",
    "MIEnsembleResult",
    "run_ensemble",
    "mi_ensemble",
    "ks_statistic",
    "ks_distance",
    "ks_critical_value",
    "BLOCK_SIZE",
    "RESERVOIR_CAP",
    "HIST_BINS",
]

BLOCK_SIZE = 2048
RESERVOIR_CAP = 100_000
HIST_BINS = 512
MAJORIZATION_SLACK = 1e-9


@dataclass
class Moments:
    """Count, mean and sum of squared deviations (Chan/Welford form)."""

    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, x) -> "Moments":
        x = np.asarray(x, dtype=float)
        mean = x.mean(axis=0)
        return cls(x.shape[0], mean, np.sum((x - mean) ** 2, axis=0))

    def merge(self, other: "Moments") -> "Moments":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta ** 2 * (self.count * other.count / n)
        return Moments(n, mean, m2)

    @property
    def variance(self) -> np.ndarray:
        """Unbiased sample variance."""
        return self.m2 / (self.count - 1)

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(self.variance / self.count)


@dataclass
class EnsembleStats:
    """Accumulated statistics of reduced states ``rho_S`` of Haar-random pure states.

    ``bloch_sq`` holds moments of ``r_a^2`` (its mean is the per-generator
    variance since ``<r_a> = 0``); ``family_gap`` is the per-sample difference
    between the Cartan-family and off-diagonal-family averages of ``r_a^2``.
    ``p1_samples`` retains the first :data:`RESERVOIR_CAP` values of ``P_1``
    in sample order.
    """

    dims: SubsystemDims
    count: int
    pk: Moments
    pk_logpk: Moments
    purity: Moments
    von_neumann: Moments
    diagonal: Moments
    bloch: Moments
    bloch_sq: Moments
    family_gap: Moments
    cross_moment: Moments
    p1_hist: np.ndarray
    p1_samples: np.ndarray = field(repr=False)
    majorization_violations: int = 0

    def merge(self, other: "EnsembleStats") -> "EnsembleStats":
        if self.dims != other.dims:
            raise DomainError("cannot merge ensembles of different dimensions")
        room = max(RESERVOIR_CAP - self.p1_samples.size, 0)
        return EnsembleStats(
            dims=self.dims,
            count=self.count + other.count,
            pk=self.pk.merge(other.pk),
            pk_logpk=self.pk_logpk.merge(other.pk_logpk),
            purity=self.purity.merge(other.purity),
            von_neumann=self.von_neumann.merge(other.von_neumann),
            diagonal=self.diagonal.merge(other.diagonal),
            bloch=self.bloch.merge(other.bloch),
            bloch_sq=self.bloch_sq.merge(other.bloch_sq),
            family_gap=self.family_gap.merge(other.family_gap),
            cross_moment=self.cross_moment.merge(other.cross_moment),
            p1_hist=self.p1_hist + other.p1_hist,
            p1_samples=np.concatenate([self.p1_samples, other.p1_samples[:room]]),
            majorization_violations=self.majorization_violations
            + other.majorization_violations,
        )


def _hist_edges() -> np.ndarray:
    return np.linspace(0.0, 1.0, HIST_BINS + 1)


def _gram_spectrum(m: np.ndarray) -> np.ndarray:
    """Non-zero spectrum of ``M M^dagger`` via whichever Gram matrix is smaller."""
    rows, cols = m.shape[-2:]
    if rows <= cols:
        g = m @ np.conj(np.swapaxes(m, -1, -2))
    else:
        g = np.conj(np.swapaxes(m, -1, -2)) @ m
    return jacobi_eigvalsh(hermitize(g))


def _subsystem_block(dims: SubsystemDims, seed: int, start: int, stop: int,
                     basis: GellMannBasis) -> EnsembleStats:
    idx = np.arange(start, stop, dtype=np.uint64)
    c = sample_coefficients(seed, idx, dims.N).reshape(-1, dims.d_S, dims.d_E)
    weights = c.real ** 2 + c.imag ** 2
    p = weights.sum(axis=2)
    rho = hermitize(c @ np.conj(np.swapaxes(c, -1, -2)))

    lam = _gram_spectrum(c)
    vn = entropy_from_eigenvalues(lam)
    diag = shannon_entropy(p)
    purity = np.sum(np.abs(rho) ** 2, axis=(1, 2))
    plogp = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)

    r = np.einsum("bkl,alk->ba", rho, basis.generators).real
    r2 = r * r
    gap = (r2[:, basis.cartan_slice].mean(axis=1)
           - r2[:, basis.offdiag_slice].mean(axis=1))

    N = dims.N
    sum_w2 = np.sum(weights.reshape(len(idx), -1) ** 2, axis=1)
    # average of |c_a|^2 |c_b|^2 over all ordered pairs a != b
    cross = (1.0 - sum_w2) / (N * (N - 1))

    hist, _ = np.histogram(p[:, 0], bins=_hist_edges())
    return EnsembleStats(
        dims=dims,
        count=len(idx),
        pk=Moments.of(p),
        pk_logpk=Moments.of(plogp),
        purity=Moments.of(purity),
        von_neumann=Moments.of(vn),
        diagonal=Moments.of(diag),
        bloch=Moments.of(r),
        bloch_sq=Moments.of(r2),
        family_gap=Moments.of(gap),
        cross_moment=Moments.of(cross),
        p1_hist=hist.astype(np.int64),
        p1_samples=p[:, 0].copy(),
        majorization_violations=int(np.count_nonzero(vn > diag + MAJORIZATION_SLACK)),
    )


def _blocks(samples: int):
    return [(s, min(s + BLOCK_SIZE, samples)) for s in range(0, samples, BLOCK_SIZE)]


def _map_blocks(fn, blocks, workers: int):
    if workers <= 1 or len(blocks) == 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def run_ensemble(dims: SubsystemDims, samples: int, seed: int, workers: int = 1) -> EnsembleStats:
    """Sample ``samples`` Haar states on ``C^{d_S} x C^{d_E}`` and accumulate statistics."""
    if samples < 1:
        raise DomainError("samples must be at least 1")
    if dims.d_S < 2:
        raise DomainError("run_ensemble needs d_S >= 2")
    basis = gellmann_basis(dims.d_S)
    parts = _map_blocks(lambda b: _subsystem_block(dims, seed, b[0], b[1], basis),
                        _blocks(samples), workers)
    return reduce(EnsembleStats.merge, parts)


@dataclass(frozen=True)
class MIEnsembleResult:
    mean_mi: float
    stderr: float
    count: int


def _mi_block(dims: TripartiteDims, seed: int, start: int, stop: int) -> Moments:
    idx = np.arange(start, stop, dtype=np.uint64)
    a, b, e = dims.d_A, dims.d_B, dims.d_E
    c = sample_coefficients(seed, idx, dims.N).reshape(-1, a, b, e)
    s_a = entropy_from_eigenvalues(_gram_spectrum(c.reshape(-1, a, b * e)))
    s_b = entropy_from_eigenvalues(
        _gram_spectrum(c.transpose(0, 2, 1, 3).reshape(-1, b, a * e)))
    s_ab = entropy_from_eigenvalues(_gram_spectrum(c.reshape(-1, a * b, e)))
    return Moments.of(s_a + s_b - s_ab)


def mi_ensemble(dims: TripartiteDims, samples: int, seed: int, workers: int = 1) -> MIEnsembleResult:
    """Monte Carlo mean of ``S(A) + S(B) - S(AB)`` with its standard error."""
    if samples < 1:
        raise DomainError("samples must be at least 1")
    parts = _map_blocks(lambda blk: _mi_block(dims, seed, blk[0], blk[1]),
                        _blocks(samples), workers)
    m = reduce(Moments.merge, parts)
    stderr = float(m.stderr) if m.count > 1 else math.nan
    return MIEnsembleResult(float(m.mean), stderr, m.count)


def ks_critical_value(n: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample KS critical value ``c(alpha)/sqrt(n)``."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c / math.sqrt(n)


def ks_distance(samples, law: BetaLaw) -> float:
    """Kolmogorov-Smirnov distance between ``samples`` and a Beta law."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise InsufficientSamplesError("no samples")
    cdf = np.asarray(law.cdf(np.clip(x, 0.0, 1.0)))
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def ks_statistic(stats: EnsembleStats, dims: SubsystemDims | None = None,
                 min_samples: int = 1000) -> float:
    """KS distance of the ``P_1`` samples from ``Beta(d_E, d_E (d_S - 1))``.

    Uses the retained samples when every sample was kept. Otherwise the
    distance is read off the 512-bin histogram at the bin edges; that value
    can undershoot the exact statistic by at most the largest probability
    mass the law puts in a single bin.
    """
    dims = dims or stats.dims
    if stats.count < min_samples:
        raise InsufficientSamplesError(
            f"need at least {min_samples} samples, have {stats.count}")
    law = pk_law(dims)
    if stats.p1_samples.size == stats.count:
        return ks_distance(stats.p1_samples, law)
    edges = _hist_edges()
    emp = np.concatenate([[0.0], np.cumsum(stats.p1_hist) / stats.count])
    return float(np.max(np.abs(emp - np.asarray(law.cdf(edges)))))
