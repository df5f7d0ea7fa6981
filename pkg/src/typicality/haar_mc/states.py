"""Haar-random pure states, reduced density matrices, entropies and Bloch vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dims import SubsystemDims
from ..errors import DomainError
from .gellmann import GellMannBasis
from .linalg import hermitize, jacobi_eigvalsh
from .rng import CounterStream, complex_normals

__all__ = [
    "PureState",
    "ReducedDensity",
    "EntropyRecord",
    "sample_state",
    "sample_coefficients",
    "partial_trace",
    "hermitian_eigenvalues",
    "entropies",
    "bloch_components",
    "entropy_from_eigenvalues",
    "shannon_entropy",
    "EIGEN_CUTOFF",
]

EIGEN_CUTOFF = 1e-15


@dataclass(frozen=True, eq=False)
class PureState:
    """Coefficients ``c[i, j]`` of ``|psi> = sum c_ij |i>_S |j>_E``."""

    coefficients: np.ndarray
    dims: SubsystemDims


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    entries: np.ndarray
    dims: SubsystemDims


@dataclass(frozen=True)
class EntropyRecord:
    von_neumann: float
    diagonal: float
    purity: float


def sample_coefficients(seed: int, indices: np.ndarray, n: int) -> np.ndarray:
    """Normalised Haar coefficient vectors, shape ``(len(indices), n)``."""
    z = complex_normals(seed, indices, n)
    norm = np.sqrt(np.sum(z.real ** 2 + z.imag ** 2, axis=1, keepdims=True))
    return z / norm


def sample_state(dims: SubsystemDims, stream: CounterStream) -> PureState:
    """Uniform point on ``S^{2N-1}`` viewed as a ``d_S x d_E`` coefficient matrix."""
    z = sample_coefficients(stream.seed, np.array([stream.index]), dims.N)[0]
    return PureState(z.reshape(dims.d_S, dims.d_E), dims)


def partial_trace(state: PureState) -> ReducedDensity:
    """``rho[k, l] = sum_j c[k, j] conj(c[l, j])``."""
    c = state.coefficients
    return ReducedDensity(hermitize(c @ c.conj().T), state.dims)


def hermitian_eigenvalues(rho: ReducedDensity) -> np.ndarray:
    """Eigenvalues of ``rho`` in descending order (cyclic Jacobi)."""
    m = np.asarray(rho.entries)
    if m.shape[-1] > 64:
        raise DomainError("hermitian_eigenvalues supports d <= 64")
    return jacobi_eigvalsh(m)


def entropy_from_eigenvalues(lam: np.ndarray) -> np.ndarray:
    """``-sum lam ln lam`` over the last axis, ignoring ``lam <= 1e-15``."""
    lam = np.asarray(lam, dtype=float)
    keep = lam > EIGEN_CUTOFF
    safe = np.where(keep, lam, 1.0)
    return -np.sum(np.where(keep, safe * np.log(safe), 0.0), axis=-1)


shannon_entropy = entropy_from_eigenvalues


def entropies(rho: ReducedDensity) -> EntropyRecord:
    m = np.asarray(rho.entries)
    lam = hermitian_eigenvalues(rho)
    diag = np.real(np.diagonal(m))
    return EntropyRecord(
        von_neumann=float(entropy_from_eigenvalues(lam)),
        diagonal=float(shannon_entropy(diag)),
        purity=float(np.sum(np.abs(m) ** 2)),
    )


def bloch_components(rho: ReducedDensity, basis: GellMannBasis) -> np.ndarray:
    """``r_a = Tr(rho lambda_a)``; works on single matrices and stacks."""
    m = np.asarray(rho.entries if isinstance(rho, ReducedDensity) else rho)
    if m.shape[-1] != basis.d:
        raise DomainError(f"matrix dimension {m.shape[-1]} != basis dimension {basis.d}")
    r = np.einsum("...kl,alk->...a", m, basis.generators)
    if np.max(np.abs(r.imag), initial=0.0) > 1e-12:
        raise DomainError("Bloch components have a non-negligible imaginary part")
    return r.real
