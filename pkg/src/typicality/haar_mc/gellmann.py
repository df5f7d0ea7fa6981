"""Generalized Gell-Mann basis of su(d), normalised to ``Tr(l_a l_b) = 2 delta_ab``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

__all__ = ["GellMannBasis", "gellmann_basis"]


@dataclass(frozen=True, eq=False)
class GellMannBasis:
    """Generators stacked as ``(d*d - 1, d, d)``.

    The first ``d(d-1)`` are off-diagonal (symmetric then antisymmetric, pairs
    ``k < l`` in lexicographic order); the last ``d - 1`` are the diagonal
    Cartan generators.
    """

    d: int
    generators: np.ndarray

    @property
    def offdiag_count(self) -> int:
        return self.d * (self.d - 1)

    @property
    def cartan_count(self) -> int:
        return self.d - 1

    @property
    def offdiag(self) -> np.ndarray:
        return self.generators[: self.offdiag_count]

    @property
    def cartan(self) -> np.ndarray:
        return self.generators[self.offdiag_count:]

    @property
    def cartan_slice(self) -> slice:
        return slice(self.offdiag_count, None)

    @property
    def offdiag_slice(self) -> slice:
        return slice(0, self.offdiag_count)


def gellmann_basis(d: int) -> GellMannBasis:
    if not 2 <= d <= 64:
        raise DomainError(f"d must lie in [2, 64], got {d}")
    pairs = [(k, l) for k in range(d) for l in range(k + 1, d)]
    gens = []
    for k, l in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[k, l] = g[l, k] = 1.0
        gens.append(g)
    for k, l in pairs:
        g = np.zeros((d, d), dtype=complex)
        g[k, l] = -1j
        g[l, k] = 1j
        gens.append(g)
    for m in range(1, d):
        diag = np.zeros(d)
        diag[:m] = 1.0
        diag[m] = -m
        gens.append(np.diag(np.sqrt(2.0 / (m * (m + 1))) * diag).astype(complex))
    return GellMannBasis(d, np.array(gens))
