"""Monte Carlo oracle over Haar-random pure states."""

from .ensemble import (BLOCK_SIZE, HIST_BINS, RESERVOIR_CAP, EnsembleStats,
                       MIEnsembleResult, Moments, ks_critical_value, ks_distance,
                       ks_statistic, mi_ensemble, run_ensemble)
from .gellmann import GellMannBasis, gellmann_basis
from .linalg import hermitize, jacobi_eigvalsh
from .rng import CounterStream, complex_normals, philox4x64, uniforms
from .states import (EntropyRecord, PureState, ReducedDensity, bloch_components,
                     entropies, hermitian_eigenvalues, partial_trace, sample_coefficients,
                     sample_state)

__all__ = [
    "BLOCK_SIZE", "HIST_BINS", "RESERVOIR_CAP",
    "EnsembleStats", "MIEnsembleResult", "Moments",
    "ks_critical_value", "ks_distance", "ks_statistic", "mi_ensemble", "run_ensemble",
    "GellMannBasis", "gellmann_basis", "hermitize", "jacobi_eigvalsh",
    "CounterStream", "complex_normals", "philox4x64", "uniforms",
    "EntropyRecord", "PureState", "ReducedDensity", "bloch_components", "entropies",
    "hermitian_eigenvalues", "partial_trace", "sample_coefficients", "sample_state",
]
