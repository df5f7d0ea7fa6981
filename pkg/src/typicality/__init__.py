"""Typicality of Haar-random pure states.

Exact subsystem probability laws, Page/Lubkin averages, the typical mutual
information in harmonic, series and integral form, and a Monte Carlo oracle
to check them.
"""

from .dims import SubsystemDims, TripartiteDims
from .errors import (ConvergenceError, DomainError, InsufficientSamplesError,
                     QuadratureError, RegimeError, TypicalityError)
from .mutual_info import (factor_G, mi_bernoulli_series, mi_closed_form, mi_exact,
                          mi_leading, mi_naive_factorized, mi_zeta_series,
                          optimal_truncation)
from .pclt import (figure1_data, gaussian_matched_density, pk_density, pk_law,
                   pk_moments, tail_comparison)
from .spectral import (bloch_variance_prediction, dirichlet_plogp, lubkin_purity,
                       page_entropy)

__version__ = "0.1.0"

__all__ = [
    "SubsystemDims", "TripartiteDims",
    "TypicalityError", "DomainError", "RegimeError", "QuadratureError",
    "ConvergenceError", "InsufficientSamplesError",
    "mi_exact", "mi_leading", "mi_naive_factorized", "mi_bernoulli_series",
    "mi_zeta_series", "optimal_truncation", "mi_closed_form", "factor_G",
    "pk_law", "pk_moments", "pk_density", "gaussian_matched_density",
    "tail_comparison", "figure1_data",
    "lubkin_purity", "page_entropy", "dirichlet_plogp", "bloch_variance_prediction",
    "__version__",
]
