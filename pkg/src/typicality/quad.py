"""Adaptive one-dimensional quadrature on finite and exponentially decaying ranges.

Panels are integrated with the embedded 7-point Gauss / 15-point Kronrod pair
and the panel with the largest local error is bisected until the summed error
estimate meets the tolerance. The local error estimate is ``|K15 - G7|``,
which is pessimistic for smooth integrands and therefore a safe bound.

Integrands receive a 1-D ``numpy`` array of nodes and must return an array of
the same shape. No rule node ever lands on a panel endpoint, so integrands
with removable singularities at the endpoints (``t / (exp(t) - 1)`` at 0) can
be passed as they are.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, QuadratureError

__all__ = [
    "QuadConfig",
    "QuadResult",
    "integrate_finite",
    "integrate_decaying",
]

Integrand = Callable[[np.ndarray], np.ndarray]

# Kronrod abscissae on [0, 1); the odd-indexed ones are the Gauss-7 nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full symmetric node/weight vectors on [-1, 1].
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and limits for the adaptive integrator.

    ``min_panel_width`` of ``None`` means ``1e-13 * (b - a)``.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 0.0
    max_subdivisions: int = 2000
    min_panel_width: float | None = None

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if self.rel_tol < 0:
            raise DomainError("rel_tol must be non-negative")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __float__(self):
        return self.value


def _kronrod_panel(f: Integrand, a: float, b: float) -> tuple[float, float]:
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    y = np.asarray(f(center + half * _NODES), dtype=float)
    if not np.all(np.isfinite(y)):
        raise DomainError(f"integrand is not finite on ({a!r}, {b!r})")
    kronrod = half * float(np.dot(_KWEIGHTS, y))
    gauss = half * float(np.dot(_GWEIGHTS, y))
    return kronrod, abs(kronrod - gauss)


def integrate_finite(f: Integrand, a: float, b: float,
                     cfg: QuadConfig | None = None) -> QuadResult:
    """Integrate ``f`` over the finite interval ``[a, b]``.

    Raises :class:`QuadratureError` (carrying the best estimate) when the
    subdivision budget runs out before the tolerance is met.
    """
    cfg = cfg or QuadConfig()
    a, b = float(a), float(b)
    if not a < b:
        raise DomainError(f"need a < b, got a={a!r}, b={b!r}")
    min_width = cfg.min_panel_width
    if min_width is None:
        min_width = 1e-13 * (b - a)

    value, err = _kronrod_panel(f, a, b)
    rules = 1
    # heap entries: (-error, lo, hi, value, error); lo breaks ties deterministically
    heap = [(-err, a, b, value, err)]
    subdivisions = 0

    def totals():
        panels = sorted(heap, key=lambda p: p[1])
        return (math.fsum(p[3] for p in panels),
                math.fsum(p[4] for p in panels))

    total, total_err = value, err
    while total_err > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        if subdivisions >= cfg.max_subdivisions or -heap[0][0] == 0.0:
            break
        _, lo, hi, _, _ = heap[0]
        if hi - lo < min_width:
            break
        heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        for l, h in ((lo, mid), (mid, hi)):
            v, e = _kronrod_panel(f, l, h)
            heapq.heappush(heap, (-e, l, h, v, e))
        rules += 2
        subdivisions += 1
        total, total_err = totals()

    result = QuadResult(total, total_err, 15 * rules)
    if total_err > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        raise QuadratureError(
            f"no convergence after {subdivisions} subdivisions "
            f"(error estimate {total_err:.3e})", result)
    return result


def integrate_decaying(f: Integrand, a: float, decay_rate: float,
                       cfg: QuadConfig | None = None, *, scale: float = 1.0,
                       onset: float | None = None) -> QuadResult:
    """Integrate ``f`` over ``[a, inf)`` for an exponentially decaying integrand.

    The caller certifies ``|f(u)| <= scale * exp(-decay_rate * (u - a))`` for
    ``u >= onset`` (default ``a``). The range is cut where the analytic tail
    bound drops below ``abs_tol / 100`` and that bound is added to the error
    estimate.
    """
    cfg = cfg or QuadConfig()
    if not decay_rate > 0:
        raise DomainError("decay_rate must be positive")
    a = float(a)
    onset = a if onset is None else max(a, float(onset))
    budget = cfg.abs_tol / 100.0
    span = math.log(max(scale / (decay_rate * budget), 1.0)) / decay_rate
    cut = max(onset, a + span, a + 1.0 / decay_rate)
    tail = scale * math.exp(-decay_rate * (cut - a)) / decay_rate

    inner = QuadConfig(abs_tol=cfg.abs_tol - tail, rel_tol=cfg.rel_tol,
                       max_subdivisions=cfg.max_subdivisions,
                       min_panel_width=cfg.min_panel_width)
    try:
        res = integrate_finite(f, a, cut, inner)
    except QuadratureError as exc:
        r = exc.result
        raise QuadratureError(str(exc), QuadResult(
            r.value, r.abs_error_estimate + tail, r.evaluations)) from None
    return QuadResult(res.value, res.abs_error_estimate + tail, res.evaluations)
