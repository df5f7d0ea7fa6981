import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from typicality.errors import DomainError, QuadratureError
from typicality.quad import QuadConfig, integrate_decaying, integrate_finite


@pytest.mark.parametrize("deg", [0, 1, 5, 13])
def test_polynomials_exact_on_one_panel(deg):
    # Gauss-7 and Kronrod-15 both exact up to degree 13: zero error estimate, no split
    res = integrate_finite(lambda x: x ** deg, 0.0, 1.0, QuadConfig(abs_tol=1e-14))
    assert res.value == pytest.approx(1.0 / (deg + 1), rel=1e-14)
    assert res.evaluations == 15


@pytest.mark.parametrize("deg", [17, 22])
def test_high_degree_polynomials(deg):
    res = integrate_finite(lambda x: x ** deg, 0.0, 1.0, QuadConfig(abs_tol=1e-14))
    assert res.value == pytest.approx(1.0 / (deg + 1), rel=1e-14)


def test_sine_over_period():
    res = integrate_finite(np.sin, 0.0, math.pi)
    assert res.value == pytest.approx(2.0, abs=1e-13)
    assert res.abs_error_estimate <= 1e-12


def test_peaked_integrand_needs_subdivision():
    # int_0^1 1/(1e-4 + (x - 0.3)^2) dx, closed form via arctan
    eps = 1e-4
    exact = (math.atan(0.7 / math.sqrt(eps)) + math.atan(0.3 / math.sqrt(eps))) / math.sqrt(eps)
    res = integrate_finite(lambda x: 1.0 / (eps + (x - 0.3) ** 2), 0.0, 1.0,
                           QuadConfig(abs_tol=1e-10))
    assert res.value == pytest.approx(exact, abs=1e-9)
    assert res.evaluations > 15


@pytest.mark.parametrize("a,b", [(1.0, 0.0), (2.0, 2.0)])
def test_interval_must_be_increasing(a, b):
    with pytest.raises(DomainError):
        integrate_finite(np.exp, a, b)


def test_budget_exhaustion_carries_best_result():
    cfg = QuadConfig(abs_tol=1e-15, max_subdivisions=3)
    with pytest.raises(QuadratureError) as info:
        integrate_finite(lambda x: np.sqrt(np.abs(x - 0.5)), 0.0, 1.0, cfg)
    best = info.value.result
    assert best.value == pytest.approx(2 * (0.5 ** 1.5) / 1.5, abs=1e-3)


def test_non_finite_integrand_rejected():
    with pytest.raises(DomainError):
        integrate_finite(lambda x: np.where(x > 0.5, np.nan, 1.0), 0.0, 1.0)


@pytest.mark.parametrize("kw", [dict(abs_tol=0.0), dict(abs_tol=-1.0), dict(rel_tol=-1.0),
                                dict(max_subdivisions=0)])
def test_config_validation(kw):
    with pytest.raises(DomainError):
        QuadConfig(**kw)


@pytest.mark.parametrize("rate", [0.5, 1.0, 2 * math.pi, 50.0])
def test_decaying_exponential(rate):
    res = integrate_decaying(lambda x: np.exp(-rate * x), 0.0, rate, QuadConfig(abs_tol=1e-13))
    assert res.value == pytest.approx(1.0 / rate, abs=1e-12)


def test_decaying_bose_einstein_moment():
    # int_0^inf t/(e^{2 pi t} - 1) dt = 1/24
    # Kronrod nodes are interior, so t = 0 is never evaluated
    res = integrate_decaying(lambda t: t / np.expm1(2 * math.pi * t), 0.0, 2 * math.pi,
                             QuadConfig(abs_tol=1e-14), scale=1.0)
    assert res.value == pytest.approx(1.0 / 24.0, abs=1e-13)


def test_decaying_tail_enters_error_estimate():
    res = integrate_decaying(lambda x: np.exp(-x), 0.0, 1.0, QuadConfig(abs_tol=1e-6))
    assert abs(res.value - 1.0) <= res.abs_error_estimate
    assert res.abs_error_estimate <= 1e-6


@given(st.floats(0.1, 10.0), st.floats(0.5, 20.0))
def test_gaussian_moment_property(sigma, width):
    # int_{-w}^{w} exp(-x^2 / 2 sigma^2) = sigma sqrt(2 pi) erf(w / (sigma sqrt 2))
    exact = sigma * math.sqrt(2 * math.pi) * math.erf(width / (sigma * math.sqrt(2)))
    res = integrate_finite(lambda x: np.exp(-x * x / (2 * sigma * sigma)), -width, width,
                           QuadConfig(abs_tol=1e-11))
    assert res.value == pytest.approx(exact, abs=1e-10 + 1e-14 * exact)


@given(st.floats(0.3, 5.0))
def test_halving_tolerance_does_not_increase_error(c):
    f = lambda x: 1.0 / (c * c + x * x)
    exact = math.atan(3.0 / c) / c
    prev = None
    for tol in (1e-6, 5e-7, 2.5e-7, 1.25e-7, 6.25e-8):
        err = abs(integrate_finite(f, 0.0, 3.0, QuadConfig(abs_tol=tol)).value - exact)
        if prev is not None:
            assert err <= max(prev, 1e-6 * tol, 4e-16 * exact)
        prev = err


# closed-form battery -----------------------------------------------------------

GAMMA = 0.5772156649015329
LN2_2PI = math.log(2.0) / (2 * math.pi)


def _be(t):
    return 1.0 / np.expm1(2 * math.pi * t)


# (name, runner(cfg) -> QuadResult, exact value)
BATTERY = [
    ("one", lambda c: integrate_finite(lambda x: np.ones_like(x), 0.0, 1.0, c), 1.0),
    ("beta66", lambda c: integrate_finite(lambda x: x ** 5 * (1 - x) ** 5, 0.0, 1.0, c), 1 / 2772),
    ("sin", lambda c: integrate_finite(np.sin, 0.0, math.pi, c), 2.0),
    ("arctan", lambda c: integrate_finite(lambda x: 1 / (1 + x * x), 0.0, 1.0, c), math.pi / 4),
    ("exp", lambda c: integrate_decaying(lambda x: np.exp(-x), 0.0, 1.0, c), 1.0),
    ("x_exp", lambda c: integrate_decaying(lambda x: x * np.exp(-x), 0.0, 0.5, c,
                                            scale=2 / math.e), 1.0),
    ("x3_exp2", lambda c: integrate_decaying(lambda x: x ** 3 * np.exp(-2 * x), 0.0, 1.0, c,
                                              scale=27 * math.exp(-3)), 0.375),
    # int t^{2k-1}/(e^{2 pi t}-1) = (-1)^{k+1} B_2k / (4k)
    ("be_t", lambda c: integrate_decaying(lambda t: t * _be(t), 0.0, math.pi, c,
                                           scale=0.25, onset=LN2_2PI), 1 / 24),
    ("be_t3", lambda c: integrate_decaying(lambda t: t ** 3 * _be(t), 0.0, math.pi, c,
                                            scale=1.0, onset=LN2_2PI), 1 / 240),
    # Binet at z = 1: (1/2 - psi(2)) / 2
    ("binet1", lambda c: integrate_decaying(lambda t: t * _be(t) / (t * t + 1), 0.0, math.pi, c,
                                             scale=0.25, onset=LN2_2PI), (GAMMA - 0.5) / 2),
]


@pytest.mark.parametrize("tol", [1e-8, 1e-12])
@pytest.mark.parametrize("name,run,exact", BATTERY, ids=[b[0] for b in BATTERY])
def test_error_estimate_bounds_true_error(name, run, exact, tol):
    res = run(QuadConfig(abs_tol=tol))
    err = abs(res.value - exact)
    # estimates are of truncation error; allow a few ulps of rounding on top
    assert err <= res.abs_error_estimate + 4 * np.finfo(float).eps * abs(exact)
    assert res.abs_error_estimate <= tol


@pytest.mark.parametrize("name,run,exact", BATTERY, ids=[b[0] for b in BATTERY])
def test_battery_halving_tolerance(name, run, exact):
    # Errors far below the request are uncontrolled: panel errors of both signs
    # can cancel on a coarse partition and stop cancelling after refinement.
    prev = None
    for tol in (1e-6, 5e-7, 2.5e-7, 1.25e-7, 1e-8, 5e-9):
        err = abs(run(QuadConfig(abs_tol=tol)).value - exact)
        floor = max(1e-6 * tol, 4 * np.finfo(float).eps * abs(exact))
        if prev is not None:
            assert err <= max(prev, floor)
        prev = err


@pytest.mark.parametrize("name,run,exact", BATTERY, ids=[b[0] for b in BATTERY])
def test_battery_deterministic(name, run, exact):
    a, b = run(QuadConfig(abs_tol=1e-12)), run(QuadConfig(abs_tol=1e-12))
    assert a.value.hex() == b.value.hex()
    assert a.abs_error_estimate == b.abs_error_estimate
