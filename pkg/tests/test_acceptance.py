"""Acceptance battery: one test per criterion, each printing a PASS/FAIL line.

The criteria themselves live in :mod:`typicality.report` (shared with
``typicality report``). Where a cheap independent oracle exists the measured
values are re-derived here too.
"""

import math
from fractions import Fraction

import pytest
import scipy.special as sc
import scipy.stats as ss

from typicality import report


def _page(d, N):
    e = N // d
    m, n = min(d, e), max(d, e)
    return sc.digamma(N + 1) - sc.digamma(n + 1) - (m - 1) / (2 * n)


def _mi_oracle(a, b, e):
    N = a * b * e
    return _page(a, N) + _page(b, N) - _page(a * b, N)


def _oracle_1(m):
    beta, norm = ss.beta(6, 6), ss.norm(0.5, math.sqrt(1 / 52))
    assert m["exact_density"] == pytest.approx(beta.pdf(0.95), rel=1e-12)
    assert m["gaussian_density"] == pytest.approx(norm.pdf(0.95), rel=1e-12)


def _oracle_2(m):
    assert m["exact_tail"] == pytest.approx(ss.beta(6, 6).sf(0.95), rel=1e-11)
    assert m["gaussian_tail"] == pytest.approx(ss.norm(0.5, math.sqrt(1 / 52)).sf(0.95), rel=1e-11)


def _oracle_3(m):
    assert m["gaussian_density"] == pytest.approx(ss.norm(0.5, math.sqrt(1 / 52)).pdf(1.0), rel=1e-12)


def _oracle_4(m):
    assert m["mi_exact"] == pytest.approx(_mi_oracle(2, 2, 4), abs=1e-14)
    assert Fraction(m["mi_leading"]) == Fraction(9, 32)


def _oracle_7(m):
    assert m["mi_exact"] == pytest.approx(_mi_oracle(3, 4, 2), abs=1e-13)


ORACLES = {1: _oracle_1, 2: _oracle_2, 3: _oracle_3, 4: _oracle_4, 7: _oracle_7}


@pytest.mark.parametrize("number", range(1, 15), ids=lambda n: f"criterion_{n:02d}")
def test_acceptance_criterion(number, acceptance_lines):
    [res] = report.run_report(only=[number])
    line = res.line()
    acceptance_lines.append((number, line))
    print(line)
    if not res.passed:
        print(f"    measured: {res.measured}")
        print(f"    expected: {res.expected}")
    assert res.passed, f"criterion {number} failed: {res.measured}"
    if number in ORACLES:
        ORACLES[number](res.measured)


def test_battery_has_fourteen_criteria():
    assert len(report.CRITERIA) == 14
    assert len(report.grid_dims()) == 27
