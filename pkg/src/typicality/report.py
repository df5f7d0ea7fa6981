"""Desk-scale acceptance battery.

Each check returns a :class:`CriterionResult` carrying the measured values next
to the expected ones. ``run_report`` runs them all; ``cmd_report`` in the CLI
renders the outcome.
"""

from __future__ import annotations

import io
import math
import statistics
import time
from contextlib import redirect_stdout
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import special_fn
from .dims import SubsystemDims, TripartiteDims
from .haar_mc import ks_critical_value, ks_statistic, mi_ensemble, run_ensemble
from .mutual_info import (bose_einstein_J, bose_einstein_J_folded, factor_G,
                          folded_integrand, log_folded_integrand,
                          mi_bernoulli_series, mi_closed_form,
                          mi_exact, mi_exact_rational, mi_leading,
                          mi_naive_factorized, optimal_truncation,
                          partial_fraction_check)
from .pclt import gaussian_matched_density, pk_density, pk_moments, tail_comparison
from .quad import QuadConfig, integrate_finite
from .spectral import (bloch_variance_prediction, dirichlet_plogp, lubkin_purity,
                       page_entropy)

__all__ = ["CriterionResult", "CRITERIA", "run_report", "grid_dims", "REPORT_SEED"]

REPORT_SEED = 20240611
MC_SAMPLES = 100_000

# Independent reference table for the even Bernoulli numbers B_2 .. B_20.
BERNOULLI_TABLE = (
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330),
)

BernoulliProvider = Callable[[int], list]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.seconds:.3f} s)"


def grid_dims() -> list[TripartiteDims]:
    """The 27 page-regime grid points ``d_A, d_B in {2,3,4}``, ``d_E in {C, 2C, 4C}``."""
    out = []
    for a in (2, 3, 4):
        for b in (2, 3, 4):
            for m in (1, 2, 4):
                out.append(TripartiteDims(a, b, m * a * b))
    return out


def _best_time(fn, repeats: int = 25) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _within(x: float, lo: float, hi: float) -> bool:
    return lo <= x <= hi


def criterion_1(**_) -> CriterionResult:
    d = SubsystemDims(2, 6)
    exact = pk_density(d, 0.95)
    gauss = gaussian_matched_density(d, 0.95)
    ratio = gauss / exact
    runtime = _best_time(lambda: (pk_density(d, 0.95), gaussian_matched_density(d, 0.95)))
    ok = (_within(exact, 6.6e-4, 6.8e-4) and _within(gauss, 1.4e-2, 1.6e-2)
          and _within(ratio, 19, 25) and runtime < 1e-3)
    return CriterionResult(1, "tail densities at p=0.95, (2,6)", ok,
                           {"exact_density": exact, "gaussian_density": gauss,
                            "ratio": ratio, "runtime_s": runtime},
                           {"exact_density": "[6.6e-4, 6.8e-4]",
                            "gaussian_density": "[1.4e-2, 1.6e-2]",
                            "ratio": "[19, 25]", "runtime_s": "< 1e-3"})


def criterion_2(**_) -> CriterionResult:
    d = SubsystemDims(2, 6)
    tc = tail_comparison(d, 0.95)
    runtime = _best_time(lambda: tail_comparison(d, 0.95))
    ok = (_within(tc.exact_tail, 5.7e-6, 5.9e-6) and _within(tc.gaussian_tail, 5.8e-4, 6.0e-4)
          and tc.tail_ratio > 100 and runtime < 1e-3)
    return CriterionResult(2, "tail probabilities at p=0.95, (2,6)", ok,
                           {"exact_tail": tc.exact_tail, "gaussian_tail": tc.gaussian_tail,
                            "ratio": tc.tail_ratio, "runtime_s": runtime},
                           {"exact_tail": "[5.7e-6, 5.9e-6]",
                            "gaussian_tail": "[5.8e-4, 6.0e-4]",
                            "ratio": "> 100", "runtime_s": "< 1e-3"})


def criterion_3(**_) -> CriterionResult:
    d = SubsystemDims(2, 6)
    exact = pk_density(d, 1.0)
    gauss = gaussian_matched_density(d, 1.0)
    ok = exact == 0.0 and _within(gauss, 4.2e-3, 4.4e-3)
    return CriterionResult(3, "boundary p=1", ok,
                           {"exact_density": exact, "gaussian_density": gauss},
                           {"exact_density": "0 exactly", "gaussian_density": "[4.2e-3, 4.4e-3]"})


def criterion_4(**_) -> CriterionResult:
    d = TripartiteDims(2, 2, 4)
    exact = mi_exact(d).total
    lead = mi_leading(d)
    supp = (lead - exact) / lead
    ok = abs(exact - 0.278348) <= 5e-6 and lead == 9 / 32 and _within(supp, 0.009, 0.012)
    return CriterionResult(4, "two-qubit mutual information", ok,
                           {"mi_exact": exact, "mi_leading": lead, "suppression": supp},
                           {"mi_exact": "0.278348 +- 5e-6", "mi_leading": "9/32",
                            "suppression": "[0.009, 0.012]"})


def criterion_5(**_) -> CriterionResult:
    t0 = time.perf_counter()
    worst = 0.0
    j_ok = True
    worst_j = 0.0
    for d in grid_dims():
        closed = mi_closed_form(d).value
        worst = max(worst, abs(closed - mi_exact(d).total))
        jf, js = bose_einstein_J_folded(d), bose_einstein_J(d)
        gap = abs(jf.value - js.value)
        # combined quadrature estimates plus a few ulps of the values themselves
        allowed = (jf.abs_error_estimate + js.abs_error_estimate
                   + 4 * np.finfo(float).eps * max(abs(jf.value), abs(js.value)))
        worst_j = max(worst_j, gap)
        j_ok = j_ok and bool(gap <= allowed)
    runtime = time.perf_counter() - t0
    ok = worst <= 1e-10 and j_ok and runtime < 5.0
    return CriterionResult(5, "closed form vs exact on the 27-point grid", ok,
                           {"max_abs_diff": worst, "max_J_gap": worst_j,
                            "J_within_estimates": j_ok, "runtime_s": runtime},
                           {"max_abs_diff": "<= 1e-10", "J_within_estimates": True,
                            "runtime_s": "< 5"})


def criterion_6(bernoulli: BernoulliProvider | None = None, **_) -> CriterionResult:
    probe = mi_bernoulli_series(TripartiteDims(2, 2, 16), 20, bernoulli)
    coefs = [abs(c) for c in probe.coefficients[:5]]
    want = [Fraction(1, 12), Fraction(1, 120), Fraction(1, 252), Fraction(1, 240), Fraction(1, 132)]
    coef_ok = coefs == want
    alt_ok = True
    trunc_ok = True
    worst_ratio = 0.0
    for d in grid_dims():
        s = mi_bernoulli_series(d, 20, bernoulli)
        signs = [t > 0 for t in s.exact_terms]
        alt_ok = alt_ok and (not signs[0]) and all(x != y for x, y in zip(signs, signs[1:]))
        opt = optimal_truncation(d, bernoulli=bernoulli)
        err = abs(mi_exact_rational(d) - opt.exact_value)
        bound = 2 * abs(opt.exact_next_term)
        worst_ratio = max(worst_ratio, float(err / bound) if bound else math.inf)
        trunc_ok = trunc_ok and err <= bound
    ok = coef_ok and alt_ok and trunc_ok
    return CriterionResult(6, "series coefficients, signs, optimal truncation", ok,
                           {"coefficients": [str(c) for c in coefs], "alternating": alt_ok,
                            "max_err_over_2_next_term": worst_ratio},
                           {"coefficients": [str(c) for c in want], "alternating": True,
                            "max_err_over_2_next_term": "<= 1"})


def criterion_7(**_) -> CriterionResult:
    d = TripartiteDims(3, 4, 2)
    exact = mi_exact(d).total
    naive = mi_naive_factorized(d)
    ok = abs(exact - 1.378) <= 1e-3 and abs(naive - 2.483) <= 1e-3
    return CriterionResult(7, "swapped regime (3,4,2)", ok,
                           {"mi_exact": exact, "mi_naive_factorized": naive},
                           {"mi_exact": "1.378 +- 1e-3", "mi_naive_factorized": "2.483 +- 1e-3"})


def criterion_8(**_) -> CriterionResult:
    zero_ok = True
    for other in range(1, 7):
        for d_E in range(1, 9):
            for d in (TripartiteDims(1, other, d_E), TripartiteDims(other, 1, d_E)):
                zero_ok = zero_ok and mi_exact(d).total == 0.0
    bound_ok = all(mi_exact(d).total < mi_leading(d) for d in grid_dims())
    worst = 0.0
    for d in grid_dims():
        g1 = factor_G(d)
        g2 = factor_G(TripartiteDims(d.d_B, d.d_A, d.d_E))
        worst = max(worst, abs(g1 - g2))
    ok = zero_ok and bound_ok and worst <= 1e-13
    return CriterionResult(8, "factorization zeros, strict bound, G symmetry", ok,
                           {"zero_when_trivial": zero_ok, "exact_below_leading": bound_ok,
                            "max_G_asymmetry": worst},
                           {"zero_when_trivial": True, "exact_below_leading": True,
                            "max_G_asymmetry": "<= 1e-13"})


def criterion_9(bernoulli: BernoulliProvider | None = None, **_) -> CriterionResult:
    # psi(n+1) = H_n - gamma; H_n by a compensated running sum
    worst_h = 0.0
    acc, comp = 0.0, 0.0
    for n in range(1, 10_001):
        y = 1.0 / n - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        worst_h = max(worst_h, abs(special_fn.digamma(n + 1) - (acc - special_fn.EULER_GAMMA)))
    worst_b = max(abs(special_fn.digamma_binet(z) - special_fn.digamma(z + 1))
                  for z in range(1, 65))
    table = (bernoulli or special_fn.bernoulli_even)(10)
    bern_ok = list(table) == list(BERNOULLI_TABLE)
    zeta_ok = all(special_fn.zeta_negative_odd(k) == -BERNOULLI_TABLE[k - 1] / (2 * k)
                  for k in range(1, 11))
    ok = worst_h <= 1e-12 and worst_b <= 1e-9 and bern_ok and zeta_ok
    return CriterionResult(9, "special functions", ok,
                           {"digamma_vs_harmonic": worst_h, "binet_vs_digamma": worst_b,
                            "bernoulli_exact": bern_ok, "zeta_exact": zeta_ok},
                           {"digamma_vs_harmonic": "<= 1e-12", "binet_vs_digamma": "<= 1e-9",
                            "bernoulli_exact": True, "zeta_exact": True})


def _z(mean: float, target: float, se: float) -> float:
    return (mean - target) / se if se > 0 else (0.0 if mean == target else math.inf)


def criterion_10(seed: int = REPORT_SEED, samples: int = MC_SAMPLES, workers: int = 1,
                 **_) -> CriterionResult:
    d = SubsystemDims(2, 6)
    t0 = time.perf_counter()
    st = run_ensemble(d, samples, seed, workers)
    ks = ks_statistic(st, d)
    runtime = time.perf_counter() - t0
    ent = page_entropy(d.d_S, d.d_E)
    z = {
        "mean_P1": _z(float(st.pk.mean[0]), pk_moments(d).mean, float(st.pk.stderr[0])),
        "purity": _z(float(st.purity.mean), lubkin_purity(d).total, float(st.purity.stderr)),
        "von_neumann": _z(float(st.von_neumann.mean), ent.von_neumann,
                          float(st.von_neumann.stderr)),
        "diagonal": _z(float(st.diagonal.mean), ent.diagonal_entropy, float(st.diagonal.stderr)),
        "P_ln_P": max(abs(_z(float(m), dirichlet_plogp(d), float(s)))
                      for m, s in zip(st.pk_logpk.mean, st.pk_logpk.stderr)),
    }
    crit = ks_critical_value(st.count)
    ok = (all(abs(v) <= 4 for v in z.values()) and ks < crit
          and st.majorization_violations == 0 and runtime < 60)
    measured = {f"z_{k}": v for k, v in z.items()}
    measured.update({"ks": ks, "majorization_violations": st.majorization_violations,
                     "runtime_s": runtime})
    return CriterionResult(10, "Monte Carlo oracle, (2,6)", ok, measured,
                           {"abs_z": "<= 4", "ks": f"< {crit:.6g}",
                            "majorization_violations": 0, "runtime_s": "< 60"})


def criterion_11(seed: int = REPORT_SEED, samples: int = MC_SAMPLES, workers: int = 1,
                 **_) -> CriterionResult:
    worst_gen, worst_fam = 0.0, 0.0
    for d_S, d_E in ((2, 6), (3, 4), (4, 4)):
        d = SubsystemDims(d_S, d_E)
        st = run_ensemble(d, samples, seed, workers)
        target = bloch_variance_prediction(d_S, d.N).per_generator
        var = st.bloch.variance
        z_gen = np.abs(var - target) / st.bloch_sq.stderr
        worst_gen = max(worst_gen, float(z_gen.max()))
        worst_fam = max(worst_fam, abs(_z(float(st.family_gap.mean), 0.0,
                                          float(st.family_gap.stderr))))
    ok = worst_gen <= 5 and worst_fam <= 5
    return CriterionResult(11, "Bloch variance democracy", ok,
                           {"max_abs_z_generator": worst_gen, "max_abs_z_family_gap": worst_fam},
                           {"max_abs_z_generator": "<= 5", "max_abs_z_family_gap": "<= 5"})


def criterion_12(seed: int = REPORT_SEED, samples: int = MC_SAMPLES, workers: int = 1,
                 **_) -> CriterionResult:
    measured = {}
    ok = True
    for dims, target in ((TripartiteDims(2, 2, 4), 0.278348), (TripartiteDims(3, 4, 2), 1.378)):
        r = mi_ensemble(dims, samples, seed, workers)
        z = _z(r.mean_mi, target, r.stderr)
        key = f"({dims.d_A},{dims.d_B},{dims.d_E})"
        measured[key] = {"mean": r.mean_mi, "stderr": r.stderr, "z": z}
        ok = ok and abs(z) <= 4
    return CriterionResult(12, "tripartite Monte Carlo", ok, measured,
                           {"(2,2,4)": "0.278348 within 4 SE", "(3,4,2)": "1.378 within 4 SE"})


def criterion_13(seed: int = REPORT_SEED, **_) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(1000):
        a, b = (int(x) for x in rng.integers(2, 13, size=2))
        u = float(10.0 ** rng.uniform(-3, 3))
        chk = partial_fraction_check(a, b, u)
        worst = max(worst, abs(chk.lhs - chk.rhs) / max(1.0, abs(chk.lhs)))
    # Positivity is judged on the log of the integrand: far out in u it
    # underflows to 0.0 in double precision while remaining positive.
    min_val, min_log = math.inf, math.inf
    for d in grid_dims():
        f = folded_integrand(d)
        nodes = []

        def recording(u, f=f, nodes=nodes):
            nodes.append(np.array(u, dtype=float))
            return f(u)

        integrate_finite(recording, 0.0, math.sqrt(d.d_A * d.d_B), QuadConfig(abs_tol=1e-12))
        u = np.concatenate(nodes)
        min_val = min(min_val, float(np.min(f(u))))
        min_log = min(min_log, float(np.min(log_folded_integrand(d)(u))))
    ok = worst <= 1e-13 and min_val >= 0.0 and np.isfinite(min_log)
    return CriterionResult(13, "partial fractions and folded positivity", ok,
                           {"max_rel_diff": worst, "min_folded_integrand": min_val,
                            "min_log_folded_integrand": min_log},
                           {"max_rel_diff": "<= 1e-13", "min_folded_integrand": ">= 0 (no sign flip)",
                            "min_log_folded_integrand": "finite (strictly positive)"})


def _mc_output(argv: list[str]) -> bytes:
    from .cli import main

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return f"{code}\n{buf.getvalue()}".encode()


def criterion_14(seed: int = REPORT_SEED, **_) -> CriterionResult:
    argv = ["mc", "--mode", "subsystem", "--ds", "2", "--de", "6", "--samples", "20000",
            "--seed", str(seed), "--workers", "4", "--format", "json"]
    same_bytes = _mc_output(argv) == _mc_output(argv)
    d = SubsystemDims(3, 4)
    s1 = run_ensemble(d, 20_000, seed, 1)
    s4 = run_ensemble(d, 20_000, seed, 4)
    same_stats = all(
        np.array_equal(getattr(s1, name).mean, getattr(s4, name).mean)
        and np.array_equal(getattr(s1, name).m2, getattr(s4, name).m2)
        for name in ("pk", "pk_logpk", "purity", "von_neumann", "diagonal", "bloch",
                     "bloch_sq", "family_gap", "cross_moment"))
    same_stats = (same_stats and np.array_equal(s1.p1_hist, s4.p1_hist)
                  and np.array_equal(s1.p1_samples, s4.p1_samples))
    ok = same_bytes and same_stats
    return CriterionResult(14, "determinism", ok,
                           {"identical_output_bytes": same_bytes,
                            "identical_stats_workers_1_4": same_stats},
                           {"identical_output_bytes": True, "identical_stats_workers_1_4": True})


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12,
            criterion_13, criterion_14)


def run_report(seed: int = REPORT_SEED, workers: int = 1,
               bernoulli: BernoulliProvider | None = None,
               only: list[int] | None = None) -> list[CriterionResult]:
    """Run the acceptance battery; ``bernoulli`` swaps the Bernoulli provider (negative control)."""
    results = []
    for number, check in enumerate(CRITERIA, start=1):
        if only is not None and number not in only:
            continue
        t0 = time.perf_counter()
        res = check(seed=seed, workers=workers, bernoulli=bernoulli)
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
