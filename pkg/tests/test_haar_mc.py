import math

import numpy as np
import pytest
import scipy.special as sc
import scipy.stats as ss
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from typicality.dims import SubsystemDims, TripartiteDims
from typicality.errors import ConvergenceError, DomainError, InsufficientSamplesError
from typicality.haar_mc import (BLOCK_SIZE, CounterStream, Moments, ReducedDensity,
                                bloch_components, complex_normals, entropies, gellmann_basis,
                                hermitian_eigenvalues, jacobi_eigvalsh, ks_critical_value,
                                ks_distance, ks_statistic, mi_ensemble, partial_trace,
                                philox4x64, run_ensemble, sample_state, uniforms)
from typicality.haar_mc import ensemble as ens
from typicality.haar_mc.states import PureState, sample_coefficients
from typicality.mutual_info import mi_exact
from typicality.pclt import BetaLaw, pk_law
from typicality.spectral import (bloch_variance_prediction, dirichlet_cross_moment,
                                 dirichlet_plogp, lubkin_purity, page_entropy)


# random numbers ---------------------------------------------------------------

@pytest.mark.parametrize("seed", [0, 1, 2 ** 63 + 17])
@pytest.mark.parametrize("ctr", [(0, 0, 0, 0), (5, 7, 9, 0), (2 ** 64 - 3, 3, 1, 0)])
def test_philox_matches_numpy(seed, ctr):
    # numpy increments the counter before producing a block
    bg = np.random.Philox(key=np.array([seed, 0], dtype=np.uint64),
                         counter=np.array(ctr, dtype=np.uint64))
    ref = bg.random_raw(8).reshape(2, 4)
    first = np.array(ctr, dtype=np.uint64)
    first[0] += np.uint64(1)
    second = first.copy()
    second[0] += np.uint64(1)
    got = philox4x64(np.stack([first, second]), (seed, 0))
    assert np.array_equal(got, ref)


def test_uniforms_open_interval_and_moments():
    u = uniforms(3, np.arange(20_000), 16)
    assert u.shape == (20_000, 16)
    assert np.all((u > 0) & (u < 1))
    assert u.mean() == pytest.approx(0.5, abs=5 * math.sqrt(1 / 12 / u.size))
    assert ss.kstest(u.ravel()[:50_000], "uniform").pvalue > 1e-3


def test_streams_independent_of_batching():
    idx = np.arange(100, 140)
    whole = complex_normals(9, idx, 7)
    parts = np.concatenate([complex_normals(9, idx[:13], 7), complex_normals(9, idx[13:], 7)])
    assert np.array_equal(whole, parts)
    one = CounterStream(9, 117).complex_normals(7)
    assert np.array_equal(one, whole[17])
    assert not np.array_equal(complex_normals(9, idx, 7, tag=1), whole)


def test_complex_normals_are_standard():
    z = complex_normals(1, np.arange(50_000), 4).ravel()
    assert ss.kstest(z.real, "norm").pvalue > 1e-3
    assert ss.kstest(z.imag, "norm").pvalue > 1e-3


# states ---------------------------------------------------------------------------

def test_sample_state_normalised_and_deterministic():
    dims = SubsystemDims(3, 5)
    s = sample_state(dims, CounterStream(4, 11))
    assert s.coefficients.shape == (3, 5)
    assert np.sum(np.abs(s.coefficients) ** 2) == pytest.approx(1.0, abs=1e-12)
    again = sample_state(dims, CounterStream(4, 11))
    assert np.array_equal(s.coefficients, again.coefficients)
    batch = sample_coefficients(4, np.array([10, 11]), 15)[1]
    assert np.array_equal(batch.reshape(3, 5), s.coefficients)


def test_single_qubit_population_mean():
    c = sample_coefficients(0, np.arange(100_000), 2)
    w = np.abs(c[:, 0]) ** 2
    assert w.mean() == pytest.approx(0.5, abs=5 * w.std() / math.sqrt(w.size))


def test_partial_trace_examples():
    d = SubsystemDims(2, 2)
    bell = np.array([[1, 0], [0, 1]], dtype=complex) / math.sqrt(2)
    assert np.allclose(partial_trace(PureState(bell, d)).entries, np.eye(2) / 2, atol=1e-15)
    phi = np.array([0.6, 0.8j])
    prod = np.outer([1, 0, 0], phi)
    rho = partial_trace(PureState(prod, SubsystemDims(3, 2))).entries
    assert np.allclose(rho, np.diag([1.0, 0, 0]), atol=1e-15)
    rnd = partial_trace(sample_state(SubsystemDims(4, 7), CounterStream(2, 0))).entries
    assert np.trace(rnd).real == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(rnd, rnd.conj().T)


# eigenvalues ----------------------------------------------------------------------

def _rho(m):
    m = np.asarray(m, dtype=complex)
    return ReducedDensity(m, SubsystemDims(m.shape[0], 1))


def test_eigen_examples():
    assert np.allclose(hermitian_eigenvalues(_rho(np.diag([0.3, 0.7]))), [0.7, 0.3], atol=1e-15)
    assert np.allclose(hermitian_eigenvalues(_rho([[0.5, 0.5], [0.5, 0.5]])), [1, 0], atol=1e-15)


def _cubic_roots(h):
    # trigonometric roots of the characteristic polynomial of a Hermitian 3x3
    q = np.trace(h).real / 3
    b = h - q * np.eye(3)
    p = math.sqrt(np.sum(np.abs(b) ** 2).real / 6)
    r = np.linalg.det(b / p).real / 2
    phi = math.acos(min(1.0, max(-1.0, r))) / 3
    e1 = q + 2 * p * math.cos(phi)
    e3 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    return np.array([e1, 3 * q - e1 - e3, e3])


def _random_hermitian(rng, d):
    x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (x + x.conj().T) / 2


def test_jacobi_vs_cubic_formula():
    rng = np.random.default_rng(8)
    for _ in range(200):
        h = _random_hermitian(rng, 3)
        assert np.allclose(jacobi_eigvalsh(h), _cubic_roots(h), atol=1e-10, rtol=0)


@pytest.mark.parametrize("d", [2, 4, 7, 16, 33])
def test_jacobi_vs_numpy_batched(d):
    rng = np.random.default_rng(d)
    h = np.stack([_random_hermitian(rng, d) for _ in range(20)])
    ours = jacobi_eigvalsh(h)
    ref = np.linalg.eigvalsh(h)[:, ::-1]
    assert np.allclose(ours, ref, atol=1e-11 * np.abs(ref).max())


@given(arrays(np.float64, (4, 4), elements=st.floats(-1, 1)),
       arrays(np.float64, (4, 4), elements=st.floats(-1, 1)))
def test_jacobi_property(re, im):
    h = (re + 1j * im)
    h = (h + h.conj().T) / 2
    lam = jacobi_eigvalsh(h)
    assert np.all(np.diff(lam) <= 0)
    assert lam.sum() == pytest.approx(np.trace(h).real, abs=1e-12)
    assert np.allclose(lam, np.linalg.eigvalsh(h)[::-1], atol=1e-12)


def test_jacobi_rank_deficient_denormals():
    h = np.zeros((3, 3), dtype=complex)
    h[0, 0] = 1.0
    h[1, 2] = h[2, 1] = 1e-310 + 1e-310j
    assert np.allclose(jacobi_eigvalsh(h), [1, 0, 0], atol=1e-15)


def test_jacobi_sweep_budget():
    rng = np.random.default_rng(0)
    with pytest.raises(ConvergenceError):
        jacobi_eigvalsh(_random_hermitian(rng, 6), max_sweeps=1)


def test_eigenvalue_size_limit():
    with pytest.raises(DomainError):
        hermitian_eigenvalues(_rho(np.eye(65) / 65))


def test_random_reduced_spectrum():
    rho = partial_trace(sample_state(SubsystemDims(5, 9), CounterStream(1, 3)))
    lam = hermitian_eigenvalues(rho)
    assert lam.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all((lam >= -1e-10) & (lam <= 1 + 1e-10))


# entropies and Bloch --------------------------------------------------------------

@pytest.mark.parametrize("d", [2, 3, 5])
def test_entropies_maximally_mixed(d):
    e = entropies(_rho(np.eye(d) / d))
    assert e.von_neumann == pytest.approx(math.log(d), abs=1e-14)
    assert e.diagonal == pytest.approx(math.log(d), abs=1e-14)
    assert e.purity == pytest.approx(1 / d, abs=1e-15)


def test_entropies_pure_and_schur_gap():
    e = entropies(_rho(np.diag([1.0, 0.0, 0.0])))
    assert (e.von_neumann, e.diagonal, e.purity) == (0.0, 0.0, 1.0)
    e = entropies(_rho([[0.5, 0.5], [0.5, 0.5]]))
    assert e.von_neumann == pytest.approx(0.0, abs=1e-14)
    assert e.diagonal == pytest.approx(math.log(2), abs=1e-15)


@given(st.integers(2, 5), st.integers(1, 6), st.integers(0, 10 ** 6))
def test_entropies_schur(d_S, d_E, idx):
    rho = partial_trace(sample_state(SubsystemDims(d_S, d_E), CounterStream(5, idx)))
    e = entropies(rho)
    assert e.von_neumann <= e.diagonal + 1e-10
    lam = np.linalg.eigvalsh(rho.entries)
    lam = lam[lam > 1e-15]
    assert e.von_neumann == pytest.approx(-np.sum(lam * np.log(lam)), abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_gellmann_orthonormal(d):
    b = gellmann_basis(d)
    g = b.generators
    assert g.shape == (d * d - 1, d, d)
    assert (b.cartan_count, b.offdiag_count) == (d - 1, d * (d - 1))
    gram = np.einsum("aij,bji->ab", g, g)
    assert np.allclose(gram, 2 * np.eye(d * d - 1), atol=1e-12)
    assert np.allclose(np.einsum("aii->a", g), 0, atol=1e-12)
    assert np.allclose(g, np.conj(np.swapaxes(g, 1, 2)))
    for c in b.cartan:
        assert np.count_nonzero(c - np.diag(np.diag(c))) == 0


def test_gellmann_qubit_is_pauli():
    b = gellmann_basis(2)
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]])
    assert np.allclose(b.generators, [sx, sy, sz])
    assert np.allclose(b.cartan, [sz])
    with pytest.raises(DomainError):
        gellmann_basis(1)


def test_bloch_examples():
    b3 = gellmann_basis(3)
    assert np.allclose(bloch_components(_rho(np.eye(3) / 3), b3), 0, atol=1e-15)
    r = bloch_components(_rho(np.diag([1.0, 0.0])), gellmann_basis(2))
    assert np.allclose(r, [0, 0, 1], atol=1e-15)
    with pytest.raises(DomainError):
        bloch_components(_rho(np.eye(2) / 2), b3)


@given(st.integers(2, 6), st.integers(1, 8), st.integers(0, 10 ** 6))
def test_bloch_reconstruction_and_purity(d, d_E, idx):
    rho = partial_trace(sample_state(SubsystemDims(d, d_E), CounterStream(6, idx)))
    basis = gellmann_basis(d)
    r = bloch_components(rho, basis)
    rebuilt = np.eye(d) / d + 0.5 * np.einsum("a,aij->ij", r, basis.generators)
    assert np.allclose(rebuilt, rho.entries, atol=1e-10, rtol=0)
    assert 1 / d + 0.5 * np.sum(r * r) == pytest.approx(entropies(rho).purity, abs=1e-10)


# accumulators ---------------------------------------------------------------------

@given(arrays(np.float64, st.integers(2, 60), elements=st.floats(-1e3, 1e3)),
       st.integers(1, 59))
def test_moments_merge_matches_numpy(x, cut):
    cut = min(cut, x.size - 1)
    m = Moments.of(x[:cut]).merge(Moments.of(x[cut:]))
    assert m.count == x.size
    assert m.mean == pytest.approx(x.mean(), abs=1e-9)
    assert m.variance == pytest.approx(x.var(ddof=1), rel=1e-9, abs=1e-9)


def test_moments_merge_associative():
    rng = np.random.default_rng(1)
    a, b, c = (Moments.of(rng.standard_normal((n, 3))) for n in (5, 17, 40))
    left, right = a.merge(b).merge(c), a.merge(b.merge(c))
    assert left.count == right.count
    assert np.allclose(left.mean, right.mean, rtol=1e-13)
    assert np.allclose(left.m2, right.m2, rtol=1e-13)


def _stats_equal(s, t):
    for name in ("pk", "pk_logpk", "purity", "von_neumann", "diagonal", "bloch", "bloch_sq",
                 "family_gap", "cross_moment"):
        a, b = getattr(s, name), getattr(t, name)
        if not (a.count == b.count and np.array_equal(a.mean, b.mean)
                and np.array_equal(a.m2, b.m2)):
            return False
    return (s.count == t.count and np.array_equal(s.p1_hist, t.p1_hist)
            and np.array_equal(s.p1_samples, t.p1_samples)
            and s.majorization_violations == t.majorization_violations)


def test_ensemble_deterministic_across_workers():
    dims = SubsystemDims(3, 4)
    n = 3 * BLOCK_SIZE + 100
    ref = run_ensemble(dims, n, seed=7, workers=1)
    assert _stats_equal(ref, run_ensemble(dims, n, seed=7, workers=1))
    assert _stats_equal(ref, run_ensemble(dims, n, seed=7, workers=3))
    assert not _stats_equal(ref, run_ensemble(dims, n, seed=8, workers=1))


def test_ensemble_merge_counts():
    dims = SubsystemDims(2, 3)
    a = run_ensemble(dims, 500, seed=1)
    b = run_ensemble(dims, 700, seed=2)
    m = a.merge(b)
    assert m.count == 1200 and m.p1_hist.sum() == 1200 and m.p1_samples.size == 1200
    with pytest.raises(DomainError):
        a.merge(run_ensemble(SubsystemDims(2, 4), 10, seed=1))


def test_ensemble_validation():
    with pytest.raises(DomainError):
        run_ensemble(SubsystemDims(2, 2), 0, seed=0)
    with pytest.raises(DomainError):
        run_ensemble(SubsystemDims(1, 2), 10, seed=0)


# ensemble physics ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def qubit6():
    return run_ensemble(SubsystemDims(2, 6), 100_000, seed=2024)


def test_population_and_purity(qubit6):
    s = qubit6
    sigma = math.sqrt(1 / 52 / 1e5)
    assert abs(s.pk.mean[0] - 0.5) <= 4 * sigma
    assert abs(s.purity.mean - 8 / 13) <= 4 * s.purity.stderr
    assert s.majorization_violations == 0


def test_entropies_and_moments(qubit6):
    s = qubit6
    dims = SubsystemDims(2, 6)
    assert abs(s.von_neumann.mean - page_entropy(2, 6).von_neumann) <= 4 * s.von_neumann.stderr
    diag = sc.digamma(13) - sc.digamma(7)
    assert abs(s.diagonal.mean - diag) <= 4 * s.diagonal.stderr
    assert np.all(np.abs(s.pk_logpk.mean - dirichlet_plogp(dims)) <= 4 * s.pk_logpk.stderr)
    cm = s.cross_moment
    assert abs(cm.mean - dirichlet_cross_moment(12)) <= 4 * cm.stderr


@pytest.mark.slow
@pytest.mark.parametrize("dims", [(2, 6), (3, 4), (4, 4)])
def test_bloch_democracy(dims):
    d_S, d_E = dims
    s = run_ensemble(SubsystemDims(d_S, d_E), 100_000, seed=11)
    target = bloch_variance_prediction(d_S, d_S * d_E).per_generator
    assert np.all(np.abs(s.bloch_sq.mean - target) <= 5 * s.bloch_sq.stderr)
    assert abs(s.family_gap.mean) <= 5 * s.family_gap.stderr
    assert abs(s.purity.mean - lubkin_purity(SubsystemDims(d_S, d_E)).total) <= 4 * s.purity.stderr
    assert s.majorization_violations == 0


def test_mi_ensemble_values():
    r = mi_ensemble(TripartiteDims(2, 2, 4), 20_000, seed=3, workers=2)
    assert r.count == 20_000
    assert abs(r.mean_mi - mi_exact(TripartiteDims(2, 2, 4)).total) <= 4 * r.stderr
    z = mi_ensemble(TripartiteDims(1, 2, 4), 3000, seed=3)
    assert abs(z.mean_mi) <= 1e-12


def test_mi_ensemble_swapped_regime():
    r = mi_ensemble(TripartiteDims(3, 4, 2), 20_000, seed=5)
    assert abs(r.mean_mi - 1.378) <= 4 * r.stderr + 5e-4


# KS --------------------------------------------------------------------------------------

def test_ks_critical_value():
    assert ks_critical_value(10_000) == pytest.approx(1.6276 / 100, rel=1e-4)
    assert ks_critical_value(10_000) < 1.63 / 100


def test_ks_subsystem_samples():
    dims = SubsystemDims(2, 6)
    s = run_ensemble(dims, 10_000, seed=99)
    d = ks_statistic(s, dims)
    assert d < ks_critical_value(10_000)
    law = pk_law(dims)
    ref = ss.kstest(s.p1_samples, ss.beta(law.alpha, law.beta).cdf).statistic
    assert d == pytest.approx(ref, abs=1e-12)


def test_ks_self_test_and_negative_control():
    rng = np.random.default_rng(4)
    x = rng.beta(6, 6, size=10_000)
    assert ks_distance(x, BetaLaw(6, 6)) < ks_critical_value(10_000)
    assert ks_distance(x, BetaLaw(1, 1)) > 5 * ks_critical_value(10_000)


def test_ks_histogram_fallback(monkeypatch):
    monkeypatch.setattr(ens, "RESERVOIR_CAP", 3000)
    dims = SubsystemDims(2, 6)
    s = run_ensemble(dims, 10_000, seed=99)
    assert s.p1_samples.size == 3000
    d_hist = ks_statistic(s, dims)
    monkeypatch.undo()
    d_full = ks_statistic(run_ensemble(dims, 10_000, seed=99), dims)
    # binning can only hide the largest gap by the mass of one bin
    law = pk_law(dims)
    edges = np.linspace(0, 1, ens.HIST_BINS + 1)
    bin_mass = np.max(np.diff(law.cdf(edges)))
    assert d_full - bin_mass - 1e-12 <= d_hist <= d_full + 1e-12


def test_ks_insufficient_samples():
    s = run_ensemble(SubsystemDims(2, 6), 500, seed=1)
    with pytest.raises(InsufficientSamplesError):
        ks_statistic(s)
    with pytest.raises(InsufficientSamplesError):
        ks_distance([], BetaLaw(2, 2))
