from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import elementary_symmetric_bruteforce, lambdas_from_eigvals, pfaffian_expansion
from sdforms.errors import FormError
from sdforms.exterior import KForm
from sdforms.selfdual import haar_orthogonal, random_skew, random_ssd, random_with_spectrum
from sdforms.skew import (SkewForm, elementary_symmetric, eq21_residuals, invariants,
                          maclaurin_gaps, pfaffian, spectrum)


def S(dim, terms):
    return SkewForm.from_terms(dim, terms)


@pytest.mark.parametrize("terms, lambdas, pf", [
    ({(1, 2): 1, (3, 4): 1}, [1, 1], 1.0),
    ({(1, 2): 2, (3, 4): 1}, [2, 1], 2.0),
    ({(1, 2): 1, (3, 4): -1}, [1, 1], -1.0),
])
def test_spectrum_examples(terms, lambdas, pf):
    sp = spectrum(S(4, terms))
    np.testing.assert_allclose(sp.lambdas, lambdas, rtol=0, atol=1e-15)
    assert sp.pfaffian == pf


def test_pfaffian_sign_convention():
    assert pfaffian(SkewForm.standard(8)) == 1.0
    assert pfaffian(S(4, {(1, 2): 1, (3, 4): -1})) == -1.0
    assert pfaffian(SkewForm(np.zeros((6, 6)))) == 0.0


@pytest.mark.parametrize("dim", [4, 6, 8])
def test_pfaffian_matches_expansion_and_det(dim):
    rng = np.random.default_rng(dim)
    for _ in range(50):
        w = random_skew(dim, rng)
        pf = pfaffian(w)
        assert pf == pytest.approx(pfaffian_expansion(w.matrix), rel=1e-11)
        det = np.linalg.det(w.matrix)
        assert abs(pf ** 2 - det) <= 1e-8 * abs(det)


@pytest.mark.parametrize("dim", [10, 12])
def test_pfaffian_squared_is_det_large(dim):
    rng = np.random.default_rng(dim)
    for _ in range(50):
        w = random_skew(dim, rng)
        det = np.linalg.det(w.matrix)
        assert abs(pfaffian(w) ** 2 - det) <= 1e-8 * abs(det)


def test_pfaffian_needs_pivoting():
    # zero in the leading position: unpivoted elimination would divide by zero
    w = S(4, {(1, 3): 1.0, (2, 4): 1.0})
    assert pfaffian(w) == pfaffian_expansion(w.matrix) == -1.0


@pytest.mark.parametrize("dim", [4, 8, 12])
def test_lambdas_match_general_eigensolver(dim):
    rng = np.random.default_rng(dim)
    for _ in range(20):
        w = random_skew(dim, rng)
        np.testing.assert_allclose(spectrum(w).lambdas, lambdas_from_eigvals(w.matrix),
                                   rtol=1e-10)


def test_lambda_product_is_abs_pfaffian():
    rng = np.random.default_rng(0)
    for dim in (4, 6, 8, 10, 12):
        for _ in range(20):
            sp = spectrum(random_skew(dim, rng))
            assert np.prod(sp.lambdas) == pytest.approx(abs(sp.pfaffian), rel=1e-9)
            assert np.all(sp.lambdas >= 0) and np.all(np.diff(sp.lambdas) <= 0)


def test_invariants_examples():
    inv = invariants(S(4, {(1, 2): 2, (3, 4): 1}))
    np.testing.assert_allclose(inv.s, [5, 4])
    np.testing.assert_allclose(inv.q, [2.5, 4])
    for dim in (4, 6, 8, 10, 12):
        n = dim // 2
        inv = invariants(SkewForm.standard(dim))
        np.testing.assert_allclose(inv.s, [comb(n, i) for i in range(1, n + 1)], rtol=1e-14)
        np.testing.assert_allclose(inv.q, 1.0, rtol=1e-14)
    assert not np.any(invariants(SkewForm(np.zeros((8, 8)))).s)


def test_elementary_symmetric_matches_bruteforce():
    rng = np.random.default_rng(1)
    for m in range(1, 7):
        x = rng.uniform(0, 3, m)
        np.testing.assert_allclose(elementary_symmetric(x), elementary_symmetric_bruteforce(x),
                                   rtol=1e-13)


def test_eq21_examples():
    for w in (S(4, {(1, 2): 1, (3, 4): 1}), S(4, {(1, 2): 2, (3, 4): 1}),
              S(4, {(1, 2): 1, (3, 4): -1}), SkewForm.standard(8)):
        assert max(eq21_residuals(w)) < 1e-9
    assert eq21_residuals(SkewForm(np.zeros((6, 6)))) == [0.0, 0.0, 0.0]
    w = random_skew(12, seed=5, scale=1e3)
    assert max(eq21_residuals(w)) < 1e-8


def test_kform_round_trip_exact():
    rng = np.random.default_rng(2)
    a = KForm(8, 2, rng.standard_normal(28))
    assert SkewForm.from_kform(a).kform == a
    w = random_skew(8, rng)
    assert SkewForm.from_kform(w.kform).matrix.tobytes() == w.matrix.tobytes()


def test_construction_antisymmetrizes_and_validates():
    m = np.arange(16.0).reshape(4, 4)
    w = SkewForm(m)
    np.testing.assert_array_equal(w.matrix, -w.matrix.T)
    with pytest.raises(FormError):
        SkewForm(np.zeros((5, 5)))
    with pytest.raises(FormError):
        SkewForm.from_kform(KForm(4, 3))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([4, 6, 8, 10, 12]), st.integers(0, 2**32 - 1),
       st.sampled_from([1, -1]))
def test_orthogonal_invariance(dim, seed, det):
    rng = np.random.default_rng(seed)
    w = random_skew(dim, rng)
    q = haar_orthogonal(dim, rng, det=det)
    a, b = spectrum(w), spectrum(w.conjugate(q))
    np.testing.assert_allclose(b.lambdas, a.lambdas, rtol=1e-9, atol=1e-12)
    assert b.pfaffian == pytest.approx(det * a.pfaffian, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([4, 6, 8, 10, 12]), st.integers(0, 2**32 - 1),
       st.floats(-5, 5).filter(lambda c: abs(c) > 1e-2))
def test_scaling(dim, seed, c):
    w = random_skew(dim, seed)
    a, b = spectrum(w), spectrum(c * w)
    np.testing.assert_allclose(b.lambdas, abs(c) * a.lambdas, rtol=1e-10)
    assert b.pfaffian == pytest.approx(c ** (dim // 2) * a.pfaffian, rel=1e-10)


@pytest.mark.parametrize("dim", [4, 6, 8, 10, 12])
def test_maclaurin_chain_holds(dim):
    rng = np.random.default_rng(dim)
    for _ in range(200):
        inv = invariants(random_skew(dim, rng))
        chain, newton = maclaurin_gaps(inv)
        q1 = inv.q[0]
        assert np.all(chain >= -1e-10 * q1)
        assert all(g >= -1e-10 * q1 ** (2 * r) for r, g in enumerate(newton, start=1))


@pytest.mark.parametrize("dim", [4, 6, 8, 10, 12])
def test_maclaurin_equality_iff_equal_lambdas(dim):
    inv = invariants(random_ssd(dim, 1.7, seed=dim))
    chain, newton = maclaurin_gaps(inv)
    assert np.all(np.abs(chain) <= 1e-10 * inv.q[0])
    assert np.all(np.abs(newton) <= 1e-10 * inv.q[0] ** np.arange(2, 2 * len(inv.q), 2))
    # converse: a single split level opens a gap
    lam = np.ones(dim // 2)
    lam[-1] = 0.5
    inv = invariants(random_with_spectrum(lam, seed=dim))
    chain, newton = maclaurin_gaps(inv)
    assert chain.max() > 1e-3 or newton.max() > 1e-3
