from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gcohom import exactla as la
from gcohom.errors import CapExceeded, DimensionMismatch, ModulusMismatch

from oracles import annihilator_set, rank_mod_p, span_set


def M(rows, p):
    return la.FpMatrix(rows, p)


# -- scalars ----------------------------------------------------------------


def test_scalar_arithmetic_and_inverse():
    a, b = la.FpScalar(3, 7), la.FpScalar(5, 7)
    assert int(a + b) == 1 and int(a * b) == 1 and int(a - b) == 5
    assert int(a.inverse()) == 5
    with pytest.raises(ZeroDivisionError):
        la.FpScalar(0, 7).inverse()


def test_scalar_modulus_mismatch():
    with pytest.raises(ModulusMismatch):
        la.FpScalar(1, 2) + la.FpScalar(1, 3)


def test_prime_checks():
    assert la.check_prime(97) == 97
    with pytest.raises(ValueError):
        la.check_prime(4)
    with pytest.raises(CapExceeded):
        la.check_prime(101)


# -- rank / kernel / annihilator / solve: fixed examples --------------------


def test_rank_examples():
    assert la.rank(la.FpMatrix.identity(3, 2)) == 3
    assert la.rank(la.FpMatrix.zeros(4, 5, 3)) == 0
    assert la.rank(M([[1, 1], [1, 1]], 2)) == 1


def test_kernel_examples():
    assert la.kernel_basis(la.FpMatrix.identity(3, 5)).dim == 0
    assert la.kernel_basis(la.FpMatrix.zeros(3, 3, 5)).dim == 3
    K = la.kernel_basis(M([[1, 1, 0], [0, 0, 1]], 2))
    assert K.dim == 1
    assert K.basis.tolist() == [[1, 1, 0]]


def test_annihilator_examples():
    assert la.annihilator(la.Subspace.full(4, 3)).dim == 0
    assert la.annihilator(la.Subspace.zero(4, 3)).dim == 4


def test_annihilator_matches_exhaustive_enumeration():
    # all 27 functionals on GF(3)^3 checked by the oracle
    ann = la.annihilator(la.Subspace.span([[1, 1, 0]], 3, 3))
    expected = annihilator_set([(1, 1, 0)], 3, 3)
    assert ann.dim == 2
    assert span_set(ann.basis.tolist(), 3, 3) == expected


def test_solve_examples():
    b = np.array([1, 2, 3])
    assert la.solve(la.FpMatrix.identity(3, 5), b).tolist() == [1, 2, 3]
    assert la.solve(la.FpMatrix.zeros(3, 3, 5), b) is None
    rng = np.random.default_rng(7)
    m = la.random_matrix(rng, 6, 6, 5)
    x0 = rng.integers(0, 5, size=6)
    rhs = m @ x0
    x = la.solve(m, rhs)
    assert np.array_equal(m @ x, rhs)


def test_solve_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        la.solve(la.FpMatrix.identity(3, 5), [1, 2])


def test_matrix_modulus_and_shape_errors():
    with pytest.raises(ModulusMismatch):
        M([[1]], 2) @ M([[1]], 3)
    with pytest.raises(DimensionMismatch):
        M([[1, 0]], 3) @ M([[1, 0]], 3)
    with pytest.raises(ModulusMismatch):
        la.sum_subspace(la.Subspace.zero(1, 2), la.Subspace.zero(1, 3))


def test_sparse_and_dense_agree():
    rng = np.random.default_rng(3)
    dense = rng.integers(0, 3, size=(40, 30)) * (rng.random((40, 30)) < 0.1)
    a = la.FpMatrix(dense, 3)
    b = la.FpMatrix(dense, 3, sparse=True)
    assert b.is_sparse and not a.is_sparse
    assert la.rank(a) == la.rank(b)
    assert la.kernel_basis(a) == la.kernel_basis(b)
    assert np.array_equal((b @ b.T).dense(), (a @ a.T).dense())


def test_quotient_and_intersection():
    p = 3
    u = la.Subspace.span([[1, 0, 0], [0, 1, 0]], 3, p)
    w = la.Subspace.span([[1, 1, 0]], 3, p)
    q = la.quotient_basis(u, w)
    assert q.dim == 1 and la.sum_subspace(q, w) == u
    v = la.Subspace.span([[0, 1, 0], [0, 0, 1]], 3, p)
    assert la.intersect_subspace(u, v) == la.Subspace.span([[0, 1, 0]], 3, p)
    with pytest.raises(ValueError):
        la.quotient_basis(w, u)


def test_quotient_of_full_space_fast_path():
    p = 5
    w = la.Subspace.span([[1, 2, 0, 0], [0, 0, 1, 4]], 4, p)
    q = la.quotient_basis(la.Subspace.full(4, p), w)
    assert q.dim == 2 and la.sum_subspace(q, w) == la.Subspace.full(4, p)


def test_large_prime_blas_path_is_exact():
    # entries near p force the float64 product path
    rng = np.random.default_rng(0)
    p = 97
    a = rng.integers(0, p, size=(60, 700))
    b = rng.integers(0, p, size=(700, 50))
    exact = (a.astype(object) @ b.astype(object)) % p
    assert np.array_equal((la.FpMatrix(a, p) @ la.FpMatrix(b, p)).dense(), exact.astype(np.int64))


def test_dense_width_cap(monkeypatch):
    monkeypatch.setattr(la.caps, "dense", 8)
    with pytest.raises(CapExceeded):
        la.kernel_basis(la.FpMatrix.zeros(2, 9, 2))


# -- properties -------------------------------------------------------------

primes = st.sampled_from([2, 3, 5, 7])


@st.composite
def matrices(draw, max_side=9):
    p = draw(primes)
    r = draw(st.integers(1, max_side))
    c = draw(st.integers(1, max_side))
    entries = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return la.FpMatrix(np.array(entries).reshape(r, c), p)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_oracle_and_transpose(m):
    r = la.rank(m)
    assert r == rank_mod_p(m.dense().tolist(), m.p)
    assert r == la.rank(m.T)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_nullity_and_kernel(m):
    K = la.kernel_basis(m)
    assert K.dim + la.rank(m) == m.cols
    if K.dim:
        assert (m @ la.FpMatrix(K.basis.T, m.p)).is_zero()


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_double_annihilator_is_identity(m):
    S = la.row_space(m)
    assert la.annihilator(la.annihilator(S)) == S
    assert la.annihilator(S).dim + S.dim == m.cols


@settings(max_examples=150, deadline=None)
@given(matrices(), st.integers(0, 2**32 - 1))
def test_solve_iff_in_image(m, seed):
    rng = np.random.default_rng(seed)
    b = rng.integers(0, m.p, size=m.rows)
    x = la.solve(m, b)
    in_image = la.image_basis(m).contains(b)
    assert (x is not None) == in_image
    if x is not None:
        assert np.array_equal(m @ x, b)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_blocked_elimination_agrees_with_oracle(seed, p):
    # wide enough to cross block boundaries, small enough for the oracle
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 30))
    m = la.random_matrix(rng, 70, k, p) @ la.random_matrix(rng, k, 90, p)
    assert la.rank(m) == rank_mod_p(m.dense().tolist(), p)
    red, r = la.rref(m)
    red2, _ = la.rref(la.FpMatrix(red, p))
    assert np.array_equal(red, red2)
    assert r == la.rank(m)
