from __future__ import annotations

import numpy as np
import pytest

from gcohom import barcomplex as bc
from gcohom import duality as du
from gcohom import exactla as la
from gcohom import gmodules as gm
from gcohom.criteria import sl2_natural
from gcohom.errors import NotACocycle, NotACycle
from gcohom.groups import cyclic, embed, symmetric


def test_pairing_on_c2_is_nonzero():
    C2 = cyclic(2)
    k = gm.trivial(C2, 2)
    cert = du.duality_certificate(k, k, 1)
    assert cert.matrix.shape == (1, 1)
    assert int(cert.matrix.entry(0, 0)) != 0


def test_pair_distinguishes_bad_inputs():
    C2 = cyclic(2)
    k = gm.trivial(C2, 3)
    # over GF(3): Hom(C2, k) = 0, and the boundary of [g|g] is 2[g]
    size = bc.tuple_count(C2, 1)
    with pytest.raises(NotACocycle):
        du.pair(np.ones(size), np.zeros(size), k, k, 1)
    size = bc.tuple_count(C2, 2)
    with pytest.raises(NotACycle):
        du.pair(np.zeros(size), np.ones(size), k, k, 2)


def test_pair_with_zero_and_with_coboundary():
    G = symmetric(3)
    X = gm.permutation(G, 2)
    Y = gm.trivial(G, 2)
    H = gm.hom(X, gm.dual(Y))
    T = gm.tensor(X, Y)
    Ext = bc.cohomology(H, 1)
    Tor = bc.homology(T, 1)
    assert Ext.dim_H == Tor.dim_H == 1
    f, z = Ext.cocycle_reps[0], Tor.cycle_reps[0]
    assert int(du.pair(f, z, X, Y, 1)) != 0
    assert int(du.pair(np.zeros_like(f), z, X, Y, 1)) == 0
    assert int(du.pair(f, np.zeros_like(z), X, Y, 1)) == 0
    rng = np.random.default_rng(11)
    c0 = rng.integers(0, 2, size=bc.cochain_dim(H, 0))
    cob = bc.coboundary(H, 0).matrix @ c0
    assert int(du.pair(cob, z, X, Y, 1)) == 0
    c2 = rng.integers(0, 2, size=bc.cochain_dim(T, 2))
    bnd = bc.boundary(T, 2).matrix @ c2
    assert int(du.pair(f, bnd, X, Y, 1)) == 0
    # well defined on classes
    assert int(du.pair((f + cob) % 2, (z + bnd) % 2, X, Y, 1)) == int(du.pair(f, z, X, Y, 1))


def test_certificate_under_maschke_is_empty():
    G = symmetric(3)
    k = gm.trivial(G, 5)
    cert = du.duality_certificate(k, k, 1)
    assert cert.dim_ext == cert.dim_tor == 0 and cert.nonsingular


@pytest.mark.parametrize("n", [0, 1, 2])
def test_sym3_trivial_p2_nonsingular(n):
    k = gm.trivial(symmetric(3), 2)
    cert = du.duality_certificate(k, k, n)
    assert cert.matrix.rows == cert.matrix.cols == 1
    assert cert.nonsingular


def test_cyclic3_restricted_permutation_module():
    S3 = symmetric(3)
    e = embed([(1, 2, 0)], S3)
    X = gm.restrict(gm.permutation(S3, 3), e)
    Y = gm.trivial(e.sub, 3)
    cert = du.duality_certificate(X, Y, 1)
    assert cert.dim_ext == cert.dim_tor


def test_lemma2_examples():
    p = 5
    zero = la.FpMatrix.zeros(4, 4, p)
    assert du.lemma2_check(zero).passed
    assert la.kernel_basis(zero).dim == 4 and la.image_basis(zero.T).dim == 0
    assert du.lemma2_check(la.FpMatrix.identity(4, p)).passed
    rng = np.random.default_rng(2)
    for _ in range(20):
        assert du.lemma2_check(la.random_matrix(rng, 6, 6, p)).passed


def test_lemma2_rejects_non_square():
    with pytest.raises(ValueError):
        du.lemma2_check(la.FpMatrix.zeros(2, 3, 2))


def test_coinvariant_annihilator_identity():
    k = gm.trivial(symmetric(3), 2, dim=2)
    lhs, rhs = du.corollary6_sides(k)
    assert lhs == rhs == la.Subspace.full(2, 2)

    V = gm.permutation(symmetric(3), 2)
    lhs, rhs = du.corollary6_sides(V)
    assert gm.coinvariant_space(gm.dual(V)).dim == 2
    assert lhs == rhs and lhs.dim == 1
    assert lhs.contains([1, 1, 1])

    lhs, rhs = du.corollary6_sides(sl2_natural(3))
    assert lhs.dim == rhs.dim == 0
    assert du.corollary6_check(sl2_natural(3))
