from __future__ import annotations

import numpy as np
import pytest

from gcohom import exactla as la
from gcohom import gmodules as gm
from gcohom.criteria import grid
from gcohom.errors import CapExceeded, ModuleError
from gcohom.groups import SL2_GENERATORS, cyclic, dihedral, sl2, symmetric

from oracles import all_subspaces, completely_reducible, dimension, is_invariant, perm_matrix, span_set


def test_constructors():
    assert gm.permutation(symmetric(3), 2).dim == 3
    assert gm.regular(cyclic(4), 2).dim == 4
    nat = gm.from_matrices(sl2(3), SL2_GENERATORS, 3)
    assert nat.dim == 2


def test_relation_violation_rejected():
    C3 = cyclic(3)
    with pytest.raises(ModuleError):
        gm.from_matrices(C3, [[[0, 1], [1, 0]]], 2)  # order 2 element for an order 3 generator
    with pytest.raises(ModuleError):
        gm.from_matrices(C3, [[[1, 1], [1, 1]]], 2)


def test_fixed_points():
    assert gm.fixed_points(gm.permutation(symmetric(4), 3)).dim == 1
    assert gm.fixed_points(gm.regular(dihedral(4), 5)).dim == 1
    nat = gm.from_matrices(sl2(3), SL2_GENERATORS, 3)
    assert gm.fixed_points(nat).dim == 0


def test_coinvariant_space():
    assert gm.coinvariant_space(gm.trivial(symmetric(3), 2, dim=3)).dim == 0
    assert gm.coinvariant_space(gm.permutation(symmetric(3), 2)).dim == 2
    assert gm.coinvariant_space(gm.regular(cyclic(2), 2)).dim == 1


def test_spin():
    V = gm.permutation(symmetric(3), 3)
    assert gm.spin(V, [[1, 1, 1]]).dim == 1
    assert gm.spin(V, [[0, 0, 0]]).dim == 0
    assert gm.spin(V, [[1, 2, 0]]).dim == 2


def test_dual_tensor_hom_are_modules():
    G = dihedral(4)
    V = gm.permutation(G, 3)
    for M in (gm.dual(V), gm.tensor(V, V), gm.hom(V, gm.dual(V)), gm.direct_sum(V, gm.trivial(G, 3))):
        M.verify()
    assert gm.tensor(V, V).dim == 16
    with pytest.raises(ModuleError):
        gm.tensor(V, gm.trivial(cyclic(4), 3))


def test_complement_exists_under_maschke():
    V = gm.permutation(symmetric(3), 5)
    for W in gm.submodule_lattice(V):
        pi = gm.find_complement(W)
        assert pi is not None
        assert pi @ pi == pi


def test_complement_of_full_module_is_identity():
    V = gm.permutation(symmetric(3), 3)
    W = gm.Submodule(V, la.Subspace.full(3, 3))
    assert gm.find_complement(W) == la.FpMatrix.identity(3, 3)


def test_no_complement_matches_exhaustive_search():
    # oracle: none of the 13 planes of GF(3)^3 is invariant and meets the trivial line trivially
    p = 3
    mats = [perm_matrix((1, 0, 2)), perm_matrix((1, 2, 0))]
    line = span_set([(1, 1, 1)], 3, p)
    planes = [S for S in all_subspaces(3, p) if dimension(S, p) == 2]
    assert len(planes) == 13
    assert not any(is_invariant(S, mats, p) and len(S & line) == 1 for S in planes)

    V = gm.permutation(symmetric(3), p)
    assert gm.find_complement(gm.spin(V, [[1, 1, 1]])) is None


def test_lattice_matches_exhaustive_invariant_subspaces():
    for p in (2, 3):
        mats = [perm_matrix((1, 0, 2)), perm_matrix((1, 2, 0))]
        expected = {S for S in all_subspaces(3, p) if is_invariant(S, mats, p)}
        V = gm.permutation(symmetric(3), p)
        got = {span_set(W.space.basis.tolist(), 3, p) for W in gm.submodule_lattice(V)}
        assert got == expected
    dims = [W.dim for W in gm.submodule_lattice(gm.permutation(symmetric(3), 3))]
    assert dims == [0, 1, 2, 3]


def test_lattice_small_cases_and_bound():
    assert [W.dim for W in gm.submodule_lattice(gm.trivial(cyclic(2), 2))] == [0, 1]
    assert len(gm.submodule_lattice(gm.trivial(cyclic(2), 2, dim=2))) == 5
    with pytest.raises(CapExceeded):
        gm.submodule_lattice(gm.regular(symmetric(3), 3), bound=100)


def test_complete_reducibility():
    assert gm.is_completely_reducible(gm.permutation(symmetric(3), 5))
    assert not gm.is_completely_reducible(gm.permutation(symmetric(3), 3))
    assert gm.is_completely_reducible(gm.trivial(symmetric(3), 3, dim=2))


def test_quotient_module_dimensions():
    V = gm.permutation(symmetric(3), 2)
    W = gm.spin(V, [[1, 1, 0]])
    Q, proj = gm.quotient_module(W)
    assert Q.dim == 1 and proj.shape == (1, 3)
    assert gm.is_module_hom(proj, V, Q)
    assert not np.any((proj @ gm.inclusion_matrix(W)) % 2)


# Frozen from oracles.completely_reducible (all subspaces enumerated, every
# invariant one searched for an invariant complement); grid modules with p^dim <= 81.
REDUCIBLE = {
    ("C2", "trivial", 2): True, ("C2", "permutation", 2): False, ("C2", "regular", 2): False,
    ("C2", "trivial", 3): True, ("C2", "permutation", 3): True, ("C2", "regular", 3): True,
    ("C3", "trivial", 2): True, ("C3", "permutation", 2): True, ("C3", "regular", 2): True,
    ("C3", "trivial", 3): True, ("C3", "permutation", 3): False, ("C3", "regular", 3): False,
    ("Sym(3)", "trivial", 2): True, ("Sym(3)", "permutation", 2): True, ("Sym(3)", "regular", 2): False,
    ("Sym(3)", "trivial", 3): True, ("Sym(3)", "permutation", 3): False,
    ("D8", "trivial", 2): True, ("D8", "permutation", 2): False,
    ("D8", "trivial", 3): True, ("D8", "permutation", 3): True,
}


def test_complete_reducibility_matches_exhaustive_oracle():
    seen = set()
    for gname, mname, p, V in grid():
        key = (gname, mname, p)
        if p**V.dim > 81:
            continue
        seen.add(key)
        assert gm.is_completely_reducible(V) == REDUCIBLE[key], key
    assert seen == set(REDUCIBLE)


def test_reducibility_oracle_is_reproducible():
    V = gm.permutation(dihedral(4), 2)
    mats = [a.tolist() for a in V.generator_matrices]
    assert completely_reducible(mats, V.dim, 2) == REDUCIBLE[("D8", "permutation", 2)]


def test_dual_is_an_involution():
    for _, _, _, V in grid():
        assert np.array_equal(gm.dual(gm.dual(V)).action, V.action)


def test_invariant_homs_to_trivial():
    # dim Hom_G(U, k) = dim U - dim [U, G]
    for _, _, p, U in grid():
        k = gm.trivial(U.group, p)
        assert gm.fixed_points(gm.hom(U, k)).dim == U.dim - gm.coinvariant_space(U).dim
        assert gm.hom_g_dim(U, k) == U.dim - gm.coinvariant_space(U).dim
