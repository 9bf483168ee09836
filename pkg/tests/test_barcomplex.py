from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from gcohom import barcomplex as bc
from gcohom import gmodules as gm
from gcohom.criteria import augmentation_ses
from gcohom.errors import CapExceeded, NotACocycle, NotExact
from gcohom.groups import cyclic, dihedral, embed, group_from_generators, symmetric

from oracles import closure, permutation_action, trivial_action, unnormalized_cohomology_dims

# Frozen from oracles.unnormalized_cohomology_dims (full inhomogeneous cochains
# on G^n, schoolbook elimination).  Keys: (group, module, p) -> dims H^0..H^2.
ORACLE_DIMS = {
    ("C2", "trivial", 2): [1, 1, 1],
    ("C2", "trivial", 3): [1, 0, 0],
    ("C3", "trivial", 3): [1, 1, 1],
    ("C3", "trivial", 2): [1, 0, 0],
    ("C4", "trivial", 2): [1, 1, 1],
    ("S3", "trivial", 2): [1, 1, 1],
    ("S3", "trivial", 3): [1, 0, 0],
    ("S3", "permutation", 2): [1, 1, 1],
    ("S3", "permutation", 3): [1, 0, 0],
    ("V4", "trivial", 2): [1, 2, 3],
    ("V4", "permutation", 2): [1, 0, 0],
}

GENS = {
    "C2": [(1, 0)],
    "C3": [(1, 2, 0)],
    "C4": [(1, 2, 3, 0)],
    "S3": [(1, 0, 2), (1, 2, 0)],
    "V4": [(1, 0, 3, 2), (2, 3, 0, 1)],
}


def _module(gname, mname, p):
    G = group_from_generators(GENS[gname], name=gname)
    return gm.trivial(G, p) if mname == "trivial" else gm.permutation(G, p)


@pytest.mark.parametrize("key", sorted(ORACLE_DIMS), ids=lambda k: "-".join(map(str, k)))
def test_cohomology_matches_unnormalized_oracle(key):
    gname, mname, p = key
    V = _module(gname, mname, p)
    assert [bc.cohomology(V, n).dim_H for n in range(3)] == ORACLE_DIMS[key]


def test_oracle_table_is_reproducible():
    # re-derive two entries so the frozen table cannot drift from the oracle
    S3 = closure(GENS["S3"], 3)
    assert unnormalized_cohomology_dims(S3, permutation_action(S3), 2, 2) == ORACLE_DIMS[("S3", "permutation", 2)]
    V4 = closure(GENS["V4"], 4)
    assert unnormalized_cohomology_dims(V4, trivial_action(V4), 2, 2) == ORACLE_DIMS[("V4", "trivial", 2)]


def test_first_coboundary_of_c2_is_zero():
    d = bc.coboundary(gm.trivial(cyclic(2), 2), 1).matrix
    assert d.shape == (1, 1) and d.is_zero()


def test_named_examples():
    assert bc.cohomology(gm.trivial(cyclic(2), 2), 1).dim_H == 1
    assert bc.cohomology(gm.trivial(cyclic(2), 3), 1).dim_H == 0
    assert bc.cohomology(gm.trivial(cyclic(3), 3), 2).dim_H == 1
    assert bc.cohomology(gm.permutation(symmetric(3), 2), 1).dim_H == 1
    assert bc.cohomology(gm.trivial(symmetric(2), 2), 1).dim_H == 1
    C2 = cyclic(2)
    assert bc.tor(gm.trivial(C2, 2), gm.trivial(C2, 2), 1).dim_H == 1


@pytest.mark.parametrize("p", [2, 3])
def test_complex_squares_to_zero(p):
    V = gm.regular(symmetric(3), p)
    for n in range(2):
        assert (bc.coboundary(V, n + 1).matrix @ bc.coboundary(V, n).matrix).is_zero()
        assert (bc.boundary(V, n + 1).matrix @ bc.boundary(V, n + 2).matrix).is_zero()


def test_homology_is_dual_to_cohomology():
    for p in (2, 3):
        V = gm.permutation(dihedral(4), p)
        for n in range(3):
            assert bc.homology(V, n).dim_H == bc.cohomology(gm.dual(V), n).dim_H


def test_additivity():
    G = symmetric(3)
    A, B = gm.trivial(G, 2), gm.permutation(G, 2)
    for n in range(3):
        assert bc.cohomology(gm.direct_sum(A, B), n).dim_H == bc.cohomology(A, n).dim_H + bc.cohomology(B, n).dim_H


def test_maschke_vanishing():
    G = symmetric(3)
    for V in (gm.trivial(G, 5), gm.permutation(G, 5), gm.regular(G, 7)):
        assert [bc.cohomology(V, n).dim_H for n in (1, 2)] == [0, 0]


def test_restriction_from_sym3_to_c3_is_zero():
    S3 = symmetric(3)
    e = embed([(1, 2, 0)], S3)
    res = bc.induced_restriction(bc.cohomology(gm.trivial(S3, 3), 1), e)
    assert res.shape == (1, 0)


def test_restriction_is_functorial():
    S4 = symmetric(4)
    e_mid = embed([(1, 0, 2, 3), (1, 2, 0, 3)], S4)
    e_low = embed([(1, 0, 2, 3)], e_mid.sub)
    V = gm.permutation(S4, 2)
    rng = np.random.default_rng(5)
    H = bc.cohomology(V, 1)
    coeffs = rng.integers(0, 2, size=H.dim_H)
    z = H.class_vector(coeffs)
    Vm = gm.restrict(V, e_mid)
    two_steps = bc.restrict_cochain(bc.restrict_cochain(z, V, 1, e_mid), Vm, 1, e_low)
    one_step = bc.restrict_cochain(z, V, 1, e_low.then(e_mid))
    assert np.array_equal(two_steps, one_step)


def test_coordinates_reject_non_cocycles():
    H = bc.cohomology(gm.trivial(cyclic(3), 3), 1)
    with pytest.raises(NotACocycle):
        H.coordinates([1, 0])


def test_degree_and_width_caps(monkeypatch):
    V = gm.trivial(cyclic(2), 2)
    with pytest.raises(CapExceeded):
        bc.cohomology(V, bc.settings.max_degree + 1)
    monkeypatch.setattr(bc.caps, "dense", 10)
    bc.cache.clear()
    with pytest.raises(CapExceeded):
        bc.cohomology(gm.regular(symmetric(3), 2), 1)
    bc.cache.clear()


def test_complex_shape_does_not_build():
    shape = bc.complex_shape(gm.permutation(symmetric(5), 2), 2)
    assert shape["delta_out"] == [8425795, 70805]
    assert not shape["fits_dense"]


@pytest.mark.parametrize("p", [2, 3])
def test_les_of_augmentation_is_exact(p):
    les = bc.long_exact_sequence(augmentation_ses(p), top_degree=2)
    assert les.exact
    assert len(les.nodes) == 9


def test_split_les_has_zero_connecting_maps():
    G = symmetric(3)
    les = bc.long_exact_sequence(bc.split_ses(gm.trivial(G, 2), gm.permutation(G, 2)), top_degree=2)
    assert les.exact
    assert all(m.is_zero() for _, m in les.connecting_maps())


def test_les_under_maschke_is_trivially_exact():
    G = symmetric(3)
    les = bc.long_exact_sequence(bc.split_ses(gm.trivial(G, 5), gm.trivial(G, 5)), top_degree=2)
    assert les.exact
    assert all(nd.dim == 0 for nd in les.nodes if not nd.name.startswith("H^0"))


def test_non_exact_input_is_reported():
    G = symmetric(3)
    A, C = gm.trivial(G, 2), gm.trivial(G, 2)
    ses = bc.split_ses(A, C)
    bad = bc.ShortExactSequence(A, ses.B, C, ses.inc, np.zeros_like(ses.proj))
    with pytest.raises(NotExact, match="surjective"):
        bad.validate()


def test_result_cache_computes_each_key_once():
    cache = bc.ResultCache()
    calls = []
    lock = threading.Lock()
    barrier = threading.Barrier(8)

    def compute():
        with lock:
            calls.append(1)
        return 42

    def worker(_):
        barrier.wait()
        return cache.get_or_compute(("k",), compute)

    with ThreadPoolExecutor(8) as pool:
        results = list(pool.map(worker, range(8)))
    assert results == [42] * 8
    assert len(calls) == 1


def test_concurrent_cohomology_calls_agree():
    bc.cache.clear()
    V = gm.permutation(symmetric(4), 2)
    with ThreadPoolExecutor(6) as pool:
        dims = list(pool.map(lambda n: bc.cohomology(V, n % 3).dim_H, range(12)))
    assert dims == [bc.cohomology(V, n % 3).dim_H for n in range(12)]
