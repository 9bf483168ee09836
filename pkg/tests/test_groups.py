from __future__ import annotations

import numpy as np
import pytest

from gcohom import groups as gr
from gcohom.errors import CapExceeded, GroupError

from oracles import closure


def test_generated_groups():
    assert gr.group_from_generators([(1, 0)]).order == 2
    assert gr.group_from_generators([(1, 0, 2, 3), (1, 2, 3, 0)]).order == 24
    assert gr.group_from_generators([]).order == 1


def test_named_groups():
    assert gr.cyclic(3).order == 3
    assert gr.symmetric(4).order == 24
    assert gr.dihedral(4).order == 8
    assert gr.sl2(3).order == 24
    assert gr.named_group("symmetric", 3).order == 6


def test_order_cap_and_bad_generator():
    with pytest.raises(CapExceeded):
        gr.symmetric(5, order_cap=100)
    with pytest.raises(ValueError):
        gr.group_from_generators([(0, 0, 1)])


@pytest.mark.parametrize("G", [gr.cyclic(4), gr.symmetric(3), gr.dihedral(4), gr.sl2(3)], ids=lambda g: g.name)
def test_table_agrees_with_closure_oracle(G):
    G.verify(full=True)
    assert sorted(G.elements) == sorted(closure(G.gen_perms, G.degree))
    for i in range(G.order):
        for j in range(G.order):
            assert G.elements[G.mult(i, j)] == gr.compose(G.elements[i], G.elements[j])
        assert G.mult(i, int(G.inv[i])) == G.identity_index


def test_words_reconstruct_elements():
    G = gr.symmetric(4)
    for i in range(G.order):
        acc = G.identity_index
        for k in G.word(i):
            acc = G.mult(acc, G.generators[k])
        assert acc == i


def test_cycle_notation_roundtrip():
    a = gr.parse_cycles("(0 1 2)(3 4)", 6)
    assert a == (1, 2, 0, 4, 3, 5)
    assert gr.parse_cycles(gr.cycle_string(a), 6) == a


def test_embeddings():
    S4 = gr.symmetric(4)
    e = gr.embed([(1, 0, 2, 3), (1, 2, 0, 3)], S4)
    assert e.sub.order == 6
    ident = gr.identity_embedding(S4)
    assert np.array_equal(ident.index_map, np.arange(24))
    t = gr.embed([(0, 1, 3, 2)], S4)
    assert t.sub.order == 2


def test_embedding_rejects_outside_generator():
    C4 = gr.cyclic(4)
    with pytest.raises(GroupError):
        gr.embed([(1, 0, 2, 3)], C4)


def test_point_stabilizer_chain_composes():
    embs = gr.point_stabilizer_chain(4, 2)
    assert [e.sub.order for e in embs] == [2, 6]
    composite = embs[0].then(embs[1])
    composite.verify()
    assert composite.sup.order == 24
