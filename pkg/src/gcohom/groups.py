"""Finite permutation groups as indexed element tables, and subgroup embeddings.

Permutations are tuples of images of ``0..d-1``. Products compose right to
left, ``(a*b)(x) = a(b(x))``, so that permutation modules are left modules.
Element 0 is always the identity; the remaining elements appear in
breadth-first order of words in the generators, which makes every index
deterministic for a given generator list.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CapExceeded, GroupError

DEFAULT_ORDER_CAP = 1000
TABLE_LIMIT = 256

Perm = tuple


def identity_perm(d: int) -> Perm:
    return tuple(range(d))


def compose(a: Perm, b: Perm) -> Perm:
    return tuple(a[x] for x in b)


def perm_inverse(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def check_perm(a: Sequence[int]) -> Perm:
    a = tuple(int(x) for x in a)
    if sorted(a) != list(range(len(a))):
        raise GroupError(f"{a} is not a bijection of 0..{len(a) - 1}")
    return a


def pad(a: Perm, d: int) -> Perm:
    if len(a) > d:
        raise GroupError(f"permutation on {len(a)} points does not fit degree {d}")
    return tuple(a) + tuple(range(len(a), d))


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: Optional[int] = None) -> Perm:
    """Parse cycle notation such as ``"(0 1)(2 3 4)"``; ``"()"`` is the identity."""
    text = text.strip()
    cycles = []
    pos = 0
    for m in _CYCLE.finditer(text):
        if text[pos : m.start()].strip():
            raise GroupError(f"cannot parse cycle notation {text!r}")
        pos = m.end()
        body = m.group(1).replace(",", " ").split()
        cycles.append([int(x) for x in body])
    if text[pos:].strip() or not cycles and text:
        raise GroupError(f"cannot parse cycle notation {text!r}")
    top = max((x for c in cycles for x in c), default=-1) + 1
    d = top if degree is None else degree
    if d < top:
        raise GroupError(f"cycle {text!r} moves points beyond degree {d}")
    img = list(range(d))
    seen = set()
    for c in cycles:
        for x in c:
            if x in seen:
                raise GroupError(f"point {x} repeated in {text!r}")
            seen.add(x)
        for i, x in enumerate(c):
            img[x] = c[(i + 1) % len(c)]
    return tuple(img)


def cycle_string(a: Perm) -> str:
    seen = set()
    parts = []
    for start in range(len(a)):
        if start in seen or a[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        x = a[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = a[x]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


class FiniteGroup:
    """A finite permutation group with indexed elements.

    ``parent[i]`` and ``via[i]`` record the BFS tree: element ``i`` equals
    ``element(parent[i]) * generator(via[i])``.
    """

    def __init__(self, gens: Sequence[Perm], degree: int, order_cap: int = DEFAULT_ORDER_CAP, name: str = ""):
        self.degree = int(degree)
        self.gen_perms = [pad(check_perm(g), self.degree) for g in gens]
        self.name = name or f"<{len(self.gen_perms)} generators on {self.degree} points>"
        e = identity_perm(self.degree)
        elements = [e]
        index = {e: 0}
        parent = [-1]
        via = [-1]
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for k, g in enumerate(self.gen_perms):
                h = compose(elements[i], g)
                if h not in index:
                    if len(elements) >= order_cap:
                        raise CapExceeded(f"group order exceeds cap {order_cap}")
                    index[h] = len(elements)
                    elements.append(h)
                    parent.append(i)
                    via.append(k)
                    queue.append(index[h])
        self.elements = elements
        self._index = index
        self.parent = parent
        self.via = via
        self.identity_index = 0
        self.generators = [index[g] for g in self.gen_perms]
        self._perm_array = np.array(elements, dtype=np.int64).reshape(len(elements), self.degree)
        self.inv = np.array([index[perm_inverse(a)] for a in elements], dtype=np.int64)
        self._table = self._build_table() if len(elements) <= TABLE_LIMIT else None

    def _codes(self, perms: np.ndarray) -> np.ndarray:
        weights = self.degree ** np.arange(self.degree, dtype=np.int64)
        return perms @ weights

    @cached_property
    def _code_lookup(self):
        codes = self._codes(self._perm_array)
        order = np.argsort(codes)
        return codes[order], order

    def _lookup_codes(self, codes: np.ndarray) -> np.ndarray:
        sorted_codes, order = self._code_lookup
        pos = np.searchsorted(sorted_codes, codes)
        pos = np.minimum(pos, len(sorted_codes) - 1)
        if not np.array_equal(sorted_codes[pos], codes):
            raise GroupError("product left the group (table is not closed)")
        return order[pos]

    def _build_table(self) -> np.ndarray:
        n = len(self.elements)
        e = self._perm_array
        # composed[i, j] = e[i][e[j]]
        composed = e[np.arange(n)[:, None, None], e[None, :, :]]
        table = self._lookup_codes(self._codes(composed.reshape(n * n, self.degree)))
        table = table.reshape(n, n)
        table.flags.writeable = False
        return table

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def mult(self, i: int, j: int) -> int:
        if self._table is not None:
            return int(self._table[i, j])
        return self._index[compose(self.elements[i], self.elements[j])]

    def mult_many(self, i, j) -> np.ndarray:
        """Vectorized product of index arrays (broadcast)."""
        i, j = np.broadcast_arrays(np.asarray(i, dtype=np.int64), np.asarray(j, dtype=np.int64))
        if self._table is not None:
            return self._table[i, j]
        e = self._perm_array
        composed = np.take_along_axis(e[i.ravel()], e[j.ravel()], axis=1)
        return self._lookup_codes(self._codes(composed)).reshape(i.shape)

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            self._table = self._build_table()
        return self._table

    def index_of(self, perm: Sequence[int]) -> int:
        key = pad(check_perm(perm), self.degree)
        try:
            return self._index[key]
        except KeyError:
            raise GroupError(f"{cycle_string(key)} is not an element of {self.name}") from None

    def __contains__(self, perm) -> bool:
        try:
            self.index_of(perm)
        except GroupError:
            return False
        return True

    def word(self, i: int) -> list:
        """Generator positions whose left-to-right product is element ``i``."""
        out = []
        while i != 0:
            out.append(self.via[i])
            i = self.parent[i]
        return out[::-1]

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(self.mult(a, b) == self.mult(b, a) for a in gens for b in gens)

    def verify(self, full: Optional[bool] = None) -> None:
        """Check closure, identity, inverses and agreement with permutation composition."""
        n = self.order
        if len(set(self.elements)) != n:
            raise GroupError("duplicate elements")
        if full is None:
            full = n <= TABLE_LIMIT
        idx = np.arange(n)
        if not np.all(self.mult_many(idx, self.inv) == 0):
            raise GroupError("inverse table is wrong")
        pairs = [(i, j) for i in range(n) for j in range(n)] if full else [
            (i, j) for i in range(n) for j in self.generators
        ]
        for i, j in pairs:
            k = self.mult(i, j)
            if self.elements[k] != compose(self.elements[i], self.elements[j]):
                raise GroupError(f"mult({i}, {j}) disagrees with composition")

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


def group_from_generators(
    gens: Iterable[Sequence[int]], order_cap: int = DEFAULT_ORDER_CAP, degree: Optional[int] = None, name: str = ""
) -> FiniteGroup:
    """Closure of ``gens`` under composition."""
    gens = [check_perm(g) for g in gens]
    d = max([len(g) for g in gens] + [degree or 0, 1])
    return FiniteGroup(gens, d, order_cap=order_cap, name=name)


def cyclic(n: int, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    _check_n(n, order_cap, n)
    gen = tuple((i + 1) % n for i in range(n))
    return FiniteGroup([gen] if n > 1 else [], n, order_cap, name=f"C{n}")


def dihedral(n: int, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Dihedral group of order 2n (symmetries of an n-gon for n >= 3)."""
    _check_n(n, order_cap, 2 * n)
    if n == 1:
        gens, d = [(1, 0)], 2
    elif n == 2:
        gens, d = [(1, 0, 3, 2), (2, 3, 0, 1)], 4
    else:
        rot = tuple((i + 1) % n for i in range(n))
        ref = tuple((-i) % n for i in range(n))
        gens, d = [rot, ref], n
    return FiniteGroup(gens, d, order_cap, name=f"D{2 * n}")


def symmetric(n: int, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    _check_n(n, order_cap, factorial(n))
    if n == 1:
        gens = []
    elif n == 2:
        gens = [(1, 0)]
    else:
        gens = [(1, 0) + tuple(range(2, n)), tuple((i + 1) % n for i in range(n))]
    return FiniteGroup(gens, n, order_cap, name=f"Sym({n})")


def _check_n(n: int, cap: int, order: int):
    if n < 1:
        raise GroupError(f"n must be >= 1, got {n}")
    if order > cap:
        raise CapExceeded(f"group order {order} exceeds cap {cap}")


NAMED = {"cyclic": cyclic, "dihedral": dihedral, "symmetric": symmetric}


def named_group(kind: str, n: int, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    try:
        ctor = NAMED[kind]
    except KeyError:
        raise GroupError(f"unknown group kind {kind!r}; expected one of {sorted(NAMED)}") from None
    return ctor(int(n), order_cap=order_cap)


def nonzero_vectors(d: int, p: int) -> list:
    """Nonzero vectors of GF(p)^d in lexicographic order."""
    vecs = np.array(np.meshgrid(*[np.arange(p)] * d, indexing="ij")).reshape(d, -1).T
    return [tuple(int(x) for x in v) for v in vecs if any(v)]


def matrix_group(mats: Sequence, p: int, order_cap: int = DEFAULT_ORDER_CAP, name: str = "") -> FiniteGroup:
    """Permutation image of a matrix group acting on the nonzero vectors of GF(p)^d.

    The returned group's generators correspond one-to-one with ``mats``.
    """
    mats = [np.mod(np.asarray(m, dtype=np.int64), p) for m in mats]
    if not mats:
        raise GroupError("matrix_group needs at least one matrix")
    d = mats[0].shape[0]
    vecs = nonzero_vectors(d, p)
    pos = {v: i for i, v in enumerate(vecs)}
    gens = []
    for m in mats:
        if m.shape != (d, d):
            raise GroupError("matrices must share one square shape")
        img = []
        for v in vecs:
            w = tuple(int(x) for x in (m @ np.array(v)) % p)
            if w not in pos:
                raise GroupError("matrix is singular")
            img.append(pos[w])
        gens.append(check_perm(img))
    return FiniteGroup(gens, len(vecs), order_cap, name=name or f"<matrices over GF({p})>")


SL2_GENERATORS = ([[1, 1], [0, 1]], [[1, 0], [1, 1]])


def sl2(p: int, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """SL(2, p) on the p^2 - 1 nonzero vectors; generators are the two unitriangular matrices."""
    return matrix_group(SL2_GENERATORS, p, order_cap, name=f"SL(2,{p})")


@dataclass(frozen=True)
class SubgroupEmbedding:
    sub: FiniteGroup
    sup: FiniteGroup
    index_map: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.index_map, dtype=np.int64)
        m.flags.writeable = False
        object.__setattr__(self, "index_map", m)

    def verify(self) -> None:
        m = self.index_map
        if m.shape != (self.sub.order,):
            raise GroupError("index map has the wrong length")
        if len(set(m.tolist())) != len(m):
            raise GroupError("index map is not injective")
        n = self.sub.order
        if n * n <= 1 << 16:
            i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        else:
            i, j = np.meshgrid(np.arange(n), np.asarray(self.sub.generators), indexing="ij")
        lhs = m[self.sub.mult_many(i, j)]
        rhs = self.sup.mult_many(m[i], m[j])
        if not np.array_equal(lhs, rhs):
            raise GroupError("index map is not multiplicative")

    def then(self, outer: "SubgroupEmbedding") -> "SubgroupEmbedding":
        """Composite ``self.sub -> self.sup = outer.sub -> outer.sup``."""
        if outer.sub is not self.sup:
            raise GroupError("embeddings do not compose: middle groups differ")
        return SubgroupEmbedding(self.sub, outer.sup, outer.index_map[self.index_map])


def embed(sub_gens: Iterable[Sequence[int]], sup: FiniteGroup, name: str = "") -> SubgroupEmbedding:
    """Subgroup of ``sup`` generated by ``sub_gens`` together with its inclusion."""
    gens = [pad(check_perm(g), sup.degree) for g in sub_gens]
    for g in gens:
        sup.index_of(g)
    sub = FiniteGroup(gens, sup.degree, order_cap=sup.order, name=name)
    emb = SubgroupEmbedding(sub, sup, np.array([sup.index_of(a) for a in sub.elements], dtype=np.int64))
    emb.verify()
    return emb


def identity_embedding(g: FiniteGroup) -> SubgroupEmbedding:
    return SubgroupEmbedding(g, g, np.arange(g.order))


def point_stabilizer_chain(n: int, start: int = 1) -> list:
    """Embeddings Sym(start) < Sym(start+1) < ... < Sym(n), each stabilizing the trailing points."""
    top = symmetric(n)
    levels = [top]
    embs = []
    for m in range(n - 1, start - 1, -1):
        e = embed(_sym_gens(m, n), levels[0], name=f"Sym({m})")
        embs.insert(0, e)
        levels.insert(0, e.sub)
    return embs


def _sym_gens(m: int, n: int) -> list:
    if m <= 1:
        return []
    if m == 2:
        return [parse_cycles("(0 1)", n)]
    return [parse_cycles("(0 1)", n), parse_cycles("(" + " ".join(map(str, range(m))) + ")", n)]
