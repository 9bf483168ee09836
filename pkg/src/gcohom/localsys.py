"""Truncated local systems: finite subgroup chains, localization and splicing of
cochains, the homology colimit check, and survival of cohomology classes under
restriction along a chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .barcomplex import (
    cohomology,
    corestriction_chain,
    homology,
    induced_restriction,
    restrict_cochain,
    tuple_count,
    tuple_digits,
    encode,
)
from .errors import GroupError, IncompatibleFamily, ModuleError
from .exactla import FpMatrix, Subspace, quotient_basis, rank, sum_subspace
from .gmodules import GModule, coinvariant_space, fixed_points, restrict, trivial
from .groups import FiniteGroup, SubgroupEmbedding, identity_embedding


class SubgroupChain:
    """L_0 < L_1 < ... < L_m with the embeddings between consecutive levels."""

    def __init__(self, embeddings: Sequence[SubgroupEmbedding], top: Optional[FiniteGroup] = None, top_is_G: bool = True):
        embeddings = list(embeddings)
        if embeddings:
            levels = [e.sub for e in embeddings] + [embeddings[-1].sup]
        elif top is not None:
            levels = [top]
        else:
            raise GroupError("a chain needs at least one level")
        for a, b in zip(embeddings, embeddings[1:]):
            if a.sup is not b.sub:
                raise GroupError("consecutive embeddings do not share a level")
        for e in embeddings:
            e.verify()
        self.levels = levels
        self.embeddings = embeddings
        self.top_is_G = top_is_G
        to_top = [identity_embedding(levels[-1])]
        for e in reversed(embeddings):
            to_top.insert(0, e.then(to_top[0]))
        self.to_top = to_top
        for e in self.to_top:
            if len(set(e.index_map.tolist())) != e.sub.order:
                raise GroupError("composite embedding is not injective")

    @property
    def top(self) -> FiniteGroup:
        return self.levels[-1]

    def __len__(self):
        return len(self.levels)

    def level_modules(self, V: GModule) -> list:
        if V.group is not self.top:
            raise ModuleError("module is not over the chain's top group")
        return [restrict(V, e) for e in self.to_top[:-1]] + [V]

    def __repr__(self):
        return "SubgroupChain(" + " < ".join(f"{g.name}[{g.order}]" for g in self.levels) + ")"


@dataclass
class CochainFamily:
    degree: int
    module: GModule  # over the chain's top group
    chain: SubgroupChain
    cochains: list  # per level, values in the restricted module

    def compatibility_violation(self) -> Optional[int]:
        """First level i with cochains[i+1] restricted to L_i != cochains[i], else None."""
        mods = self.chain.level_modules(self.module)
        for i, e in enumerate(self.chain.embeddings):
            down = restrict_cochain(self.cochains[i + 1], mods[i + 1], self.degree, e)
            if not np.array_equal(np.mod(down, self.module.p), np.mod(self.cochains[i], self.module.p)):
                return i
        return None

    def is_compatible(self) -> bool:
        return self.compatibility_violation() is None


def localize(phi, V: GModule, n: int, chain: SubgroupChain) -> CochainFamily:
    """phi -> {phi restricted to L} over every level of the chain."""
    if V.group is not chain.top:
        raise GroupError("cochain group is not the chain's top group")
    phi = np.mod(np.asarray(phi, dtype=np.int64), V.p)
    cochains = [restrict_cochain(phi, V, n, e) for e in chain.to_top[:-1]] + [phi]
    return CochainFamily(n, V, chain, cochains)


def splice(fam: CochainFamily) -> np.ndarray:
    """Reassemble a compatible family into one cochain on the top group.

    Each tuple is evaluated on the lowest level containing all its entries.
    """
    chain = fam.chain
    if not chain.top_is_G:
        raise GroupError("splicing needs a chain whose top level is the ambient group")
    bad = fam.compatibility_violation()
    if bad is not None:
        raise IncompatibleFamily(
            f"family is incompatible along {chain.levels[bad].name} < {chain.levels[bad + 1].name} (levels {bad} < {bad + 1})"
        )
    G, V, n = chain.top, fam.module, fam.degree
    m = G.order - 1
    # lowest level containing each element of G, and its index there
    level_of = np.full(G.order, len(chain) - 1, dtype=np.int64)
    local_index = [np.full(G.order, -1, dtype=np.int64) for _ in chain.levels]
    for i in range(len(chain) - 1, -1, -1):
        imap = chain.to_top[i].index_map
        level_of[imap] = i
        local_index[i][imap] = np.arange(imap.size)
    digits = tuple_digits(m, n)
    where = level_of[digits].max(axis=1) if n else np.zeros(1, dtype=np.int64)
    out = np.zeros((digits.shape[0], V.dim), dtype=np.int64)
    for i in range(len(chain)):
        rows = np.flatnonzero(where == i)
        if rows.size == 0:
            continue
        local_digits = local_index[i][digits[rows]]
        loc = encode(local_digits, chain.levels[i].order - 1)
        vals = np.asarray(fam.cochains[i], dtype=np.int64).reshape(-1, V.dim)
        out[rows] = vals[loc]
    return np.mod(out.ravel(), V.p)


# ---------------------------------------------------------------------------
# homology colimits


def _bar_tensor_action(V: GModule, n: int, s: int) -> np.ndarray:
    """Matrix of element s on P_n (x) V, where P_n is free on the degree-n normalized tuples.

    Basis order: (group element h, tuple t, coordinate of V); s sends h (x) t (x) v to sh (x) t (x) sv.
    """
    G = V.group
    block = np.zeros((G.order, G.order), dtype=np.int64)
    block[G.table[s], np.arange(G.order)] = 1
    return np.kron(np.kron(block, np.eye(tuple_count(G, n), dtype=np.int64)), V.action[s])


def _coinvariants_for(V: GModule, n: int, elements: Sequence[int], size: int) -> Subspace:
    p = V.p
    eye = np.eye(size, dtype=np.int64)
    rows = [((_bar_tensor_action(V, n, g) - eye) % p).T for g in elements]
    if not rows:
        return Subspace.zero(size, p)
    return Subspace.span(np.concatenate(rows), size, p)


@dataclass
class ColimitReport:
    degree: int
    coinvariant_contained: list = field(default_factory=list)
    coinvariant_surjective: list = field(default_factory=list)
    coinvariants_sum: bool = False
    level_dims: list = field(default_factory=list)
    colimit_dim: int = 0
    top_dim: int = 0
    global_dim: int = 0

    @property
    def passed(self) -> bool:
        return (
            all(self.coinvariant_contained)
            and all(self.coinvariant_surjective)
            and self.coinvariants_sum
            and self.colimit_dim == self.top_dim == self.global_dim
        )


def homology_colimit_report(chain: SubgroupChain, V: GModule, n: int) -> ColimitReport:
    if not chain.top_is_G:
        raise GroupError("the colimit check needs a chain whose top level is the ambient group")
    G = chain.top
    p = V.p
    rep = ColimitReport(n)

    # (a) coinvariants of P_n (x) V: every level maps onto the G-coinvariants,
    # and the level-wise coinvariant spaces sum to the global one
    size = G.order * tuple_count(G, n) * V.dim
    K_G = _coinvariants_for(V, n, G.generators, size)
    full = Subspace.full(size, p)
    target = quotient_basis(full, K_G)
    level_spaces = []
    for e in chain.to_top:
        gens = [int(e.index_map[s]) for s in e.sub.generators]
        K_L = _coinvariants_for(V, n, gens, size)
        level_spaces.append(K_L)
        rep.coinvariant_contained.append(K_G.contains_subspace(K_L))
        source = quotient_basis(full, K_L)
        images = K_G.reduce(source.basis) if source.dim else np.zeros((0, size), dtype=np.int64)
        coords = target.coordinates(images) if source.dim else np.zeros((0, target.dim), dtype=np.int64)
        rep.coinvariant_surjective.append(rank(FpMatrix(coords.reshape(source.dim, target.dim), p)) == target.dim)
    total = level_spaces[0]
    for K in level_spaces[1:]:
        total = sum_subspace(total, K)
    rep.coinvariants_sum = total == K_G

    # (b) colimit of H_n(L_0) -> ... -> H_n(L_m), computed from the corestriction maps
    mods = chain.level_modules(V)
    res = [homology(M, n) for M in mods]
    rep.level_dims = [r.dim_H for r in res]
    offsets = np.concatenate([[0], np.cumsum(rep.level_dims)])
    total_dim = int(offsets[-1])
    relations = []
    for i, e in enumerate(chain.embeddings):
        for k, z in enumerate(res[i].cycle_reps):
            pushed = corestriction_chain(z, mods[i + 1], n, e)
            coords = res[i + 1].coordinates(pushed)
            row = np.zeros(total_dim, dtype=np.int64)
            row[offsets[i] + k] = 1
            row[offsets[i + 1] : offsets[i + 2]] = (-coords) % p
            relations.append(row)
    rel_rank = rank(FpMatrix(np.array(relations).reshape(len(relations), total_dim), p)) if relations else 0
    rep.colimit_dim = total_dim - rel_rank
    rep.top_dim = rep.level_dims[-1]
    rep.global_dim = homology(V, n).dim_H
    return rep


def homology_colimit_check(chain: SubgroupChain, V: GModule, n: int) -> bool:
    return homology_colimit_report(chain, V, n).passed


# ---------------------------------------------------------------------------
# survival of classes under restriction


@dataclass
class SurvivalReport:
    degree: int
    level_names: list
    level_dims: list
    image_dims: list  # image_dims[i][j]: rank of H^n(L_j) -> H^n(L_i), j >= i (None below)
    stable_dims: list
    notes: list = field(default_factory=list)

    def monotone(self) -> bool:
        for i, row in enumerate(self.image_dims):
            vals = [v for v in row[i:]]
            if any(a < b for a, b in zip(vals, vals[1:])):
                return False
        return True

    def __add__(self, other: "SurvivalReport") -> "SurvivalReport":
        def add(a, b):
            return None if a is None else a + b

        return SurvivalReport(
            self.degree,
            self.level_names,
            [a + b for a, b in zip(self.level_dims, other.level_dims)],
            [[add(a, b) for a, b in zip(r, s)] for r, s in zip(self.image_dims, other.image_dims)],
            [a + b for a, b in zip(self.stable_dims, other.stable_dims)],
        )

    def as_table(self) -> list:
        rows = []
        for i, name in enumerate(self.level_names):
            rows.append(
                {
                    "level": i,
                    "group": name,
                    "dim_H": self.level_dims[i],
                    "image_dims": [v for v in self.image_dims[i][i:]],
                    "stable": self.stable_dims[i],
                }
            )
        return rows


def restriction_maps(chain: SubgroupChain, V: GModule, n: int) -> list:
    """Consecutive restriction matrices H^n(L_{i+1}) -> H^n(L_i)."""
    mods = chain.level_modules(V)
    return [induced_restriction(cohomology(mods[i + 1], n), e) for i, e in enumerate(chain.embeddings)]


def survival_analysis(chain: SubgroupChain, V: GModule, n: int) -> SurvivalReport:
    mods = chain.level_modules(V)
    dims = [cohomology(M, n).dim_H for M in mods]
    steps = restriction_maps(chain, V, n)
    size = len(chain)
    image_dims = [[None] * size for _ in range(size)]
    for i in range(size):
        composite = FpMatrix.identity(dims[i], V.p)
        image_dims[i][i] = dims[i]
        for j in range(i + 1, size):
            composite = composite @ steps[j - 1]
            image_dims[i][j] = rank(composite) if composite.rows and composite.cols else 0
    stable = [image_dims[i][size - 1] for i in range(size)]
    notes = ["coboundaries of a truncated chain with top element splice to coboundaries; B(G) -> B(L) is an equality here"]
    return SurvivalReport(n, [g.name for g in chain.levels], dims, image_dims, stable, notes)


# ---------------------------------------------------------------------------
# hypotheses of the finitary corollaries


@dataclass
class HypothesisRecord:
    U_equals_coinvariants: Optional[bool]
    dim_U: Optional[int]
    dim_coinvariants_U: Optional[int]
    dim_H1_trivial: int
    hom_to_k_vanishes: bool
    level_names: list
    level_H1_dims: list
    level_fixed_dims: list

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def hypothesis_checks(target, U: Optional[GModule] = None, V: Optional[GModule] = None, p: Optional[int] = None) -> HypothesisRecord:
    """(a) whether [U,G] = U; (b) dim H^1(G, k); (c) per level dim H^1(L, V) and dim C_V(L).

    ``target`` is a FiniteGroup or a SubgroupChain (G is its top).
    """
    chain = target if isinstance(target, SubgroupChain) else SubgroupChain([], top=target)
    G = chain.top
    if p is None:
        p = (U or V).p if (U or V) is not None else None
    if p is None:
        raise ValueError("a field characteristic is needed when no module is given")
    u_eq = du = dcu = None
    if U is not None:
        cu = coinvariant_space(U)
        du, dcu = U.dim, cu.dim
        u_eq = cu.dim == U.dim
    h1k = cohomology(trivial(G, p), 1).dim_H
    h1_levels, fixed_levels = [], []
    if V is not None:
        for M in chain.level_modules(V):
            h1_levels.append(cohomology(M, 1).dim_H)
            fixed_levels.append(fixed_points(M).dim)
    return HypothesisRecord(u_eq, du, dcu, h1k, h1k == 0, [g.name for g in chain.levels], h1_levels, fixed_levels)
