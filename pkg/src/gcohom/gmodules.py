"""Finite-dimensional kG-modules over GF(p) and the functors applied to them.

A module stores one ``dim x dim`` matrix per group element, acting on column
vectors from the left. Actions are built once from generator matrices by
evaluating the breadth-first words recorded by :class:`FiniteGroup`, then
checked against every (element, generator) product, which certifies that
the assignment is a homomorphism.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import CapExceeded, ModuleError
from .exactla import (
    FpMatrix,
    Subspace,
    _fmatmul,
    check_prime,
    kernel_basis,
    rank,
    solve,
)
from .groups import FiniteGroup, SubgroupEmbedding

LATTICE_BOUND = 10**6


class GModule:
    """Representation of ``group`` on GF(p)^dim."""

    def __init__(self, group: FiniteGroup, p: int, action: np.ndarray, name: str = "", check: bool = True):
        self.group = group
        self.p = check_prime(p)
        action = np.mod(np.asarray(action, dtype=np.int64), self.p)
        if action.ndim != 3 or action.shape[0] != group.order or action.shape[1] != action.shape[2]:
            raise ModuleError(f"action array of shape {action.shape} does not fit a group of order {group.order}")
        action.flags.writeable = False
        self.action = action
        self.dim = action.shape[1]
        self.name = name or f"module(dim={self.dim})"
        if check:
            self.verify()

    @classmethod
    def from_generator_matrices(cls, group: FiniteGroup, mats: Sequence, p: int, name: str = "") -> "GModule":
        if len(mats) != len(group.generators):
            raise ModuleError(f"{len(mats)} matrices given for {len(group.generators)} generators")
        mats = [np.mod(np.asarray(m, dtype=np.int64), p) for m in mats]
        dims = {m.shape for m in mats}
        if len(dims) > 1 or any(len(s) != 2 or s[0] != s[1] for s in dims):
            raise ModuleError("generator matrices must share one square shape")
        d = mats[0].shape[0] if mats else 0
        for m in mats:
            if rank(FpMatrix(m, p)) != d:
                raise ModuleError("generator matrix is not invertible")
        action = np.zeros((group.order, d, d), dtype=np.int64)
        action[0] = np.eye(d, dtype=np.int64)
        for i in range(1, group.order):
            action[i] = _fmatmul(action[group.parent[i]], mats[group.via[i]], p)
        return cls(group, p, action, name=name)

    def verify(self) -> None:
        """Identity acts trivially and action(g) @ action(s) == action(g*s) for generators s."""
        g = self.group
        d = self.dim
        if not np.array_equal(self.action[g.identity_index], np.eye(d, dtype=np.int64)):
            raise ModuleError("identity does not act as the identity matrix")
        idx = np.arange(g.order)
        for s in g.generators:
            prod = np.einsum("gij,jk->gik", self.action, self.action[s]) % self.p
            if not np.array_equal(prod, self.action[g.mult_many(idx, s)]):
                raise ModuleError("generator matrices violate a group relation")

    def matrix(self, i: int) -> FpMatrix:
        return FpMatrix(self.action[i], self.p)

    @property
    def generator_matrices(self) -> list:
        return [self.action[s] for s in self.group.generators]

    @cached_property
    def key(self) -> str:
        h = hashlib.sha256()
        h.update(f"{id(self.group)}:{self.p}:{self.dim}:".encode())
        h.update(self.action.tobytes())
        return h.hexdigest()

    def same_action(self, other: "GModule") -> bool:
        return self.p == other.p and self.group is other.group and np.array_equal(self.action, other.action)

    def __repr__(self):
        return f"GModule({self.name}, dim={self.dim}, GF({self.p}), {self.group.name})"


@dataclass(frozen=True, eq=False)
class Submodule:
    parent: GModule
    space: Subspace

    def __post_init__(self):
        if self.space.ambient_dim != self.parent.dim or self.space.p != self.parent.p:
            raise ModuleError("subspace does not live in the parent module")
        if not is_invariant(self.parent, self.space):
            raise ModuleError("subspace is not G-invariant")

    @property
    def dim(self) -> int:
        return self.space.dim

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        return self.parent is other.parent and self.space == other.space

    __hash__ = None

    def __repr__(self):
        return f"Submodule(dim={self.dim} in {self.parent.name})"


# ---------------------------------------------------------------------------
# constructors


def trivial(group: FiniteGroup, p: int, dim: int = 1) -> GModule:
    action = np.broadcast_to(np.eye(dim, dtype=np.int64), (group.order, dim, dim)).copy()
    return GModule(group, p, action, name="k" if dim == 1 else f"k^{dim}", check=False)


def permutation(group: FiniteGroup, p: int) -> GModule:
    """Natural permutation module: g sends basis vector e_i to e_{g(i)}."""
    n, d = group.order, group.degree
    action = np.zeros((n, d, d), dtype=np.int64)
    perms = np.array(group.elements, dtype=np.int64).reshape(n, d)
    g_idx = np.repeat(np.arange(n), d)
    action[g_idx, perms.ravel(), np.tile(np.arange(d), n)] = 1
    return GModule(group, p, action, name="perm", check=False)


def regular(group: FiniteGroup, p: int) -> GModule:
    """Left regular module: g sends e_h to e_{gh}."""
    n = group.order
    action = np.zeros((n, n, n), dtype=np.int64)
    table = group.table
    g_idx = np.repeat(np.arange(n), n)
    h_idx = np.tile(np.arange(n), n)
    action[g_idx, table.ravel(), h_idx] = 1
    return GModule(group, p, action, name="regular", check=False)


def from_matrices(group: FiniteGroup, mats: Sequence, p: int, name: str = "") -> GModule:
    return GModule.from_generator_matrices(group, mats, p, name=name)


# ---------------------------------------------------------------------------
# functors


def _inverse_actions(V: GModule) -> np.ndarray:
    return V.action[V.group.inv]


def dual(V: GModule) -> GModule:
    """Contragredient module: (g.f)(v) = f(g^-1 v), i.e. transpose(action(g^-1))."""
    return GModule(V.group, V.p, np.transpose(_inverse_actions(V), (0, 2, 1)), name=f"{V.name}^*", check=False)


def _same_group(X: GModule, Y: GModule):
    if X.group is not Y.group:
        raise ModuleError(f"modules over different groups: {X.group.name} vs {Y.group.name}")
    if X.p != Y.p:
        raise ModuleError(f"modules over different fields: GF({X.p}) vs GF({Y.p})")


def _batched_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    out = np.einsum("gij,gkl->gikjl", a, b)
    return out.reshape(n, a.shape[1] * b.shape[1], a.shape[2] * b.shape[2])


def tensor(X: GModule, Y: GModule) -> GModule:
    """Diagonal action on X (x) Y; basis x_i (x) y_j has index i * dim(Y) + j."""
    _same_group(X, Y)
    action = _batched_kron(X.action, Y.action) % X.p
    return GModule(X.group, X.p, action, name=f"({X.name} (x) {Y.name})", check=False)


def hom(X: GModule, Y: GModule) -> GModule:
    """Hom_k(X, Y) with (g.f) = g_Y f g_X^-1; f is a dim(Y) x dim(X) matrix flattened row-major."""
    _same_group(X, Y)
    inv_t = np.transpose(_inverse_actions(X), (0, 2, 1))
    action = _batched_kron(Y.action, inv_t) % X.p
    return GModule(X.group, X.p, action, name=f"Hom({X.name}, {Y.name})", check=False)


def direct_sum(A: GModule, B: GModule) -> GModule:
    _same_group(A, B)
    n, a, b = A.group.order, A.dim, B.dim
    action = np.zeros((n, a + b, a + b), dtype=np.int64)
    action[:, :a, :a] = A.action
    action[:, a:, a:] = B.action
    return GModule(A.group, A.p, action, name=f"({A.name} + {B.name})", check=False)


def restrict(V: GModule, e: SubgroupEmbedding) -> GModule:
    if e.sup is not V.group:
        raise ModuleError("embedding target is not the module's group")
    return GModule(e.sub, V.p, V.action[e.index_map], name=f"{V.name}|{e.sub.name}", check=False)


# ---------------------------------------------------------------------------
# invariants and submodules


def _augmentation_rows(V: GModule) -> np.ndarray:
    eye = np.eye(V.dim, dtype=np.int64)
    mats = [(m - eye) % V.p for m in V.generator_matrices]
    if not mats:
        return np.zeros((0, V.dim), dtype=np.int64)
    return np.concatenate(mats, axis=0)


def fixed_points(V: GModule) -> Subspace:
    """C_V(G): common kernel of action(s) - I over the generators."""
    return kernel_basis(FpMatrix(_augmentation_rows(V), V.p))


def coinvariant_space(V: GModule) -> Subspace:
    """[V,G]: span of (action(s) - I) v over generators s and basis vectors v."""
    eye = np.eye(V.dim, dtype=np.int64)
    cols = [((m - eye) % V.p).T for m in V.generator_matrices]
    if not cols:
        return Subspace.zero(V.dim, V.p)
    return Subspace.span(np.concatenate(cols, axis=0), V.dim, V.p)


def coinvariants(V: GModule) -> Submodule:
    return Submodule(V, coinvariant_space(V))


def is_invariant(V: GModule, space: Subspace) -> bool:
    if space.dim == 0:
        return True
    for m in V.generator_matrices:
        images = _fmatmul(space.basis, m.T, V.p)
        if np.any(space.reduce(images)):
            return False
    return True


def spin_space(V: GModule, vectors) -> Subspace:
    vecs = np.mod(np.asarray(vectors, dtype=np.int64).reshape(-1, V.dim), V.p)
    # the orbit span of each vector under all elements is already invariant
    images = np.einsum("gij,nj->ngi", V.action, vecs) % V.p
    return Subspace.span(images.reshape(-1, V.dim), V.dim, V.p)


def spin(V: GModule, vectors) -> Submodule:
    """Smallest submodule containing ``vectors``."""
    return Submodule(V, spin_space(V, vectors))


def submodule_module(W: Submodule) -> GModule:
    """The submodule as a module in its own RREF basis."""
    V, B = W.parent, W.space.basis
    piv = list(W.space.pivots)
    imgs = np.einsum("gij,kj->gik", V.action, B) % V.p  # columns: images of basis vectors
    action = imgs[:, piv, :]
    return GModule(V.group, V.p, action, name=f"sub({V.name})", check=False)


def inclusion_matrix(W: Submodule) -> np.ndarray:
    return W.space.basis.T.copy()


def quotient_module(W: Submodule) -> tuple:
    """(V/W, projection matrix); quotient coordinates are V's non-pivot coordinates of W."""
    V = W.parent
    piv = set(W.space.pivots)
    free = [j for j in range(V.dim) if j not in piv]
    proj = np.zeros((len(free), V.dim), dtype=np.int64)
    eye = np.eye(V.dim, dtype=np.int64)
    reduced = W.space.reduce(eye)  # row j = reduction of e_j
    proj[:, :] = reduced[:, free].T
    section = eye[:, free]
    action = np.einsum("ij,gjk,kl->gil", proj, V.action, section) % V.p
    return GModule(V.group, V.p, action, name=f"{V.name}/sub", check=False), proj


def is_module_hom(f: np.ndarray, X: GModule, Y: GModule) -> bool:
    """Whether the dim(Y) x dim(X) matrix f commutes with the actions."""
    _same_group(X, Y)
    f = np.mod(np.asarray(f, dtype=np.int64), X.p)
    for s in X.group.generators:
        if not np.array_equal(_fmatmul(f, X.action[s], X.p), _fmatmul(Y.action[s], f, X.p)):
            return False
    return True


def hom_g_dim(U: GModule, W: GModule) -> int:
    """dim Hom_G(U, W), computed as fixed points of Hom_k(U, W)."""
    return fixed_points(hom(U, W)).dim


# ---------------------------------------------------------------------------
# complements and complete reducibility


def find_complement(W: Submodule) -> Optional[FpMatrix]:
    """An equivariant idempotent with image W, or None when W has no invariant complement.

    Writes the projection as B^T C with B the basis of W and solves the linear
    conditions C B^T = I and B^T C A = A B^T C (A over generators) for C.
    """
    V = W.parent
    p, d, k = V.p, V.dim, W.dim
    B = W.space.basis
    if k == 0:
        return FpMatrix.zeros(d, d, p)
    blocks = [np.kron(np.eye(k, dtype=np.int64), B)]
    rhs = [np.eye(k, dtype=np.int64).ravel()]
    eye_d = np.eye(d, dtype=np.int64)
    for A in V.generator_matrices:
        blocks.append((np.kron(B.T, A.T) - np.kron(_fmatmul(A, B.T, p), eye_d)) % p)
        rhs.append(np.zeros(d * d, dtype=np.int64))
    system = FpMatrix(np.concatenate(blocks), p)
    sol = solve(system, np.concatenate(rhs))
    if sol is None:
        return None
    C = sol.reshape(k, d)
    pi = FpMatrix(_fmatmul(B.T, C, p), p)
    _check_projection(pi, W)
    return pi


def _check_projection(pi: FpMatrix, W: Submodule) -> None:
    from .errors import InternalInconsistency

    V = W.parent
    if pi @ pi != pi:
        raise InternalInconsistency("complement projection is not idempotent")
    for A in V.generator_matrices:
        Am = FpMatrix(A, V.p)
        if pi @ Am != Am @ pi:
            raise InternalInconsistency("complement projection is not equivariant")
    if Subspace.span(pi.dense().T, V.dim, V.p) != W.space:
        raise InternalInconsistency("complement projection has the wrong image")


def projective_points(d: int, p: int) -> np.ndarray:
    """One nonzero vector per line of GF(p)^d (leading nonzero entry 1)."""
    out = []
    for lead in range(d):
        tail = d - lead - 1
        rest = np.array(list(itertools.product(range(p), repeat=tail)), dtype=np.int64).reshape(p**tail, tail)
        block = np.zeros((rest.shape[0], d), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = rest
        out.append(block)
    return np.concatenate(out) if out else np.zeros((0, d), dtype=np.int64)


def submodule_lattice(V: GModule, bound: int = LATTICE_BOUND) -> list:
    """Every submodule of V, sorted by (dimension, basis).

    Cyclic submodules come from spinning one vector per line; all others are
    sums of cyclic ones, so closing under adding a cyclic submodule suffices.
    """
    if V.p**V.dim > bound:
        raise CapExceeded(f"p^dim = {V.p}^{V.dim} exceeds the enumeration bound {bound}")
    cyclic = {}
    for v in projective_points(V.dim, V.p):
        s = spin_space(V, v)
        cyclic.setdefault(s.key(), s)
    zero = Subspace.zero(V.dim, V.p)
    found = {zero.key(): zero}
    found.update(cyclic)
    frontier = list(cyclic.values())
    gens = list(cyclic.values())
    while frontier:
        nxt = []
        for a in frontier:
            for c in gens:
                if a.contains_subspace(c):
                    continue
                s = Subspace.span(np.concatenate([a.basis, c.basis]), V.dim, V.p)
                if s.key() not in found:
                    found[s.key()] = s
                    nxt.append(s)
        frontier = nxt
    spaces = sorted(found.values(), key=lambda s: (s.dim, s.basis.tobytes()))
    return [Submodule(V, s) for s in spaces]


def is_completely_reducible(V: GModule, bound: int = LATTICE_BOUND) -> bool:
    return all(find_complement(W) is not None for W in submodule_lattice(V, bound))


def submodule_from_vectors(V: GModule, vectors) -> Submodule:
    return Submodule(V, Subspace.span(vectors, V.dim, V.p))
