"""Normalized bar complexes: cochains, chains, (co)homology, restriction, Ext/Tor
and long exact sequences.

Degree-n normalized cochains are functions on n-tuples of non-identity group
elements with values in V. A cochain is stored as one flat vector: tuple
index (mixed radix, base |G|-1, first entry most significant) times dim V
plus the coordinate in V. Chains use the same indexing with V-coefficients.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CapExceeded, InternalInconsistency, ModuleError, NotExact
from .exactla import (
    FpMatrix,
    Subspace,
    _fmatmul,
    block_diag_apply,
    caps,
    image_basis,
    kernel_basis,
    quotient_basis,
    rank,
    solve_many,
)
from .gmodules import GModule, hom, is_module_hom, restrict, tensor
from .groups import FiniteGroup, SubgroupEmbedding


@dataclass
class Settings:
    max_degree: int = 3


settings = Settings()


# ---------------------------------------------------------------------------
# index bookkeeping


def tuple_count(group: FiniteGroup, n: int) -> int:
    return (group.order - 1) ** n


def cochain_dim(V: GModule, n: int) -> int:
    return tuple_count(V.group, n) * V.dim


def tuple_digits(m: int, n: int) -> np.ndarray:
    """All n-tuples of non-identity element indices (1..m), in index order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(1, m + 1)] * n, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


def encode(digits: np.ndarray, m: int) -> np.ndarray:
    """Tuple index of rows of element indices (all non-identity)."""
    out = np.zeros(digits.shape[0], dtype=np.int64)
    for k in range(digits.shape[1]):
        out = out * m + (digits[:, k] - 1)
    return out


def _check_size(V: GModule, n: int, rows: int, cols: int):
    if n > settings.max_degree + 1:
        raise CapExceeded(f"degree {n} exceeds the degree cap {settings.max_degree}")
    if max(rows, cols) > caps.sparse:
        raise CapExceeded(f"{max(rows, cols)} basis cochains around degree {n} exceed the sparse cap {caps.sparse}")


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class CochainSpace:
    module: GModule
    degree: int

    @property
    def group(self) -> FiniteGroup:
        return self.module.group

    @property
    def dimension(self) -> int:
        return cochain_dim(self.module, self.degree)


ChainSpace = CochainSpace


@dataclass(frozen=True)
class CoboundaryMatrix:
    source: CochainSpace
    target: CochainSpace
    matrix: FpMatrix


@dataclass(frozen=True)
class BoundaryMatrix:
    source: ChainSpace
    target: ChainSpace
    matrix: FpMatrix


def _assemble(V: GModule, n: int, blocks: list, rows: int, cols: int, check: bool = True) -> FpMatrix:
    """Build a sparse matrix from (row tuple idx, col tuple idx, d x d blocks or scalar) terms."""
    d = V.dim
    r_all, c_all, v_all = [], [], []
    a_idx = np.arange(d)
    for rt, ct, blk in blocks:
        if rt.size == 0:
            continue
        if np.ndim(blk) == 0:
            # scalar multiple of the identity block
            r_all.append((rt[:, None] * d + a_idx).ravel())
            c_all.append((ct[:, None] * d + a_idx).ravel())
            v_all.append(np.full(rt.size * d, int(blk), dtype=np.int64))
        else:
            nz_t, nz_a, nz_b = np.nonzero(blk)
            r_all.append(rt[nz_t] * d + nz_a)
            c_all.append(ct[nz_t] * d + nz_b)
            v_all.append(blk[nz_t, nz_a, nz_b])
    if not r_all:
        return FpMatrix.from_coo([], [], [], (rows, cols), V.p)
    return FpMatrix.from_coo(np.concatenate(r_all), np.concatenate(c_all), np.concatenate(v_all), (rows, cols), V.p)


def coboundary(V: GModule, n: int) -> CoboundaryMatrix:
    """Matrix of the normalized bar differential C^n(G,V) -> C^{n+1}(G,V).

    (d f)(g1..g_{n+1}) = g1.f(g2..) + sum_i (-1)^i f(.., g_i g_{i+1}, ..) + (-1)^{n+1} f(g1..g_n),
    with terms whose merged entry is the identity dropped.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    G = V.group
    m = G.order - 1
    rows, cols = cochain_dim(V, n + 1), cochain_dim(V, n)
    _check_size(V, n + 1, rows, cols)
    R = tuple_digits(m, n + 1)
    rt = np.arange(R.shape[0])
    blocks = [(rt, encode(R[:, 1:], m), V.action[R[:, 0]])]
    for i in range(1, n + 1):
        merged = G.mult_many(R[:, i - 1], R[:, i])
        keep = merged != G.identity_index
        digits = np.concatenate([R[keep, : i - 1], merged[keep, None], R[keep, i + 1 :]], axis=1)
        blocks.append((rt[keep], encode(digits, m), (-1) ** i))
    blocks.append((rt, encode(R[:, :n], m), (-1) ** (n + 1)))
    mat = _assemble(V, n, blocks, rows, cols)
    return CoboundaryMatrix(CochainSpace(V, n), CochainSpace(V, n + 1), mat)


def boundary(V: GModule, n: int) -> BoundaryMatrix:
    """Matrix of the normalized bar boundary C_n(G,V) -> C_{n-1}(G,V).

    d(v [g1|..|gn]) = g1^-1 v [g2|..] + sum_i (-1)^i v [..|g_i g_{i+1}|..] + (-1)^n v [g1|..|g_{n-1}],
    i.e. V is made a right module through v.g = g^-1 v.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    G = V.group
    m = G.order - 1
    if n == 0:
        mat = FpMatrix.zeros(0, V.dim, V.p)
        return BoundaryMatrix(ChainSpace(V, 0), ChainSpace(V, -1), mat)
    rows, cols = cochain_dim(V, n - 1), cochain_dim(V, n)
    _check_size(V, n, rows, cols)
    R = tuple_digits(m, n)
    ct = np.arange(R.shape[0])
    inv_act = V.action[G.inv[R[:, 0]]]
    # blocks are indexed (row tuple, col tuple); _assemble wants per-term block[t, a, b]
    blocks = [(encode(R[:, 1:], m), ct, inv_act)]
    for i in range(1, n):
        merged = G.mult_many(R[:, i - 1], R[:, i])
        keep = merged != G.identity_index
        digits = np.concatenate([R[keep, : i - 1], merged[keep, None], R[keep, i + 1 :]], axis=1)
        blocks.append((encode(digits, m), ct[keep], (-1) ** i))
    blocks.append((encode(R[:, : n - 1], m), ct, (-1) ** n))
    mat = _assemble(V, n, blocks, rows, cols)
    return BoundaryMatrix(ChainSpace(V, n), ChainSpace(V, n - 1), mat)


# ---------------------------------------------------------------------------
# results and caching


@dataclass(frozen=True, eq=False)
class CohomologyResult:
    module: GModule
    degree: int
    dim_H: int
    dim_Z: int
    dim_B: int
    cocycle_space: Subspace
    coboundary_basis: Subspace
    reps: Subspace

    @property
    def cocycle_reps(self) -> np.ndarray:
        return self.reps.basis

    def coordinates(self, z) -> np.ndarray:
        """Coordinates of the class of cocycle ``z`` in the representative basis."""
        z = np.mod(np.asarray(z, dtype=np.int64), self.module.p)
        if not self.cocycle_space.contains(z):
            from .errors import NotACocycle

            raise NotACocycle(f"vector is not a degree-{self.degree} cocycle")
        r = self.coboundary_basis.reduce(z)
        return self.reps.coordinates(r)

    def class_vector(self, coords) -> np.ndarray:
        return _fmatmul(np.asarray(coords, dtype=np.int64)[None, :], self.reps.basis, self.module.p)[0]

    def summary(self) -> dict:
        return {"degree": self.degree, "dim_H": self.dim_H, "dim_Z": self.dim_Z, "dim_B": self.dim_B}


@dataclass(frozen=True, eq=False)
class HomologyResult:
    module: GModule
    degree: int
    dim_H: int
    dim_Z: int
    dim_B: int
    cycle_space: Subspace
    boundary_basis: Subspace
    reps: Subspace

    @property
    def cycle_reps(self) -> np.ndarray:
        return self.reps.basis

    def coordinates(self, z) -> np.ndarray:
        z = np.mod(np.asarray(z, dtype=np.int64), self.module.p)
        if not self.cycle_space.contains(z):
            from .errors import NotACycle

            raise NotACycle(f"vector is not a degree-{self.degree} cycle")
        return self.reps.coordinates(self.boundary_basis.reduce(z))

    def summary(self) -> dict:
        return {"degree": self.degree, "dim_H": self.dim_H, "dim_Z": self.dim_Z, "dim_B": self.dim_B}


class ResultCache:
    """Thread-safe get-or-compute map; each key is computed at most once."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict = {}
        self._pending: dict = {}

    def get_or_compute(self, key, fn: Callable):
        with self._lock:
            if key in self._data:
                return self._data[key]
            ev = self._pending.get(key)
            owner = ev is None
            if owner:
                ev = self._pending[key] = threading.Event()
        if not owner:
            ev.wait()
            with self._lock:
                if key in self._data:
                    return self._data[key]
            return self.get_or_compute(key, fn)
        try:
            value = fn()
            with self._lock:
                self._data[key] = value
            return value
        finally:
            with self._lock:
                self._pending.pop(key, None)
            ev.set()

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        return len(self._data)

    def keys(self) -> list:
        with self._lock:
            return list(self._data)

    def peek(self, key):
        with self._lock:
            return self._data.get(key)


cache = ResultCache()


def coboundary_cached(V: GModule, n: int) -> CoboundaryMatrix:
    return cache.get_or_compute(("delta", V.key, n), lambda: coboundary(V, n))


def boundary_cached(V: GModule, n: int) -> BoundaryMatrix:
    return cache.get_or_compute(("partial", V.key, n), lambda: boundary(V, n))


def _check_degree(n: int):
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n > settings.max_degree:
        raise CapExceeded(f"degree {n} exceeds the degree cap {settings.max_degree}")


def cohomology(V: GModule, n: int) -> CohomologyResult:
    """H^n(G, V) with representatives: RREF basis of a complement of B^n in Z^n."""
    _check_degree(n)
    return cache.get_or_compute(("H^", V.key, n), lambda: _cohomology(V, n))


def _check_width(V: GModule, n: int):
    # kernels are taken densely in the cochain coordinates of degree n
    width = cochain_dim(V, n)
    if width > caps.dense:
        raise CapExceeded(f"degree-{n} cochain space of dimension {width} exceeds the dense cap {caps.dense}")


def complex_shape(V: GModule, n: int) -> dict:
    """Sizes of the two differentials around degree n, without building them."""
    return {
        "degree": n,
        "delta_in": [cochain_dim(V, n), cochain_dim(V, n - 1)] if n else [V.dim, 0],
        "delta_out": [cochain_dim(V, n + 1), cochain_dim(V, n)],
        "fits_dense": cochain_dim(V, n) <= caps.dense,
        "fits_sparse": cochain_dim(V, n + 1) <= caps.sparse,
    }


def _cohomology(V: GModule, n: int) -> CohomologyResult:
    _check_width(V, n)
    Z = kernel_basis(coboundary_cached(V, n).matrix)
    if n == 0:
        B = Subspace.zero(V.dim, V.p)
    else:
        B = image_basis(coboundary_cached(V, n - 1).matrix)
    reps = quotient_basis(Z, B)
    res = CohomologyResult(V, n, Z.dim - B.dim, Z.dim, B.dim, Z, B, reps)
    if res.dim_H != reps.dim:
        raise InternalInconsistency("cohomology representative count disagrees with dim Z - dim B")
    return res


def homology(V: GModule, n: int) -> HomologyResult:
    _check_degree(n)
    return cache.get_or_compute(("H_", V.key, n), lambda: _homology(V, n))


def _homology(V: GModule, n: int) -> HomologyResult:
    _check_width(V, n)
    Z = kernel_basis(boundary_cached(V, n).matrix)
    B = image_basis(boundary_cached(V, n + 1).matrix)
    reps = quotient_basis(Z, B)
    return HomologyResult(V, n, Z.dim - B.dim, Z.dim, B.dim, Z, B, reps)


def ext(X: GModule, Y: GModule, n: int) -> CohomologyResult:
    """Ext^n_G(X, Y) := H^n(G, Hom_k(X, Y))."""
    return cohomology(hom(X, Y), n)


def tor(X: GModule, Y: GModule, n: int) -> HomologyResult:
    """Tor_n^G(X, Y) := H_n(G, X (x) Y)."""
    return homology(tensor(X, Y), n)


def is_cocycle(V: GModule, n: int, phi) -> bool:
    return not np.any(coboundary_cached(V, n).matrix @ phi)


# ---------------------------------------------------------------------------
# restriction


def restriction_indices(e: SubgroupEmbedding, n: int) -> np.ndarray:
    """For each n-tuple of the subgroup, the index of its image tuple in the big group."""
    m_sub, m_sup = e.sub.order - 1, e.sup.order - 1
    digits = tuple_digits(m_sub, n)
    return encode(e.index_map[digits], m_sup)


def restrict_cochain(phi, V: GModule, n: int, e: SubgroupEmbedding) -> np.ndarray:
    """Restriction of a degree-n cochain on e.sup (values in V) to e.sub."""
    if e.sup is not V.group:
        raise ModuleError("embedding target is not the cochain's group")
    phi = np.asarray(phi, dtype=np.int64)
    if phi.shape[-1] != cochain_dim(V, n):
        raise ModuleError(f"cochain of length {phi.shape[-1]} is not in degree {n}")
    idx = restriction_indices(e, n)
    blocks = phi.reshape(*phi.shape[:-1], -1, V.dim)
    return blocks[..., idx, :].reshape(*phi.shape[:-1], idx.size * V.dim)


def induced_restriction(res_G: CohomologyResult, e: SubgroupEmbedding) -> FpMatrix:
    """Matrix of H^n(G, V) -> H^n(L, V|_L) in representative coordinates."""
    V = res_G.module
    res_L = cohomology(restrict(V, e), res_G.degree)
    cols = [res_L.coordinates(restrict_cochain(z, V, res_G.degree, e)) for z in res_G.cocycle_reps]
    return _columns(cols, res_L.dim_H, V.p)


def _columns(cols: list, rows: int, p: int) -> FpMatrix:
    if not cols:
        return FpMatrix.zeros(rows, 0, p)
    return FpMatrix(np.stack(cols, axis=1).reshape(rows, len(cols)), p)


def corestriction_chain(z, V: GModule, n: int, e: SubgroupEmbedding) -> np.ndarray:
    """Push a chain on e.sub (coefficients in V|sub) into the chains of e.sup."""
    idx = restriction_indices(e, n)
    d = V.dim
    out = np.zeros((tuple_count(e.sup, n), d), dtype=np.int64)
    out[idx] = np.asarray(z, dtype=np.int64).reshape(-1, d)
    return out.ravel()


# ---------------------------------------------------------------------------
# long exact sequences


@dataclass(frozen=True)
class ShortExactSequence:
    A: GModule
    B: GModule
    C: GModule
    inc: np.ndarray  # dim B x dim A
    proj: np.ndarray  # dim C x dim B

    def validate(self) -> None:
        A, B, C = self.A, self.B, self.C
        p = B.p
        for X in (A, C):
            if X.group is not B.group or X.p != p:
                raise NotExact("modules are over different groups or fields")
        if self.inc.shape != (B.dim, A.dim) or self.proj.shape != (C.dim, B.dim):
            raise NotExact("map shapes do not match module dimensions")
        if not is_module_hom(self.inc, A, B):
            raise NotExact("inclusion is not G-equivariant")
        if not is_module_hom(self.proj, B, C):
            raise NotExact("projection is not G-equivariant")
        if rank(FpMatrix(self.inc, p)) != A.dim:
            raise NotExact("inclusion is not injective")
        if rank(FpMatrix(self.proj, p)) != C.dim:
            raise NotExact("projection is not surjective")
        if np.any(_fmatmul(self.proj, self.inc, p)):
            raise NotExact("projection after inclusion is not zero")
        if A.dim + C.dim != B.dim:
            raise NotExact("dim A + dim C != dim B")


@dataclass
class ExactnessNode:
    name: str
    dim: int
    image_in: int
    kernel_out: int
    exact: bool


@dataclass
class LongExactSequence:
    ses: ShortExactSequence
    top_degree: int
    spaces: list = field(default_factory=list)  # (name, CohomologyResult) in sequence order
    maps: list = field(default_factory=list)  # (name, FpMatrix) between consecutive spaces
    nodes: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return all(nd.exact for nd in self.nodes)

    def connecting_maps(self) -> list:
        return [(nm, m) for nm, m in self.maps if nm.startswith("connecting")]

    def table(self) -> list:
        return [
            {"node": nd.name, "dim": nd.dim, "image_in": nd.image_in, "kernel_out": nd.kernel_out, "exact": nd.exact}
            for nd in self.nodes
        ]


def _coefficient_map(f: np.ndarray, src: CohomologyResult, dst: CohomologyResult) -> FpMatrix:
    p = src.module.p
    cols = [dst.coordinates(block_diag_apply(f, z, p)) for z in src.cocycle_reps]
    return _columns(cols, dst.dim_H, p)


def long_exact_sequence(ses: ShortExactSequence, top_degree: int = 2) -> LongExactSequence:
    """H^n(A) -> H^n(B) -> H^n(C) -> H^{n+1}(A) for n = 0..top_degree, with exactness checked
    at every node from H^0(A) through H^top(C).

    The connecting map lifts a cocycle through the section s (q s = I), applies
    the coboundary, and pulls back through the retraction r (r i = I).
    """
    ses.validate()
    A, B, C = ses.A, ses.B, ses.C
    p = B.p
    section = solve_many(FpMatrix(ses.proj, p), np.eye(C.dim, dtype=np.int64))
    retraction_t = solve_many(FpMatrix(ses.inc.T, p), np.eye(A.dim, dtype=np.int64))
    if section is None or retraction_t is None:
        raise InternalInconsistency("no linear section/retraction for a validated sequence")
    retraction = retraction_t.T

    les = LongExactSequence(ses, top_degree)
    HA = [cohomology(A, n) for n in range(top_degree + 2)]
    for n in range(top_degree + 1):
        HB, HC = cohomology(B, n), cohomology(C, n)
        if n == 0:
            les.spaces.append((f"H^{n}(A)", HA[n]))
        les.spaces.append((f"H^{n}(B)", HB))
        les.spaces.append((f"H^{n}(C)", HC))
        les.spaces.append((f"H^{n + 1}(A)", HA[n + 1]))
        les.maps.append((f"inc_{n}", _coefficient_map(ses.inc, HA[n], HB)))
        les.maps.append((f"proj_{n}", _coefficient_map(ses.proj, HB, HC)))
        delta = coboundary_cached(B, n).matrix
        cols = []
        for z in HC.cocycle_reps:
            lift = block_diag_apply(section, z, p)
            dl = delta @ lift
            y = block_diag_apply(retraction, dl, p)
            if not np.array_equal(block_diag_apply(ses.inc, y, p), dl):
                raise InternalInconsistency("coboundary of a lift does not come from A")
            cols.append(HA[n + 1].coordinates(y))
        les.maps.append((f"connecting_{n}", _columns(cols, HA[n + 1].dim_H, p)))

    for k, (name, res) in enumerate(les.spaces[:-1]):
        incoming = les.maps[k - 1][1] if k > 0 else None
        outgoing = les.maps[k][1]
        img = image_basis(incoming) if incoming is not None else Subspace.zero(res.dim_H, p)
        ker = kernel_basis(outgoing) if res.dim_H else Subspace.zero(0, p)
        les.nodes.append(ExactnessNode(name, res.dim_H, img.dim, ker.dim, img == ker))
    return les


def split_ses(A: GModule, C: GModule) -> ShortExactSequence:
    from .gmodules import direct_sum

    B = direct_sum(A, C)
    inc = np.zeros((B.dim, A.dim), dtype=np.int64)
    inc[: A.dim, :] = np.eye(A.dim, dtype=np.int64)
    proj = np.zeros((C.dim, B.dim), dtype=np.int64)
    proj[:, A.dim :] = np.eye(C.dim, dtype=np.int64)
    return ShortExactSequence(A, B, C, inc, proj)


def ses_from_submodule(W) -> ShortExactSequence:
    """0 -> W -> V -> V/W -> 0 for a Submodule W of V."""
    from .gmodules import inclusion_matrix, quotient_module, submodule_module

    A = submodule_module(W)
    C, proj = quotient_module(W)
    return ShortExactSequence(A, W.parent, C, inclusion_matrix(W), proj)
