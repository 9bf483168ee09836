"""Exact linear algebra over prime fields GF(p).

Matrices are numpy ``int64`` arrays with entries reduced to ``[0, p)``; large
matrices (more than ``SPARSE_THRESHOLD`` entries) are held as scipy CSR.
Vectors are 1-d arrays. A :class:`Subspace` stores its basis as the rows of a
matrix in reduced row-echelon form, so two subspaces are equal exactly when
their bases are equal.

Products are formed with float64 BLAS and reduced mod p afterwards. This is
exact as long as every partial sum stays below 2**53, which the caps below
guarantee (``cols * (p - 1)**2 < 2**53`` for ``p <= 97``, ``cols <= 2**24``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CapExceeded, DimensionMismatch, ModulusMismatch

MAX_PRIME = 97
SPARSE_THRESHOLD = 10**5


@dataclass
class Caps:
    """Size limits; ``dense`` bounds the width of any dense elimination."""

    dense: int = 2**13
    sparse: int = 2**24


caps = Caps()


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, int(p**0.5) + 1))


def check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > MAX_PRIME:
        raise CapExceeded(f"modulus {p} exceeds cap {MAX_PRIME}")
    return p


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    inv.flags.writeable = False
    return inv


@dataclass(frozen=True)
class FpScalar:
    value: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _other(self, other):
        if isinstance(other, FpScalar):
            if other.p != self.p:
                raise ModulusMismatch(f"GF({self.p}) vs GF({other.p})")
            return other.value
        return int(other)

    def __add__(self, other):
        return FpScalar(self.value + self._other(other), self.p)

    def __sub__(self, other):
        return FpScalar(self.value - self._other(other), self.p)

    def __mul__(self, other):
        return FpScalar(self.value * self._other(other), self.p)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return FpScalar(-self.value, self.p)

    def inverse(self) -> "FpScalar":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FpScalar(pow(self.value, -1, self.p), self.p)

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, FpScalar):
            return self.p == other.p and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))


def _fmatmul(a, b, p: int) -> np.ndarray:
    """Exact ``a @ b mod p`` for reduced integer arrays via float64 BLAS."""
    if sp.issparse(a):
        out = a @ b
        out = np.asarray(out.todense() if sp.issparse(out) else out)
        return np.mod(out.astype(np.int64), p)
    if a.size == 0 or b.size == 0:
        shape = (a.shape[0],) + b.shape[1:]
        return np.zeros(shape, dtype=np.int64)
    # float32 is exact while every dot product stays below 2^24
    ftype = np.float32 if a.shape[-1] * (p - 1) ** 2 < 2**24 else np.float64
    out = a.astype(ftype) @ b.astype(ftype)
    return _fmod(out, p).astype(np.int64)


class FpMatrix:
    """Immutable matrix over GF(p), dense or CSR-sparse."""

    __slots__ = ("p", "_data")

    def __init__(self, data, p: int, *, sparse: Optional[bool] = None):
        self.p = check_prime(p)
        if isinstance(data, FpMatrix):
            if data.p != self.p:
                raise ModulusMismatch(f"GF({data.p}) data for GF({self.p}) matrix")
            data = data._data
        if sp.issparse(data):
            m = sp.csr_matrix(data, dtype=np.int64, copy=True)
            m.data %= self.p
            m.eliminate_zeros()
            m.sort_indices()
            size = m.shape[0] * m.shape[1]
            if sparse is False or (sparse is None and size <= SPARSE_THRESHOLD):
                self._data = _freeze(np.asarray(m.todense(), dtype=np.int64))
            else:
                self._data = m
        else:
            arr = np.array(data, dtype=np.int64, copy=True)
            if arr.ndim == 1 and arr.size == 0:
                arr = arr.reshape(0, 0)
            if arr.ndim != 2:
                raise DimensionMismatch(f"matrix data must be 2-d, got shape {arr.shape}")
            arr %= self.p
            if sparse:
                m = sp.csr_matrix(arr)
                m.eliminate_zeros()
                self._data = m
            else:
                self._data = _freeze(arr)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FpMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @classmethod
    def from_coo(cls, rows, cols, vals, shape, p: int) -> "FpMatrix":
        """Assemble from triples; duplicate positions are summed mod p."""
        vals = np.mod(np.asarray(vals, dtype=np.int64), p)
        m = sp.coo_matrix((vals, (np.asarray(rows), np.asarray(cols))), shape=shape)
        return cls(m.tocsr(), p)

    @property
    def shape(self) -> tuple:
        return tuple(self._data.shape)

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self._data)

    @property
    def nnz(self) -> int:
        if self.is_sparse:
            return int(self._data.nnz)
        return int(np.count_nonzero(self._data))

    def dense(self) -> np.ndarray:
        """Read-only dense view (materialized for sparse storage)."""
        if self.is_sparse:
            return _freeze(np.asarray(self._data.todense(), dtype=np.int64))
        return self._data

    def csr(self) -> sp.csr_matrix:
        if self.is_sparse:
            return self._data
        return sp.csr_matrix(self._data)

    def row_block(self, start: int, stop: int) -> np.ndarray:
        block = self._data[start:stop]
        if sp.issparse(block):
            return np.asarray(block.todense(), dtype=np.int64)
        return np.array(block)

    def entry(self, i: int, j: int) -> FpScalar:
        return FpScalar(int(self._data[i, j]), self.p)

    def _check(self, other: "FpMatrix"):
        if not isinstance(other, FpMatrix):
            raise TypeError(f"expected FpMatrix, got {type(other).__name__}")
        if other.p != self.p:
            raise ModulusMismatch(f"GF({self.p}) vs GF({other.p})")

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            self._check(other)
            if self.cols != other.rows:
                raise DimensionMismatch(f"{self.shape} @ {other.shape}")
            if self.is_sparse and other.is_sparse:
                return FpMatrix(self._data @ other._data, self.p)
            return FpMatrix(_fmatmul(self._data, other.dense(), self.p), self.p)
        vec = np.mod(np.asarray(other, dtype=np.int64), self.p)
        if vec.shape[0] != self.cols:
            raise DimensionMismatch(f"{self.shape} @ vector of length {vec.shape[0]}")
        return _fmatmul(self._data, vec, self.p)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        if self.is_sparse or other.is_sparse:
            return FpMatrix(self.csr() + other.csr(), self.p)
        return FpMatrix(self._data + other._data, self.p)

    def __neg__(self) -> "FpMatrix":
        if self.is_sparse:
            return FpMatrix(-self._data, self.p)
        return FpMatrix(-self._data, self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        return self + (-other)

    def scale(self, c: int) -> "FpMatrix":
        return FpMatrix(self._data * (int(c) % self.p), self.p)

    def transpose(self) -> "FpMatrix":
        if self.is_sparse:
            return FpMatrix(self._data.T.tocsr(), self.p)
        return FpMatrix(self._data.T, self.p)

    @property
    def T(self) -> "FpMatrix":
        return self.transpose()

    def is_zero(self) -> bool:
        return self.nnz == 0

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        if other.p != self.p or other.shape != self.shape:
            return False
        if self.is_sparse or other.is_sparse:
            return (self.csr() != other.csr()).nnz == 0
        return bool(np.array_equal(self._data, other._data))

    __hash__ = None

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"FpMatrix({self.rows}x{self.cols}, GF({self.p}), {kind}, nnz={self.nnz})"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _as_array(m, p: Optional[int] = None) -> tuple:
    if isinstance(m, FpMatrix):
        if p is not None and m.p != p:
            raise ModulusMismatch(f"GF({m.p}) vs GF({p})")
        return np.array(m.dense()), m.p
    if p is None:
        raise TypeError("a modulus is required for raw arrays")
    return np.mod(np.array(m, dtype=np.int64), p), check_prime(p)


# ---------------------------------------------------------------------------
# elimination kernels


def _rref_general(a: np.ndarray, p: int) -> tuple:
    """In-place RREF of a reduced int64 array; returns (a, pivot columns)."""
    inv = inverse_table(p)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r, c:] = (a[r, c:] * inv[lead]) % p
        colv = a[:, c].copy()
        colv[r] = 0
        others = np.flatnonzero(colv)
        if others.size:
            a[others, c:] = (a[others, c:] - np.outer(colv[others], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def _rref_gf2(a: np.ndarray) -> tuple:
    """RREF over GF(2) on bit-packed rows with 64-bit word XOR elimination."""
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return a, []
    words = (cols + 63) // 64
    packed8 = np.zeros((rows, words * 8), dtype=np.uint8)
    packed8[:, : (cols + 7) // 8] = np.packbits(a.astype(np.uint8), axis=1)
    packed = packed8.view(np.uint64)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        byte, bit = divmod(c, 8)
        mask = np.uint8(0x80 >> bit)
        colbits = (packed8[:, byte] & mask) != 0
        nz = np.flatnonzero(colbits[r:])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            packed[[r, piv]] = packed[[piv, r]]
            colbits[[r, piv]] = colbits[[piv, r]]
        colbits[r] = False
        others = np.flatnonzero(colbits)
        if others.size:
            w0 = c // 64
            packed[others, w0:] ^= packed[r, w0:]
        pivots.append(c)
        r += 1
    out = np.unpackbits(packed8, axis=1, count=cols).astype(np.int64)
    return out, pivots


PANEL = 64


def _fmod(x: np.ndarray, p: int) -> np.ndarray:
    """In-place mod p for float64 arrays holding exact integers."""
    x -= p * np.floor(x / p)
    return x


def _chunk_pivots(chunk: np.ndarray, p: int) -> tuple:
    """Leftmost pivots of a small block: (pivot row indices, pivot columns)."""
    a = chunk.copy()
    inv = inverse_table(p)
    order = np.arange(a.shape[0])
    rows_out, cols_out = [], []
    r = 0
    for c in range(a.shape[1]):
        if r == a.shape[0]:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
            order[[r, piv]] = order[[piv, r]]
        a[r, c:] = (a[r, c:] * inv[a[r, c]]) % p
        below = r + 1 + np.flatnonzero(a[r + 1 :, c])
        if below.size:
            a[below, c:] = (a[below, c:] - np.outer(a[below, c], a[r, c:])) % p
        rows_out.append(int(order[r]))
        cols_out.append(c)
        r += 1
    return rows_out, cols_out


def _panel_pivots(panel: np.ndarray, p: int) -> tuple:
    """Rows spanning a column panel's row space, and its RREF pivot columns.

    Rows are scanned in chunks against a running RREF basis and the scan stops
    once every panel column is a pivot.
    """
    n, w = panel.shape
    basis = np.zeros((0, w), dtype=np.int64)
    bpiv: list = []
    src: list = []
    step = 2 * w
    for start in range(0, n, step):
        if len(bpiv) == w:
            break
        chunk = np.asarray(panel[start : start + step], dtype=np.int64)
        if bpiv:
            chunk = (chunk - _fmatmul(chunk[:, bpiv], basis, p)) % p
        live = np.flatnonzero(np.any(chunk != 0, axis=1))
        if live.size == 0:
            continue
        rows, cols = _chunk_pivots(chunk[live], p)
        if not rows:
            continue
        src.extend(int(start + live[i]) for i in rows)
        red, _ = _rref_general(chunk[live[rows]].copy(), p)
        if bpiv:
            basis = (basis - _fmatmul(basis[:, cols], red, p)) % p
        basis = np.concatenate([basis, red])
        bpiv = bpiv + cols
        order = np.argsort(bpiv, kind="stable")
        basis = basis[order]
        bpiv = [bpiv[i] for i in order]
    # pair source rows with pivots: any basis of the row space restricts to an
    # invertible block on the pivot columns, so the ordering of src is free
    return src, bpiv


def _invert_small(m: np.ndarray, p: int) -> np.ndarray:
    s = m.shape[0]
    red, piv = _rref_general(np.concatenate([m % p, np.eye(s, dtype=np.int64)], axis=1), p)
    if piv[:s] != list(range(s)):
        raise ValueError("singular pivot block")
    return red[:, s:]


def _rref_blocked(a: np.ndarray, p: int) -> tuple:
    """Right-looking panel elimination; the row updates run through BLAS."""
    rows, cols = a.shape
    work = a.astype(np.float64)
    pivots: list = []
    pivot_rows: list = []
    remaining = np.arange(rows)
    # entries of columns right of the current panel are reduced lazily; each
    # update adds at most PANEL * (p-1)**2 in magnitude
    lazy = max(1, int(2**40 // (PANEL * (p - 1) ** 2 + 1)) // 2)
    pending = 0
    for c0 in range(0, cols, PANEL):
        if remaining.size == 0:
            break
        c1 = min(c0 + PANEL, cols)
        _fmod(work[:, c0:c1], p)
        prow, pcol = _panel_pivots(work[remaining, c0:c1].astype(np.int64), p)
        if not prow:
            continue
        src = remaining[prow]
        pc = [c0 + j for j in pcol]
        minv = _invert_small(work[np.ix_(src, pc)].astype(np.int64), p)
        new = _fmod(minv.astype(np.float64) @ _fmod(work[src, c0:], p), p)
        coeff = work[:, pc].copy()
        coeff[src] = 0
        tail = work[:, c0:]
        tail -= coeff @ new
        pending += 1
        if pending >= lazy:
            _fmod(tail, p)
            pending = 0
        work[src, c0:] = new
        pivots.extend(pc)
        pivot_rows.extend(int(i) for i in src)
        remaining = np.setdiff1d(remaining, src, assume_unique=True)
    _fmod(work, p)
    order = np.concatenate([np.asarray(pivot_rows, dtype=np.int64), remaining])
    return work[order].astype(np.int64), pivots


def _rref_array(a: np.ndarray, p: int) -> tuple:
    if a.shape[1] > caps.dense and a.shape[0] > 1:
        raise CapExceeded(f"dense elimination width {a.shape[1]} exceeds cap {caps.dense}")
    if p == 2:
        return _rref_gf2(a)
    if min(a.shape) <= PANEL:
        return _rref_general(a, p)
    return _rref_blocked(a, p)


def _nullspace_columns(a: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right kernel of ``a`` (k x nullity)."""
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    red, pivots = _rref_array(a.copy(), p)
    free = [c for c in range(cols) if c not in set(pivots)]
    out = np.zeros((cols, len(free)), dtype=np.int64)
    if free:
        out[free, np.arange(len(free))] = 1
        if pivots:
            out[pivots, :] = (-red[: len(pivots), free]) % p
    return out


def _kernel_refine(m: FpMatrix) -> np.ndarray:
    """Kernel of a (typically tall, possibly sparse) matrix by row-chunk refinement.

    Keeps a column basis K of the kernel of the rows seen so far and shrinks it
    with each chunk R via K <- K @ ker(R @ K). Returns K (cols x nullity).
    """
    p = m.p
    rows, cols = m.shape
    if cols > caps.dense:
        raise CapExceeded(f"kernel width {cols} exceeds dense cap {caps.dense}")
    if rows > caps.sparse:
        raise CapExceeded(f"row count {rows} exceeds sparse cap {caps.sparse}")
    data = m.csr() if m.is_sparse else m.dense()
    basis = None
    k = cols
    start = 0
    while start < rows and k > 0:
        step = int(min(max(k // 2, 64), 2048))
        block = data[start : start + step]
        start += step
        if basis is None:
            s = np.asarray(block.todense(), dtype=np.int64) if sp.issparse(block) else np.array(block)
        else:
            s = _fmatmul(block, basis, p)
        s = s[np.any(s != 0, axis=1)]
        if s.shape[0] == 0:
            continue
        null = _nullspace_columns(s, p)
        basis = null if basis is None else _fmatmul(basis, null, p)
        k = basis.shape[1]
    if basis is None:
        basis = np.eye(cols, dtype=np.int64)
    return basis


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """Row space of ``basis`` (kept in RREF) inside GF(p)^ambient_dim."""

    ambient_dim: int
    basis: np.ndarray
    p: int
    pivots: tuple = field(default=())

    @classmethod
    def span(cls, vectors, ambient_dim: int, p: int) -> "Subspace":
        arr = np.array(vectors, dtype=np.int64)
        if arr.size == 0 or ambient_dim == 0:
            return cls.zero(ambient_dim, p)
        arr = np.mod(arr.reshape(-1, ambient_dim), p)
        arr = arr[np.any(arr != 0, axis=1)]
        if arr.shape[0] == 0:
            return cls.zero(ambient_dim, p)
        red, piv = _rref_array(arr, p)
        return cls(ambient_dim, _freeze(np.ascontiguousarray(red[: len(piv)])), p, tuple(piv))

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(ambient_dim, _freeze(np.zeros((0, ambient_dim), dtype=np.int64)), p, ())

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(ambient_dim, _freeze(np.eye(ambient_dim, dtype=np.int64)), p, tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def as_matrix(self) -> FpMatrix:
        return FpMatrix(self.basis, self.p)

    def reduce(self, v) -> np.ndarray:
        """Canonical representative of ``v`` modulo this subspace (pivot entries cleared)."""
        v = np.mod(np.asarray(v, dtype=np.int64), self.p)
        if self.dim == 0:
            return v
        if v.ndim == 1:
            return (v - _fmatmul(v[list(self.pivots)][None, :], self.basis, self.p)[0]) % self.p
        return (v - _fmatmul(v[:, list(self.pivots)], self.basis, self.p)) % self.p

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def contains_subspace(self, other: "Subspace") -> bool:
        _same_field(self, other)
        if other.dim == 0 or self.dim == self.ambient_dim:
            return True
        return not np.any(self.reduce(other.basis))

    def coordinates(self, v) -> np.ndarray:
        """Coefficients c with ``c @ basis == v``; raises if ``v`` is not in the span."""
        v = np.mod(np.asarray(v, dtype=np.int64), self.p)
        if not self.contains(v):
            raise ValueError("vector is not in the subspace")
        if v.ndim == 1:
            return v[list(self.pivots)].copy()
        return v[:, list(self.pivots)].copy()

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.p == other.p
            and self.ambient_dim == other.ambient_dim
            and np.array_equal(self.basis, other.basis)
        )

    __hash__ = None

    def key(self) -> bytes:
        return self.basis.tobytes() + bytes([self.dim % 256])

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, GF({self.p}))"


def _same_field(a: Subspace, b: Subspace):
    if a.p != b.p:
        raise ModulusMismatch(f"GF({a.p}) vs GF({b.p})")
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient {a.ambient_dim} vs {b.ambient_dim}")


# ---------------------------------------------------------------------------
# public operations


def rref(m: FpMatrix) -> tuple:
    """Reduced row-echelon form and rank of ``m`` (pivots chosen leftmost-first)."""
    arr = np.array(m.dense())
    red, piv = _rref_array(arr, m.p)
    return FpMatrix(red, m.p), len(piv)


def rank(m: FpMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.rows >= m.cols:
        if m.is_sparse or m.rows > 4 * m.cols:
            return m.cols - _kernel_refine(m).shape[1]
        return rref(m)[1]
    return rank(m.transpose())


def kernel_basis(m: FpMatrix) -> Subspace:
    """Right kernel ``{v : m @ v == 0}`` in RREF."""
    if m.rows == 0:
        return Subspace.full(m.cols, m.p)
    if m.is_sparse or m.rows > 4 * m.cols:
        cols = _kernel_refine(m)
        return Subspace.span(cols.T, m.cols, m.p)
    null = _nullspace_columns(np.array(m.dense()), m.p)
    return Subspace.span(null.T, m.cols, m.p)


def image_basis(m: FpMatrix) -> Subspace:
    """Column space of ``m``.

    Wide matrices go through the annihilator of the left kernel, which keeps
    every elimination as narrow as ``m.rows``.
    """
    if m.cols > 2 * m.rows and m.rows > 0:
        return annihilator(kernel_basis(m.transpose()))
    return Subspace.span(np.array(m.transpose().dense()), m.rows, m.p)


def row_space(m: FpMatrix) -> Subspace:
    if m.is_sparse:
        return annihilator(kernel_basis(m))
    return Subspace.span(np.array(m.dense()), m.cols, m.p)


def annihilator(u: Subspace) -> Subspace:
    """Functionals vanishing on ``u`` under the standard dot-product pairing."""
    if u.dim == 0:
        return Subspace.full(u.ambient_dim, u.p)
    null = _nullspace_columns(np.array(u.basis), u.p)
    return Subspace.span(null.T, u.ambient_dim, u.p)


def solve(m: FpMatrix, b) -> Optional[np.ndarray]:
    """Some ``x`` with ``m @ x == b`` (free variables zero), or None."""
    b = np.mod(np.asarray(b, dtype=np.int64), m.p)
    if b.ndim != 1 or b.shape[0] != m.rows:
        raise DimensionMismatch(f"right-hand side of length {b.shape} for {m.shape} matrix")
    aug = np.concatenate([np.array(m.dense()), b[:, None]], axis=1)
    red, piv = _rref_array(aug, m.p)
    if piv and piv[-1] == m.cols:
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    if piv:
        x[piv] = red[: len(piv), m.cols]
    return x


def solve_many(m: FpMatrix, rhs) -> Optional[np.ndarray]:
    """Solve ``m @ X == rhs`` column by column; None if any column is inconsistent."""
    rhs = np.mod(np.asarray(rhs, dtype=np.int64), m.p)
    if rhs.ndim != 2 or rhs.shape[0] != m.rows:
        raise DimensionMismatch(f"right-hand side of shape {rhs.shape} for {m.shape} matrix")
    aug = np.concatenate([np.array(m.dense()), rhs], axis=1)
    red, piv = _rref_array(aug, m.p)
    if any(c >= m.cols for c in piv):
        return None
    x = np.zeros((m.cols, rhs.shape[1]), dtype=np.int64)
    if piv:
        x[piv] = red[: len(piv), m.cols :]
    return x


def sum_subspace(a: Subspace, b: Subspace) -> Subspace:
    _same_field(a, b)
    return Subspace.span(np.concatenate([a.basis, b.basis]), a.ambient_dim, a.p)


def intersect_subspace(a: Subspace, b: Subspace) -> Subspace:
    _same_field(a, b)
    return annihilator(sum_subspace(annihilator(a), annihilator(b)))


def quotient_basis(u: Subspace, w: Subspace) -> Subspace:
    """Span of coset representatives for ``u / w`` (requires w inside u).

    Representatives are the nonzero RREF rows of u's basis reduced modulo w.
    """
    _same_field(u, w)
    if not u.contains_subspace(w):
        raise ValueError("quotient requires the second subspace to lie in the first")
    if u.dim == u.ambient_dim:
        # reducing the identity leaves exactly the unit vectors off w's pivots
        free = np.setdiff1d(np.arange(u.ambient_dim), np.array(w.pivots, dtype=np.int64))
        basis = np.zeros((free.size, u.ambient_dim), dtype=np.int64)
        basis[np.arange(free.size), free] = 1
        return Subspace(u.ambient_dim, _freeze(basis), u.p, tuple(int(j) for j in free))
    return Subspace.span(w.reduce(u.basis), u.ambient_dim, u.p)


def transpose(m: FpMatrix) -> FpMatrix:
    return m.transpose()


def block_diag_apply(block: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Apply ``I_t (x) block`` to a stacked vector (or rows of vectors)."""
    d_in = block.shape[1]
    v = np.asarray(v, dtype=np.int64)
    lead = v.shape[:-1]
    t = v.shape[-1] // d_in
    resh = v.reshape(-1, d_in)
    out = _fmatmul(resh, block.T, p)
    return out.reshape(*lead, t * block.shape[0])


def random_matrix(rng: np.random.Generator, rows: int, cols: int, p: int) -> FpMatrix:
    return FpMatrix(rng.integers(0, p, size=(rows, cols)), p)


__all__: Sequence[str] = [
    "Caps",
    "FpMatrix",
    "FpScalar",
    "Subspace",
    "annihilator",
    "caps",
    "check_prime",
    "image_basis",
    "intersect_subspace",
    "kernel_basis",
    "quotient_basis",
    "rank",
    "row_space",
    "rref",
    "solve",
    "solve_many",
    "sum_subspace",
    "transpose",
]
