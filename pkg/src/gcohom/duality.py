"""Ext/Tor duality: annihilator identities for an endomorphism and its transpose,
the evaluation pairing between Ext^n(X, Y^*) and Tor_n(X, Y), and the
annihilator identity between coinvariants of the dual and fixed points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .barcomplex import (
    boundary_cached,
    coboundary_cached,
    cohomology,
    homology,
    tuple_count,
)
from .errors import InternalInconsistency, ModuleError, NotACocycle, NotACycle
from .exactla import FpMatrix, FpScalar, Subspace, annihilator, image_basis, kernel_basis, rank
from .gmodules import GModule, coinvariant_space, dual, fixed_points, hom, tensor
from .groups import FiniteGroup


@dataclass
class IdentityCheck:
    name: str
    passed: bool
    witness: Optional[list] = None


@dataclass
class Lemma2Report:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _witness(a: Subspace, b: Subspace) -> Optional[list]:
    for v in a.basis:
        if not b.contains(v):
            return v.tolist()
    for v in b.basis:
        if not a.contains(v):
            return v.tolist()
    return None


def lemma2_check(f: FpMatrix) -> Lemma2Report:
    """The four annihilator identities for f and its transpose (the dual map).

    ann(im f^T) = ker f,  ann(im f) = ker f^T,  ann(ker f^T) = im f,  ann(ker f) = im f^T.
    """
    if f.rows != f.cols:
        raise ValueError("lemma2_check needs a square matrix")
    ft = f.transpose()
    ker_f, ker_ft = kernel_basis(f), kernel_basis(ft)
    im_f, im_ft = image_basis(f), image_basis(ft)
    pairs = [
        ("ann(im f*) = ker f", annihilator(im_ft), ker_f),
        ("ann(im f) = ker f*", annihilator(im_f), ker_ft),
        ("ann(ker f*) = im f", annihilator(ker_ft), im_f),
        ("ann(ker f) = im f*", annihilator(ker_f), im_ft),
    ]
    checks = []
    for name, lhs, rhs in pairs:
        ok = lhs == rhs
        checks.append(IdentityCheck(name, ok, None if ok else _witness(lhs, rhs)))
    return Lemma2Report(checks)


# ---------------------------------------------------------------------------
# the Ext/Tor pairing


def _pairing_perm(X: GModule, Y: GModule) -> np.ndarray:
    """Position in X (x) Y coordinates of each Hom(X, Y^*) coordinate.

    Hom(X, Y^*) coordinate (i, j) is the value <y_i | f(x_j)>; in X (x) Y the
    matching basis vector x_j (x) y_i sits at j * dim Y + i.
    """
    dx, dy = X.dim, Y.dim
    i, j = np.meshgrid(np.arange(dy), np.arange(dx), indexing="ij")
    return (j * dy + i).ravel()


def pair_vectors(F: np.ndarray, Z: np.ndarray, X: GModule, Y: GModule, n: int) -> np.ndarray:
    """Matrix of pairings between rows of F (cochains) and rows of Z (chains), unchecked."""
    p = X.p
    t = tuple_count(X.group, n)
    d = X.dim * Y.dim
    perm = _pairing_perm(X, Y)
    F = np.asarray(F, dtype=np.int64).reshape(-1, t, d)
    Z = np.asarray(Z, dtype=np.int64).reshape(-1, t, d)[:, :, perm]
    out = np.einsum("atk,btk->ab", F.astype(np.float64), Z.astype(np.float64))
    return np.mod(out, p).astype(np.int64)


def pair(f, z, X: GModule, Y: GModule, n: int) -> FpScalar:
    """<f, z> = sum over tuples c and components x (x) y of z of <y | f(c)(x)>.

    ``f`` is a degree-n cocycle with values in Hom(X, Y^*) and ``z`` a degree-n
    cycle with coefficients in X (x) Y.
    """
    if X.group is not Y.group or X.p != Y.p:
        raise ModuleError("X and Y must be modules over one group and field")
    H = hom(X, dual(Y))
    T = tensor(X, Y)
    f = np.mod(np.asarray(f, dtype=np.int64), X.p)
    z = np.mod(np.asarray(z, dtype=np.int64), X.p)
    size = tuple_count(X.group, n) * X.dim * Y.dim
    if f.shape != (size,) or z.shape != (size,):
        raise ModuleError(f"degree-{n} (co)chains must have length {size}")
    if np.any(coboundary_cached(H, n).matrix @ f):
        raise NotACocycle(f"f is not a degree-{n} cocycle")
    if np.any(boundary_cached(T, n).matrix @ z):
        raise NotACycle(f"z is not a degree-{n} cycle")
    return FpScalar(int(pair_vectors(f[None], z[None], X, Y, n)[0, 0]), X.p)


@dataclass
class PairingCertificate:
    group: FiniteGroup
    X: GModule
    Y: GModule
    degree: int
    matrix: FpMatrix
    dim_ext: int
    dim_tor: int

    @property
    def nonsingular(self) -> bool:
        return self.dim_ext == self.dim_tor and rank(self.matrix) == self.dim_ext

    def summary(self) -> dict:
        return {
            "degree": self.degree,
            "dim_ext": self.dim_ext,
            "dim_tor": self.dim_tor,
            "rank": rank(self.matrix) if self.matrix.rows and self.matrix.cols else 0,
            "nonsingular": self.nonsingular,
        }


def duality_certificate(X: GModule, Y: GModule, n: int) -> PairingCertificate:
    """Pairing matrix between Ext^n(X, Y^*) and Tor_n(X, Y) on representative bases.

    A size mismatch or a singular matrix can only come from a bug and raises
    InternalInconsistency.
    """
    if X.group is not Y.group or X.p != Y.p:
        raise ModuleError("X and Y must be modules over one group and field")
    E = cohomology(hom(X, dual(Y)), n)
    T = homology(tensor(X, Y), n)
    if E.dim_H != T.dim_H:
        raise InternalInconsistency(f"dim Ext^{n} = {E.dim_H} but dim Tor_{n} = {T.dim_H}")
    mat = FpMatrix(pair_vectors(E.cocycle_reps, T.cycle_reps, X, Y, n).reshape(E.dim_H, T.dim_H), X.p)
    cert = PairingCertificate(X.group, X, Y, n, mat, E.dim_H, T.dim_H)
    if not cert.nonsingular:
        raise InternalInconsistency(f"degree-{n} pairing matrix is singular")
    return cert


# ---------------------------------------------------------------------------
# coinvariants of the dual versus fixed points


def corollary6_sides(V: GModule) -> tuple:
    """(annihilator of [V^*, G], C_V(G)), both inside V = V^** in standard coordinates."""
    return annihilator(coinvariant_space(dual(V))), fixed_points(V)


def corollary6_check(V: GModule) -> bool:
    lhs, rhs = corollary6_sides(V)
    return lhs == rhs
