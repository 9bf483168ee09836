"""The acceptance computations, shared by the test suite and ``gcohom bench small``.

Every check returns a CriterionResult; nothing here asserts.  Budgets are wall
clock seconds (None means no budget).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Optional

import numpy as np

from . import barcomplex as bc
from .duality import corollary6_sides, duality_certificate, lemma2_check
from .errors import CapExceeded, IncompatibleFamily
from .exactla import FpMatrix, Subspace, caps, random_matrix
from .gmodules import (
    GModule,
    coinvariant_space,
    direct_sum,
    find_complement,
    fixed_points,
    from_matrices,
    is_completely_reducible,
    is_module_hom,
    permutation,
    regular,
    spin,
    submodule_lattice,
    trivial,
)
from .groups import SL2_GENERATORS, cyclic, dihedral, embed, point_stabilizer_chain, sl2, symmetric
from .localsys import SubgroupChain, homology_colimit_report, localize, splice, survival_analysis


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float = 0.0
    budget: Optional[float] = None
    detail: dict = field(default_factory=dict)
    blocking: bool = True

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.seconds <= self.budget

    @property
    def ok(self) -> bool:
        return self.passed and self.within_budget

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        budget = f" (budget {self.budget:g} s)" if self.budget is not None else ""
        extra = "" if self.blocking else " [non-blocking]"
        return f"[{status}] criterion {self.number:>2}: {self.title} -- {self.seconds:.2f} s{budget}{extra}"


def _timed(number: int, title: str, budget: Optional[float], fn: Callable[[], tuple], blocking: bool = True) -> CriterionResult:
    t0 = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, title, bool(passed), time.perf_counter() - t0, budget, detail, blocking)


# ---------------------------------------------------------------------------
# the module grid


def grid_groups() -> list:
    return [cyclic(2), cyclic(3), symmetric(3), dihedral(4)]


def grid_modules(G, p: int) -> list:
    return [("trivial", trivial(G, p)), ("permutation", permutation(G, p)), ("regular", regular(G, p))]


def grid(primes=(2, 3)) -> list:
    """(group name, module name, p, module) over the standard grid."""
    out = []
    for G in grid_groups():
        for p in primes:
            for name, V in grid_modules(G, p):
                out.append((G.name, name, p, V))
    return out


def sl2_natural(p: int = 3) -> GModule:
    G = sl2(p)
    return from_matrices(G, SL2_GENERATORS, p, name=f"natural SL(2,{p})")


# ---------------------------------------------------------------------------
# 1


def lemma2_suite(seed: int = 1, samples: int = 100, primes=(2, 3, 5), dims=range(1, 9)) -> tuple:
    rng = np.random.default_rng(seed)
    count = 0
    for p in primes:
        for d in dims:
            for _ in range(samples):
                f = random_matrix(rng, d, d, p)
                rep = lemma2_check(f)
                count += 1
                if not rep.passed:
                    bad = next(c for c in rep.checks if not c.passed)
                    return False, {"cases": count, "p": p, "dim": d, "identity": bad.name, "witness": bad.witness, "matrix": f.dense().tolist()}
    return True, {"cases": count}


def criterion_1(seed: int = 1) -> CriterionResult:
    return _timed(1, "annihilator identities for random endomorphisms", 5.0, lambda: lemma2_suite(seed))


# ---------------------------------------------------------------------------
# 2


def duality_suite(degrees=(0, 1, 2), primes=(2, 3)) -> tuple:
    count = 0
    for G in grid_groups():
        for p in primes:
            mods = grid_modules(G, p)
            for xn, X in mods:
                for yn, Y in mods:
                    for n in degrees:
                        cert = duality_certificate(X, Y, n)
                        count += 1
                        if not cert.nonsingular:
                            return False, {"cases": count, "group": G.name, "X": xn, "Y": yn, "p": p, "n": n, **cert.summary()}
    return True, {"cases": count}


def criterion_2() -> CriterionResult:
    return _timed(2, "Ext/Tor dimensions agree with a nonsingular pairing", 120.0, duality_suite)


# ---------------------------------------------------------------------------
# 3


def complex_axioms_on_cache() -> tuple:
    """delta^{n+1} delta^n = 0 and partial_n partial_{n+1} = 0 for every consecutive
    pair of differentials held in the result cache."""
    keys = set(bc.cache.keys())
    checked = 0
    for kind, key, n in sorted(k for k in keys if k[0] in ("delta", "partial")):
        nxt = (kind, key, n + 1)
        if nxt not in keys:
            continue
        a = bc.cache.peek((kind, key, n)).matrix
        b = bc.cache.peek(nxt).matrix
        prod = (b @ a) if kind == "delta" else (a @ b)
        checked += 1
        if not prod.is_zero():
            return False, {"pairs": checked, "kind": kind, "degree": n}
    return checked > 0, {"pairs": checked}


def criterion_3() -> CriterionResult:
    return _timed(3, "complex axioms on every complex built", None, complex_axioms_on_cache)


# ---------------------------------------------------------------------------
# 4


def degree_zero_suite() -> tuple:
    count = 0
    for gname, mname, p, V in grid() + [("SL(2,3)", "natural", 3, sl2_natural(3))]:
        h0, hz = bc.cohomology(V, 0).dim_H, bc.homology(V, 0).dim_H
        fix, co = fixed_points(V).dim, V.dim - coinvariant_space(V).dim
        count += 1
        if h0 != fix or hz != co:
            return False, {"group": gname, "module": mname, "p": p, "H0": h0, "fixed": fix, "H_0": hz, "V/[V,G]": co}
    return True, {"cases": count}


def criterion_4() -> CriterionResult:
    return _timed(4, "degree-0 identifications on the grid", None, degree_zero_suite)


# ---------------------------------------------------------------------------
# 5


def cyclic_trivial_oracle(p: int, top: int = 2) -> list:
    """dim H^n(Z/p, GF(p)) for n <= top from inhomogeneous (unnormalized) cochains.

    Independent of the library: functions (Z/p)^n -> GF(p) indexed in base p,
    differential written from the definition, rank by plain Gaussian elimination.
    """

    def delta(n):
        rows, cols = p ** (n + 1), p**n
        M = [[0] * cols for _ in range(rows)]
        for r in range(rows):
            g = [(r // p ** (n - k)) % p for k in range(n + 1)]  # g[0] most significant

            def idx(t):
                v = 0
                for x in t:
                    v = v * p + x
                return v

            M[r][idx(g[1:])] += 1
            for i in range(1, n + 1):
                t = g[: i - 1] + [(g[i - 1] + g[i]) % p] + g[i + 1 :]
                M[r][idx(t)] += (-1) ** i
            M[r][idx(g[:n])] += (-1) ** (n + 1)
        return [[x % p for x in row] for row in M]

    def rank(M):
        M = [row[:] for row in M]
        rk, cols = 0, len(M[0]) if M else 0
        for c in range(cols):
            piv = next((r for r in range(rk, len(M)) if M[r][c]), None)
            if piv is None:
                continue
            M[rk], M[piv] = M[piv], M[rk]
            inv = pow(M[rk][c], p - 2, p)
            M[rk] = [(x * inv) % p for x in M[rk]]
            for r in range(len(M)):
                if r != rk and M[r][c]:
                    f = M[r][c]
                    M[r] = [(x - f * y) % p for x, y in zip(M[r], M[rk])]
            rk += 1
        return rk

    ranks = [rank(delta(n)) for n in range(top + 1)]
    return [p**n - ranks[n] - (ranks[n - 1] if n else 0) for n in range(top + 1)]


def known_values_suite(primes=(2, 3, 5), top: int = 2) -> tuple:
    table = {}
    for p in primes:
        G = cyclic(p)
        lib = [bc.cohomology(trivial(G, p), n).dim_H for n in range(top + 1)]
        oracle = cyclic_trivial_oracle(p, top)
        table[p] = {"library": lib, "oracle": oracle}
        if lib != oracle or lib != [1] * (top + 1):
            return False, table
    return True, table


def criterion_5() -> CriterionResult:
    return _timed(5, "dim H^n(C_p, k) = 1, cross-checked by a dense oracle", 10.0, known_values_suite)


# ---------------------------------------------------------------------------
# 6


def eckmann_shapiro_suite(ms=(3, 4), primes=(2, 3), degrees=(0, 1, 2)) -> tuple:
    table = []
    ok = True
    for m in ms:
        big, small = symmetric(m), symmetric(m - 1)
        for p in primes:
            lhs = [bc.cohomology(permutation(big, p), n).dim_H for n in degrees]
            rhs = [bc.cohomology(trivial(small, p), n).dim_H for n in degrees]
            table.append({"m": m, "p": p, "Sym(m) perm": lhs, "Sym(m-1) trivial": rhs})
            ok &= lhs == rhs
    return ok, {"rows": table}


def criterion_6() -> CriterionResult:
    return _timed(6, "Eckmann-Shapiro instances for Sym(3), Sym(4)", 300.0, eckmann_shapiro_suite)


# ---------------------------------------------------------------------------
# 7


def sym_chain(n: int = 4, start: int = 2) -> SubgroupChain:
    return SubgroupChain(point_stabilizer_chain(n, start))


def localization_suite(seed: int = 1, samples: int = 50, degrees=(0, 1, 2), p: int = 2) -> tuple:
    rng = np.random.default_rng(seed)
    chain = sym_chain()
    checked = 0
    for V in (trivial(chain.top, p), permutation(chain.top, p)):
        mods = chain.level_modules(V)
        for n in degrees:
            size = bc.cochain_dim(V, n)
            d_top = bc.coboundary_cached(V, n).matrix
            d_lvl = [bc.coboundary_cached(M, n).matrix for M in mods]
            for _ in range(samples):
                phi = rng.integers(0, p, size=size)
                fam = localize(phi, V, n, chain)
                back = splice(fam)
                again = localize(back, V, n, chain)
                if not np.array_equal(back, phi % p):
                    return False, {"failure": "splice(localize(phi)) != phi", "module": V.name, "degree": n}
                if not all(np.array_equal(a, b) for a, b in zip(again.cochains, fam.cochains)):
                    return False, {"failure": "localize(splice(F)) != F", "module": V.name, "degree": n}
                dfam = localize(d_top @ phi, V, n + 1, chain)
                for i, (D, c) in enumerate(zip(d_lvl, fam.cochains)):
                    if not np.array_equal(D @ c, dfam.cochains[i]):
                        return False, {"failure": "delta does not commute with restriction", "level": i, "degree": n}
                checked += 1
            # a corrupted family must be rejected
            if n > 0 or V.dim > 1:
                bad = localize(rng.integers(0, p, size=size), V, n, chain)
                bad.cochains[0] = (bad.cochains[0] + 1) % p
                try:
                    splice(bad)
                    return False, {"failure": "incompatible family accepted", "degree": n}
                except IncompatibleFamily:
                    pass
    return True, {"cochains": checked}


def criterion_7(seed: int = 1) -> CriterionResult:
    return _timed(7, "localize/splice round trips and delta-naturality", None, lambda: localization_suite(seed))


# ---------------------------------------------------------------------------
# 8


def augmentation_ses(p: int):
    G = symmetric(3)
    V = permutation(G, p)
    W = spin(V, [[1, p - 1, 0]])
    return bc.ses_from_submodule(W)


def les_suite(primes=(2, 3), top: int = 2) -> tuple:
    detail = {}
    ok = True
    for p in primes:
        les = bc.long_exact_sequence(augmentation_ses(p), top)
        detail[f"aug p={p}"] = [f"{nd.name}:{nd.dim}{'' if nd.exact else '!'}" for nd in les.nodes]
        ok &= les.exact and len(les.nodes) == 3 * (top + 1)
        G = symmetric(3)
        split = bc.long_exact_sequence(bc.split_ses(trivial(G, p), permutation(G, p)), top)
        zero = all(m.is_zero() for _, m in split.connecting_maps())
        detail[f"split p={p}"] = {"exact": split.exact, "connecting_zero": zero}
        ok &= split.exact and zero
    return ok, detail


def criterion_8() -> CriterionResult:
    return _timed(8, "long exact sequence exactness and split connecting maps", 60.0, les_suite)


# ---------------------------------------------------------------------------
# 9


def projection_identities(pi: FpMatrix, W, V: GModule) -> bool:
    P = pi.dense()
    p = V.p
    idem = np.array_equal((P @ P) % p, P)
    equiv = is_module_hom(P, V, V)
    image = Subspace.span(P.T, V.dim, p)
    return idem and equiv and image == W.space


def complete_reducibility_suite() -> tuple:
    checked, proj = [], 0
    for gname, mname, p, V in grid():
        if gcd(p, V.group.order) != 1:
            continue
        lattice = submodule_lattice(V)
        if not is_completely_reducible(V):
            return False, {"group": gname, "module": mname, "p": p, "failure": "not completely reducible"}
        for W in lattice:
            pi = find_complement(W)
            if pi is None or not projection_identities(pi, W, V):
                return False, {"group": gname, "module": mname, "p": p, "failure": "bad projection", "dim W": W.dim}
            proj += 1
        checked.append(f"{gname}/{mname}/p={p}")
    V = permutation(symmetric(3), 3)
    line = spin(V, [[1, 1, 1]])
    nonsplit = (not is_completely_reducible(V)) and find_complement(line) is None
    return nonsplit, {"maschke_cases": checked, "projections": proj, "perm Sym(3) p=3 reducible": not nonsplit}


def criterion_9() -> CriterionResult:
    return _timed(9, "complete reducibility and complement projections", None, complete_reducibility_suite)


# ---------------------------------------------------------------------------
# 10


def coinvariant_annihilator_suite() -> tuple:
    count = 0
    cases = grid() + [("SL(2,3)", "natural", 3, sl2_natural(3))]
    for gname, mname, p, V in cases:
        lhs, rhs = corollary6_sides(V)
        count += 1
        if lhs != rhs:
            return False, {"group": gname, "module": mname, "p": p, "lhs": lhs.dim, "rhs": rhs.dim}
    lhs, rhs = corollary6_sides(cases[-1][3])
    return lhs.dim == rhs.dim == 0, {"cases": count, "SL(2,3) sides": [lhs.dim, rhs.dim]}


def criterion_10() -> CriterionResult:
    return _timed(10, "annihilator of dual coinvariants equals fixed points", None, coinvariant_annihilator_suite)


# ---------------------------------------------------------------------------
# 11


def colimit_chains() -> list:
    """(label, chain, module, degrees) for the three chains with top element."""
    G = symmetric(3)
    single = SubgroupChain([], top=G)
    s2 = embed([(1, 0, 2)], G, name="Sym(2)")
    two = SubgroupChain([s2])
    C4 = cyclic(4)
    C2 = embed([(2, 3, 0, 1)], C4, name="C2")
    C1 = embed([], C2.sub, name="C1")
    cyc = SubgroupChain([C1, C2])
    return [
        ("single level Sym(3)", single, trivial(G, 2), (0, 1)),
        ("Sym(2) < Sym(3)", two, permutation(G, 2), (0, 1)),
        ("C1 < C2 < C4", cyc, trivial(C4, 2), (0, 1, 2)),
    ]


def colimit_suite() -> tuple:
    detail = {}
    ok = True
    for label, chain, V, degrees in colimit_chains():
        rows = []
        for n in degrees:
            rep = homology_colimit_report(chain, V, n)
            rows.append({"n": n, "levels": rep.level_dims, "colimit": rep.colimit_dim, "global": rep.global_dim, "passed": rep.passed})
            ok &= rep.passed
        detail[label] = rows
    return ok, detail


def criterion_11() -> CriterionResult:
    return _timed(11, "homology colimit check on three chains", None, colimit_suite)


# ---------------------------------------------------------------------------
# 12


def survival_suite(degrees=(1, 2), p: int = 2) -> tuple:
    chain = sym_chain()
    G = chain.top
    A, B = trivial(G, p), permutation(G, p)
    S = direct_sum(A, B)
    detail = {}
    ok = True
    for n in degrees:
        ra, rb, rs = (survival_analysis(chain, M, n) for M in (A, B, S))
        summed = ra + rb
        additive = summed.image_dims == rs.image_dims and summed.level_dims == rs.level_dims
        mono = all(r.monotone() for r in (ra, rb, rs))
        detail[f"n={n}"] = {"k": ra.image_dims, "perm": rb.image_dims, "k+perm": rs.image_dims, "monotone": mono, "additive": additive}
        ok &= additive and mono
    return ok, detail


def criterion_12() -> CriterionResult:
    return _timed(12, "survival image dims monotone and additive", None, survival_suite)


# ---------------------------------------------------------------------------
# 13


def stretch_rows(p: int = 2) -> list:
    """H^1 and an attempt at H^2 of Sym(5) on its permutation module."""
    G = symmetric(5)
    V = permutation(G, p)
    rows = []
    for n in (1, 2):
        shape = bc.complex_shape(V, n)
        row = {"task": f"H^{n}(Sym(5), perm; p={p})", "delta_out": shape["delta_out"], "delta_in": shape["delta_in"]}
        t0 = time.perf_counter()
        try:
            row["dim_H"] = bc.cohomology(V, n).dim_H
            row["status"] = "computed"
        except CapExceeded as exc:
            row["dim_H"] = None
            row["status"] = f"declined: {exc}"
        row["seconds"] = round(time.perf_counter() - t0, 3)
        rows.append(row)
    return rows


def stretch_suite() -> tuple:
    rows = stretch_rows()
    h1 = rows[0]
    h2 = rows[1]
    ok = h1["status"] == "computed" and h1["dim_H"] == 1
    ok &= h2["status"] == "computed" or h2["status"].startswith("declined")
    ok &= h2["delta_out"][1] == 119**2 * 5
    return ok, {"rows": rows, "dense cap": caps.dense}


def criterion_13() -> CriterionResult:
    return _timed(13, "Sym(5) permutation module stretch", 1800.0, stretch_suite, blocking=False)


# ---------------------------------------------------------------------------


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
    13: criterion_13,
}


def run_all(numbers=None, seed: int = 1) -> list:
    """Run criteria in order; 3 inspects the complexes built by 1-8, so it runs after 8."""
    numbers = sorted(numbers or CRITERIA)
    order = [n for n in numbers if n != 3]
    if 3 in numbers:
        order.insert(next((i for i, n in enumerate(order) if n > 8), len(order)), 3)
    out = []
    for n in order:
        fn = CRITERIA[n]
        out.append(fn(seed) if n in (1, 7) else fn())
    return sorted(out, key=lambda r: r.number)
