"""Seeded property suites behind ``gcohom verify``, plus the mutation hook.

A mutation swaps a library function for a deliberately wrong one while a suite
runs; a working suite must then fail and print a witness.
"""

from __future__ import annotations

import os
from contextlib import ExitStack, contextmanager
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .. import barcomplex as bc
from .. import criteria as cr
from .. import duality
from .. import exactla as la
from .. import gmodules as gm
from ..groups import compose, perm_inverse

MUTATE_ENV = "GCOHOM_MUTATE"


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int = 0
    counterexample: Optional[dict] = None
    notes: list = field(default_factory=list)

    def lines(self) -> list:
        head = f"{self.name}: {'pass' if self.passed else 'FAIL'} ({self.cases} cases)"
        out = [head]
        if self.counterexample is not None:
            out.append(f"  first counterexample: {self.counterexample}")
        out.extend(f"  {n}" for n in self.notes)
        return out


def _from_pair(name: str, res: tuple, cases_key: str = "cases") -> SuiteResult:
    ok, detail = res
    cases = detail.get(cases_key, 0) if isinstance(detail, dict) else 0
    return SuiteResult(name, bool(ok), cases if isinstance(cases, int) else len(cases), None if ok else detail)


# ---------------------------------------------------------------------------
# suites


def suite_exactla(seed: int) -> SuiteResult:
    """rank-nullity, RREF idempotence, solve and kernel/image consistency on random matrices."""
    rng = np.random.default_rng(seed)
    cases = 0
    for p in (2, 3, 5, 7):
        for _ in range(40):
            r, c = (int(x) for x in rng.integers(1, 24, size=2))
            m = la.random_matrix(rng, r, c, p)
            if rng.random() < 0.5:  # force rank deficiency
                k = int(rng.integers(1, min(r, c) + 1))
                m = la.random_matrix(rng, r, k, p) @ la.random_matrix(rng, k, c, p)
            K = la.kernel_basis(m)
            I = la.image_basis(m)
            rk = la.rank(m)
            red, rk_rref = la.rref(m)
            red2, _ = la.rref(la.FpMatrix(red, p))
            cases += 1
            witness = {"p": p, "shape": [r, c], "matrix": m.dense().tolist()}
            if K.dim + rk != c or I.dim != rk or rk_rref != rk:
                return SuiteResult("exactla", False, cases, {**witness, "failure": "rank-nullity"})
            if K.dim and np.any((m @ la.FpMatrix(K.basis.T, p)).dense()):
                return SuiteResult("exactla", False, cases, {**witness, "failure": "kernel vector not killed"})
            if not np.array_equal(red, red2):
                return SuiteResult("exactla", False, cases, {**witness, "failure": "rref not idempotent"})
            x = rng.integers(0, p, size=c)
            b = m @ x
            sol = la.solve(m, b)
            if sol is None or not np.array_equal(m @ sol, b):
                return SuiteResult("exactla", False, cases, {**witness, "failure": "solve"})
    return SuiteResult("exactla", True, cases)


def suite_lemma2(seed: int) -> SuiteResult:
    return _from_pair("lemma2", cr.lemma2_suite(seed))


def suite_groups(seed: int) -> SuiteResult:
    cases = 0
    for G in cr.grid_groups() + [cr.symmetric(4), cr.sl2(3)]:
        els = G.elements
        for i in range(G.order):
            a = els[i]
            if G.mult(i, int(G.inv[i])) != G.identity_index or els[int(G.inv[i])] != perm_inverse(a):
                return SuiteResult("groups", False, cases, {"group": G.name, "element": i, "failure": "inverse"})
            for j in range(G.order):
                cases += 1
                if els[G.mult(i, j)] != compose(a, els[j]):
                    return SuiteResult("groups", False, cases, {"group": G.name, "i": i, "j": j, "failure": "mult"})
    return SuiteResult("groups", True, cases)


def suite_gmodules(seed: int) -> SuiteResult:
    """Actions are homomorphisms; dual/tensor/hom preserve that; fixed and coinvariant dims add up."""
    cases = 0
    for gname, mname, p, V in cr.grid():
        variants = [("V", V), ("dual", gm.dual(V))]
        if V.dim <= 4:
            variants.append(("tensor", gm.tensor(V, V)))
        for label, M in variants:
            G = M.group
            A = M.action
            for i in range(G.order):
                for j in range(G.order):
                    if not np.array_equal((A[i] @ A[j]) % p, A[G.mult(i, j)]):
                        return SuiteResult("gmodules", False, cases, {"group": gname, "module": f"{label}({mname})", "p": p, "i": i, "j": j})
            cases += 1
        # dim C_{V*}(G) = dim V - dim [V,G]
        if gm.fixed_points(gm.dual(V)).dim != V.dim - gm.coinvariant_space(V).dim:
            return SuiteResult("gmodules", False, cases, {"group": gname, "module": mname, "p": p, "failure": "fixed/coinvariant dims"})
    return SuiteResult("gmodules", True, cases)


def suite_complexes(seed: int) -> SuiteResult:
    cases = 0
    for gname, mname, p, V in cr.grid():
        for n in (0, 1):
            d0, d1 = bc.coboundary_cached(V, n).matrix, bc.coboundary_cached(V, n + 1).matrix
            cases += 1
            if not (d1 @ d0).is_zero():
                return SuiteResult("complexes", False, cases, {"group": gname, "module": mname, "p": p, "failure": f"delta^{n + 1} delta^{n} != 0"})
            b1, b2 = bc.boundary_cached(V, n + 1).matrix, bc.boundary_cached(V, n + 2).matrix
            cases += 1
            if not (b1 @ b2).is_zero():
                return SuiteResult("complexes", False, cases, {"group": gname, "module": mname, "p": p, "failure": f"partial_{n + 1} partial_{n + 2} != 0"})
    return SuiteResult("complexes", True, cases)


def suite_degree0(seed: int) -> SuiteResult:
    return _from_pair("degree0", cr.degree_zero_suite())


def suite_known(seed: int) -> SuiteResult:
    ok, table = cr.known_values_suite()
    return SuiteResult("known", ok, len(table), None if ok else table)


def suite_eckmann_shapiro(seed: int) -> SuiteResult:
    ok, detail = cr.eckmann_shapiro_suite()
    return SuiteResult("eckmann_shapiro", ok, len(detail["rows"]), None if ok else detail)


def suite_duality(seed: int) -> SuiteResult:
    return _from_pair("duality", cr.duality_suite())


def suite_annihilator(seed: int) -> SuiteResult:
    return _from_pair("annihilator", cr.coinvariant_annihilator_suite())


def suite_localization(seed: int) -> SuiteResult:
    return _from_pair("localization", cr.localization_suite(seed), "cochains")


def suite_les(seed: int) -> SuiteResult:
    ok, detail = cr.les_suite()
    return SuiteResult("les", ok, len(detail), None if ok else detail)


def suite_reducibility(seed: int) -> SuiteResult:
    ok, detail = cr.complete_reducibility_suite()
    return SuiteResult("reducibility", ok, detail.get("projections", 0), None if ok else detail)


def suite_colimit(seed: int) -> SuiteResult:
    ok, detail = cr.colimit_suite()
    return SuiteResult("colimit", ok, sum(len(v) for v in detail.values()), None if ok else detail)


def suite_survival(seed: int) -> SuiteResult:
    ok, detail = cr.survival_suite()
    return SuiteResult("survival", ok, len(detail), None if ok else detail)


SUITES: dict = {
    "exactla": suite_exactla,
    "lemma2": suite_lemma2,
    "groups": suite_groups,
    "gmodules": suite_gmodules,
    "complexes": suite_complexes,
    "degree0": suite_degree0,
    "known": suite_known,
    "eckmann_shapiro": suite_eckmann_shapiro,
    "duality": suite_duality,
    "annihilator": suite_annihilator,
    "localization": suite_localization,
    "les": suite_les,
    "reducibility": suite_reducibility,
    "colimit": suite_colimit,
    "survival": suite_survival,
}


# ---------------------------------------------------------------------------
# mutations


def _lossy_annihilator(original):
    def wrapper(S):
        ann = original(S)
        if ann.dim == 0:
            return ann
        return la.Subspace.span(ann.basis[:-1], ann.ambient_dim, ann.p)

    return wrapper


def _broken_coboundary(original):
    def wrapper(V, n):
        res = original(V, n)
        M = np.array(res.matrix.dense())
        if M.size:
            M[0, 0] = (M[0, 0] + 1) % V.p
        return bc.CoboundaryMatrix(res.source, res.target, la.FpMatrix(M, V.p))

    return wrapper


def _singular_pairing(original):
    def wrapper(F, Z, X, Y, n):
        out = np.array(original(F, Z, X, Y, n))
        if out.size:
            out[0, :] = 0
        return out

    return wrapper


def _patch(stack: ExitStack, obj, attr: str, value):
    old = getattr(obj, attr)
    setattr(obj, attr, value)
    stack.callback(setattr, obj, attr, old)


MUTATIONS: dict = {
    "annihilator": ("annihilators used by the duality checks lose a basis vector", lambda st: _patch(st, duality, "annihilator", _lossy_annihilator(duality.annihilator))),
    "coboundary": ("one coboundary entry off by one", lambda st: _patch(st, bc, "coboundary", _broken_coboundary(bc.coboundary))),
    "pairing": ("first row of every pairing matrix zeroed", lambda st: _patch(st, duality, "pair_vectors", _singular_pairing(duality.pair_vectors))),
}


@contextmanager
def mutated(name: Optional[str]):
    """Apply a named mutation for the duration of the block; the result cache is cleared on entry and exit."""
    if not name:
        yield
        return
    if name not in MUTATIONS:
        raise KeyError(f"unknown mutation {name!r}; expected one of {sorted(MUTATIONS)}")
    bc.cache.clear()
    with ExitStack() as stack:
        stack.callback(bc.cache.clear)
        MUTATIONS[name][1](stack)
        yield


def run_suite(name: str, seed: int = 1, mutation: Optional[str] = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {sorted(SUITES)} or 'all'")
    mutation = mutation if mutation is not None else os.environ.get(MUTATE_ENV) or None
    with mutated(mutation):
        try:
            res = SUITES[name](seed)
        except Exception as exc:  # a broken build may fail anywhere; report it as the witness
            res = SuiteResult(name, False, 0, {"error": type(exc).__name__, "message": str(exc)})
    if mutation:
        res.notes.append(f"mutation active: {mutation} ({MUTATIONS[mutation][0]})")
    return res


def run_suites(names, seed: int = 1, mutation: Optional[str] = None, progress: Optional[Callable] = None) -> list:
    names = list(SUITES) if names in ("all", ["all"]) else list(names)
    out = []
    for n in names:
        r = run_suite(n, seed, mutation)
        out.append(r)
        if progress:
            progress(r)
    return out
