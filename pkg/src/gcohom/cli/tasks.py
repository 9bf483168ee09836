"""Task execution: one function per task kind, each returning a JSON-ready dict."""

from __future__ import annotations

import zlib

import numpy as np

from .. import barcomplex as bc
from .. import gmodules as gm
from ..duality import corollary6_sides, duality_certificate
from ..errors import IncompatibleFamily
from ..localsys import hypothesis_checks, homology_colimit_report, localize, splice, survival_analysis
from .scenario import Workspace, task_degrees


def task_rng(seed: int, task_id: str) -> np.random.Generator:
    """Per-task generator: depends on the scenario seed and the task id, not on task order."""
    return np.random.default_rng([seed, zlib.crc32(task_id.encode())])


def _degrees(t: dict, default=(0, 1, 2)) -> list:
    return task_degrees(t) or list(default)


def _module_info(V: gm.GModule) -> dict:
    return {"group": V.group.name, "order": V.group.order, "dim": V.dim}


def _cohomology(ws: Workspace, t: dict, rng) -> dict:
    V = ws.module(t["module"])
    rows = [bc.cohomology(V, n).summary() for n in _degrees(t)]
    return {**_module_info(V), "dims": [r["dim_H"] for r in rows], "per_degree": rows}


def _homology(ws: Workspace, t: dict, rng) -> dict:
    V = ws.module(t["module"])
    rows = [bc.homology(V, n).summary() for n in _degrees(t)]
    return {**_module_info(V), "dims": [r["dim_H"] for r in rows], "per_degree": rows}


def _ext(ws: Workspace, t: dict, rng) -> dict:
    X, Y = ws.module(t["x"]), ws.module(t["y"])
    rows = [bc.ext(X, Y, n).summary() for n in _degrees(t)]
    return {"dims": [r["dim_H"] for r in rows], "per_degree": rows}


def _tor(ws: Workspace, t: dict, rng) -> dict:
    X, Y = ws.module(t["x"]), ws.module(t["y"])
    rows = [bc.tor(X, Y, n).summary() for n in _degrees(t)]
    return {"dims": [r["dim_H"] for r in rows], "per_degree": rows}


def _duality(ws: Workspace, t: dict, rng) -> dict:
    X, Y = ws.module(t["x"]), ws.module(t["y"])
    rows = []
    for n in _degrees(t):
        cert = duality_certificate(X, Y, n)
        rows.append({**cert.summary(), "matrix": cert.matrix.dense().tolist()})
    return {"nonsingular": all(r["nonsingular"] for r in rows), "per_degree": rows}


def _ses(ws: Workspace, t: dict) -> bc.ShortExactSequence:
    if "split" in t:
        A, C = (ws.module(m) for m in t["split"])
        return bc.split_ses(A, C)
    V = ws.module(t["module"])
    sub = t.get("sub", "coinv")
    if sub == "coinv":
        W = gm.coinvariants(V)
    elif sub == "fixed":
        W = gm.Submodule(V, gm.fixed_points(V))
    else:
        W = gm.spin(V, sub)
    return bc.ses_from_submodule(W)


def _les(ws: Workspace, t: dict, rng) -> dict:
    ses = _ses(ws, t)
    les = bc.long_exact_sequence(ses, t.get("top_degree", 2))
    connecting = [{"map": nm, "shape": list(m.shape), "zero": m.is_zero()} for nm, m in les.connecting_maps()]
    return {
        "dims": {"A": ses.A.dim, "B": ses.B.dim, "C": ses.C.dim},
        "exact": les.exact,
        "nodes": les.table(),
        "connecting": connecting,
        "connecting_zero": all(c["zero"] for c in connecting),
    }


def _roundtrip(ws: Workspace, t: dict, rng) -> dict:
    chain = ws.chain(t["chain"])
    V = ws.module(t["module"])
    p = V.p
    samples = t.get("samples", 50)
    mods = chain.level_modules(V)
    rows = []
    for n in _degrees(t):
        size = bc.cochain_dim(V, n)
        d_top = bc.coboundary_cached(V, n).matrix
        d_lvl = [bc.coboundary_cached(M, n).matrix for M in mods]
        ok_splice = ok_local = ok_nat = True
        for _ in range(samples):
            phi = rng.integers(0, p, size=size)
            fam = localize(phi, V, n, chain)
            back = splice(fam)
            ok_splice &= bool(np.array_equal(back, phi))
            again = localize(back, V, n, chain)
            ok_local &= all(np.array_equal(a, b) for a, b in zip(again.cochains, fam.cochains))
            dfam = localize(d_top @ phi, V, n + 1, chain)
            ok_nat &= all(np.array_equal(D @ c, dc) for D, c, dc in zip(d_lvl, fam.cochains, dfam.cochains))
        rejected = None
        if len(chain) > 1 and bc.cochain_dim(mods[0], n):
            bad = localize(rng.integers(0, p, size=size), V, n, chain)
            bad.cochains[0] = (bad.cochains[0] + 1) % p
            try:
                splice(bad)
                rejected = False
            except IncompatibleFamily:
                rejected = True
        rows.append(
            {
                "degree": n,
                "samples": samples,
                "splice_localize": ok_splice,
                "localize_splice": ok_local,
                "delta_natural": ok_nat,
                "rejects_incompatible": rejected,
            }
        )
    ok = all(r["splice_localize"] and r["localize_splice"] and r["delta_natural"] and r["rejects_incompatible"] is not False for r in rows)
    return {"levels": [g.name for g in chain.levels], "passed": ok, "per_degree": rows}


def _survival_dict(rep) -> dict:
    return {
        "degree": rep.degree,
        "level_dims": rep.level_dims,
        "image_dims": rep.image_dims,
        "stable_dims": rep.stable_dims,
        "monotone": rep.monotone(),
    }


def _survival(ws: Workspace, t: dict, rng) -> dict:
    chain = ws.chain(t["chain"])
    V = ws.module(t["module"])
    rows = []
    for n in _degrees(t, (1,)):
        rep = survival_analysis(chain, V, n)
        row = _survival_dict(rep)
        if "summands" in t:
            A, B = (ws.module(m) for m in t["summands"])
            parts = survival_analysis(chain, A, n) + survival_analysis(chain, B, n)
            row["additive"] = parts.image_dims == rep.image_dims and parts.level_dims == rep.level_dims
        rows.append(row)
    return {"levels": [g.name for g in chain.levels], "per_degree": rows}


def _hypotheses(ws: Workspace, t: dict, rng) -> dict:
    target = ws.chain(t["chain"]) if "chain" in t else ws.group(t["group"])
    U = ws.module(t["u"]) if "u" in t else None
    V = ws.module(t["v"]) if "v" in t else None
    return hypothesis_checks(target, U, V, p=ws.p).as_dict()


def _reducibility(ws: Workspace, t: dict, rng) -> dict:
    V = ws.module(t["module"])
    lattice = gm.submodule_lattice(V)
    complements = 0
    for W in lattice:
        if gm.find_complement(W) is not None:
            complements += 1
    return {
        **_module_info(V),
        "completely_reducible": complements == len(lattice),
        "submodules": len(lattice),
        "submodule_dims": sorted(W.dim for W in lattice),
        "with_complement": complements,
    }


def _colimit(ws: Workspace, t: dict, rng) -> dict:
    chain = ws.chain(t["chain"])
    V = ws.module(t["module"])
    rows = []
    for n in _degrees(t, (0, 1)):
        rep = homology_colimit_report(chain, V, n)
        rows.append(
            {
                "degree": n,
                "level_dims": rep.level_dims,
                "colimit_dim": rep.colimit_dim,
                "global_dim": rep.global_dim,
                "coinvariants_sum": rep.coinvariants_sum,
                "passed": rep.passed,
            }
        )
    return {"passed": all(r["passed"] for r in rows), "per_degree": rows}


def _annihilator(ws: Workspace, t: dict, rng) -> dict:
    V = ws.module(t["module"])
    lhs, rhs = corollary6_sides(V)
    return {**_module_info(V), "annihilator_dim": lhs.dim, "fixed_dim": rhs.dim, "equal": lhs == rhs}


RUNNERS = {
    "cohomology": _cohomology,
    "homology": _homology,
    "ext": _ext,
    "tor": _tor,
    "duality_certificate": _duality,
    "les": _les,
    "localize_splice_roundtrip": _roundtrip,
    "survival": _survival,
    "hypothesis_checks": _hypotheses,
    "complete_reducibility": _reducibility,
    "homology_colimit": _colimit,
    "coinvariant_annihilator": _annihilator,
}


def task_inputs(t: dict) -> dict:
    return {k: v for k, v in t.items() if k not in ("id", "kind")}


def run_task(ws: Workspace, t: dict, index: int) -> dict:
    tid = t.get("id", f"task{index}")
    return jsonable(RUNNERS[t["kind"]](ws, t, task_rng(ws.scenario.seed, tid)))


def jsonable(obj):
    """Convert numpy scalars/arrays (recursively) into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj
