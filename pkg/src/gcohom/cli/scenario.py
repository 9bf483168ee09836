"""Scenario files: TOML tables of groups, modules, chains, and a task list.

See ``docs/scenario-format.md`` for the schema.  Parsing reports TOML syntax
errors with their line/column; validation rejects undefined names, unknown
task kinds, bad fields and cap violations before anything is computed.
"""

from __future__ import annotations

import ast
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .. import gmodules as gm
from ..errors import GcohomError
from ..exactla import MAX_PRIME, is_prime
from ..groups import (
    DEFAULT_ORDER_CAP,
    NAMED,
    SL2_GENERATORS,
    FiniteGroup,
    SubgroupEmbedding,
    embed,
    group_from_generators,
    matrix_group,
    named_group,
    parse_cycles,
)
from ..localsys import SubgroupChain

TASK_KINDS = (
    "cohomology",
    "homology",
    "ext",
    "tor",
    "duality_certificate",
    "les",
    "localize_splice_roundtrip",
    "survival",
    "hypothesis_checks",
    "complete_reducibility",
    "homology_colimit",
    "coinvariant_annihilator",
)

# fields each task kind accepts (besides id and kind); the first group is required
TASK_FIELDS = {
    "cohomology": ({"module"}, {"degrees", "degree"}),
    "homology": ({"module"}, {"degrees", "degree"}),
    "ext": ({"x", "y"}, {"degrees", "degree"}),
    "tor": ({"x", "y"}, {"degrees", "degree"}),
    "duality_certificate": ({"x", "y"}, {"degrees", "degree"}),
    "les": (set(), {"module", "sub", "split", "top_degree"}),
    "localize_splice_roundtrip": ({"chain", "module"}, {"degrees", "degree", "samples"}),
    "survival": ({"chain", "module"}, {"degrees", "degree", "summands"}),
    "hypothesis_checks": (set(), {"chain", "group", "u", "v"}),
    "complete_reducibility": ({"module"}, set()),
    "homology_colimit": ({"chain", "module"}, {"degrees", "degree"}),
    "coinvariant_annihilator": ({"module"}, set()),
}

DEFAULT_CAPS = {"max_degree": 3, "order": DEFAULT_ORDER_CAP, "dense": 2**13, "sparse": 2**24}

# module expression functions: name -> (min args, max args)
MODULE_FUNCS = {
    "trivial": (1, 2),
    "perm": (1, 1),
    "permutation": (1, 1),
    "regular": (1, 1),
    "natural": (1, 1),
    "dual": (1, 1),
    "tensor": (2, 8),
    "hom": (2, 2),
    "sum": (2, 8),
    "restrict": (2, 2),
    "coinv": (1, 1),
    "fixed": (1, 1),
    "quotient_coinv": (1, 1),
    "spin": (2, 2),
}


class ScenarioError(GcohomError):
    """Parse or validation failure; ``kind`` is "parse" or "validation"."""

    def __init__(self, message: str, kind: str = "validation"):
        super().__init__(message)
        self.kind = kind


@dataclass
class Scenario:
    data: dict
    source: str = "<string>"

    @property
    def p(self) -> int:
        return self.data["p"]

    @property
    def seed(self) -> int:
        return self.data.get("seed", 0)

    @property
    def caps(self) -> dict:
        return {**DEFAULT_CAPS, **self.data.get("caps", {})}

    @property
    def tasks(self) -> list:
        return self.data.get("tasks", [])

    def definitions(self) -> dict:
        """Everything a task result can depend on except the task itself."""
        return {
            "p": self.p,
            "seed": self.seed,
            "caps": self.caps,
            "groups": self.data.get("groups", {}),
            "modules": self.data.get("modules", {}),
            "chains": self.data.get("chains", {}),
        }

    def canonical(self) -> str:
        return canonical_json({**self.definitions(), "tasks": self.tasks})

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def with_overrides(self, seed: Optional[int] = None, max_degree: Optional[int] = None) -> "Scenario":
        data = json.loads(json.dumps(self.data))
        if seed is not None:
            data["seed"] = int(seed)
        if max_degree is not None:
            data.setdefault("caps", {})["max_degree"] = int(max_degree)
        sc = Scenario(data, self.source)
        validate(sc)
        return sc


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# parsing and validation


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{source}: {exc}", kind="parse") from None
    sc = Scenario(data, source)
    validate(sc)
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}", kind="parse") from None
    return parse_scenario(text, str(path))


def _fail(msg: str):
    raise ScenarioError(msg)


def _expect(cond: bool, msg: str):
    if not cond:
        _fail(msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _expr_names(expr: str, where: str) -> set:
    """Names referenced by a module expression, checking its shape."""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        _fail(f"{where}: cannot parse module expression {expr!r} (column {exc.offset})")
    names = set()

    def walk(node, top):
        if isinstance(node, ast.Name):
            names.add(node.id)
        elif isinstance(node, ast.Call):
            _expect(isinstance(node.func, ast.Name), f"{where}: unsupported call in {expr!r}")
            fname = node.func.id
            _expect(fname in MODULE_FUNCS, f"{where}: unknown module function {fname!r}; expected one of {sorted(MODULE_FUNCS)}")
            lo, hi = MODULE_FUNCS[fname]
            _expect(lo <= len(node.args) <= hi and not node.keywords, f"{where}: {fname} takes {lo}..{hi} positional arguments")
            for a in node.args:
                walk(a, False)
        elif isinstance(node, (ast.List, ast.Tuple)):
            for a in node.elts:
                walk(a, False)
        elif isinstance(node, ast.Constant) and _is_int(node.value) and not top:
            pass
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub) and isinstance(node.operand, ast.Constant):
            pass
        else:
            _fail(f"{where}: unsupported syntax in module expression {expr!r}")

    walk(tree.body, True)
    return names


def validate(sc: Scenario) -> None:
    d = sc.data
    known_top = {"name", "description", "p", "seed", "caps", "groups", "modules", "chains", "tasks"}
    extra = set(d) - known_top
    _expect(not extra, f"unknown top-level keys: {sorted(extra)}")
    _expect("p" in d, "missing field 'p' (field characteristic)")
    p = d["p"]
    _expect(_is_int(p) and is_prime(p), f"p = {p!r} is not a prime")
    _expect(p <= MAX_PRIME, f"p = {p} exceeds the supported maximum {MAX_PRIME}")
    _expect(_is_int(d.get("seed", 0)), "seed must be an integer")
    caps = d.get("caps", {})
    _expect(isinstance(caps, dict), "caps must be a table")
    for k, v in caps.items():
        _expect(k in DEFAULT_CAPS, f"unknown cap {k!r}; expected one of {sorted(DEFAULT_CAPS)}")
        _expect(_is_int(v) and v > 0 or (k == "max_degree" and _is_int(v) and v >= 0), f"cap {k} must be a positive integer")

    groups = d.get("groups", {})
    modules = d.get("modules", {})
    chains = d.get("chains", {})
    for sect, val in (("groups", groups), ("modules", modules), ("chains", chains)):
        _expect(isinstance(val, dict), f"[{sect}] must be a table")
    clash = (set(groups) & set(modules)) | (set(groups) & set(chains)) | (set(modules) & set(chains))
    _expect(not clash, f"names defined twice: {sorted(clash)}")

    for name, g in groups.items():
        where = f"group {name!r}"
        _expect(isinstance(g, dict), f"{where}: must be a table")
        allowed = {"kind", "n", "generators", "degree", "subgroup_of", "matrices", "p"}
        _expect(not (set(g) - allowed), f"{where}: unknown fields {sorted(set(g) - allowed)}")
        kind = g.get("kind", "generators")
        _expect(kind in set(NAMED) | {"generators", "sl2", "matrix"}, f"{where}: unknown kind {kind!r}")
        if kind in NAMED:
            _expect(_is_int(g.get("n")) and g["n"] >= 1, f"{where}: kind {kind} needs a positive integer n")
        if kind == "generators":
            gens = g.get("generators")
            _expect(isinstance(gens, list), f"{where}: needs a generators list")
            for s in gens:
                _expect(isinstance(s, str) or (isinstance(s, list) and all(_is_int(x) for x in s)), f"{where}: bad generator {s!r}")
        if kind == "matrix":
            _expect(isinstance(g.get("matrices"), list) and g["matrices"], f"{where}: kind matrix needs a matrices list")
        if "p" in g:
            _expect(_is_int(g["p"]) and is_prime(g["p"]), f"{where}: p must be prime")
        if "subgroup_of" in g:
            _expect(g["subgroup_of"] in groups, f"{where}: subgroup_of refers to undefined group {g['subgroup_of']!r}")
            _expect(kind in NAMED or kind == "generators", f"{where}: subgroups are given by generators or a named kind")
    # no cycles among subgroup_of
    for name in groups:
        seen, cur = set(), name
        while "subgroup_of" in groups[cur]:
            _expect(cur not in seen, f"group {name!r}: cyclic subgroup_of references")
            seen.add(cur)
            cur = groups[cur]["subgroup_of"]

    for name, m in modules.items():
        where = f"module {name!r}"
        if isinstance(m, str):
            refs = _expr_names(m, where)
        elif isinstance(m, dict):
            _expect(not (set(m) - {"group", "matrices"}), f"{where}: unknown fields {sorted(set(m) - {'group', 'matrices'})}")
            _expect("group" in m and "matrices" in m, f"{where}: a matrix module needs group and matrices")
            refs = {m["group"]}
        else:
            _fail(f"{where}: must be an expression string or a table")
        for r in refs:
            _expect(r in groups or r in modules, f"{where}: undefined name {r!r}")
            _expect(r != name, f"{where}: refers to itself")

    for name, c in chains.items():
        where = f"chain {name!r}"
        _expect(isinstance(c, dict) and isinstance(c.get("levels"), list) and c["levels"], f"{where}: needs a nonempty levels list")
        for lv in c["levels"]:
            _expect(lv in groups, f"{where}: undefined group {lv!r}")
        for a, b in zip(c["levels"], c["levels"][1:]):
            _expect(groups[a].get("subgroup_of") == b, f"{where}: level {a!r} must be declared with subgroup_of = {b!r}")

    tasks = d.get("tasks", [])
    _expect(isinstance(tasks, list), "tasks must be an array of tables")
    ids = set()
    max_degree = sc.caps["max_degree"]
    for i, t in enumerate(tasks):
        _expect(isinstance(t, dict), f"task #{i}: must be a table")
        tid = t.get("id", f"task{i}")
        where = f"task {tid!r}"
        _expect(isinstance(tid, str), f"task #{i}: id must be a string")
        _expect(tid not in ids, f"{where}: duplicate id")
        ids.add(tid)
        kind = t.get("kind")
        _expect(kind in TASK_KINDS, f"{where}: unknown kind {kind!r}; expected one of {list(TASK_KINDS)}")
        required, optional = TASK_FIELDS[kind]
        present = set(t) - {"id", "kind"}
        _expect(required <= present, f"{where}: missing fields {sorted(required - present)}")
        _expect(not (present - required - optional), f"{where}: unknown fields {sorted(present - required - optional)}")
        for key in ("module", "x", "y", "u", "v"):
            if key in t:
                _expect(t[key] in modules, f"{where}: undefined module {t[key]!r}")
        if "chain" in t:
            _expect(t["chain"] in chains, f"{where}: undefined chain {t['chain']!r}")
        if "group" in t:
            _expect(t["group"] in groups, f"{where}: undefined group {t['group']!r}")
        if kind == "hypothesis_checks":
            _expect(("chain" in t) != ("group" in t), f"{where}: give exactly one of chain or group")
        for key in ("summands", "split"):
            if key in t:
                _expect(isinstance(t[key], list) and len(t[key]) == 2, f"{where}: {key} must list two modules")
                for m in t[key]:
                    _expect(m in modules, f"{where}: undefined module {m!r}")
        if kind == "les":
            _expect(("split" in t) != ("module" in t), f"{where}: give either split or module (+ sub)")
            if "module" in t:
                sub = t.get("sub", "coinv")
                _expect(sub in ("coinv", "fixed") or isinstance(sub, list), f"{where}: sub must be 'coinv', 'fixed' or a list of vectors")
        for deg in task_degrees(t) + ([t["top_degree"]] if "top_degree" in t else []):
            _expect(_is_int(deg) and deg >= 0, f"{where}: degrees must be nonnegative integers")
            _expect(deg <= max_degree, f"{where}: degree {deg} exceeds the degree cap {max_degree}")
        if kind == "les":
            # the last connecting map lands in H^{top+1} of the submodule
            top = t.get("top_degree", 2)
            _expect(top + 1 <= max_degree, f"{where}: top_degree {top} needs degree {top + 1}, over the degree cap {max_degree}")
        if "samples" in t:
            _expect(_is_int(t["samples"]) and t["samples"] >= 0, f"{where}: samples must be a nonnegative integer")


def task_degrees(t: dict) -> list:
    if "degrees" in t:
        val = t["degrees"]
        return list(val) if isinstance(val, list) else [val]
    if "degree" in t:
        return [t["degree"]]
    return []


# ---------------------------------------------------------------------------
# building objects


@dataclass
class Workspace:
    """Groups, modules and chains constructed from a validated scenario."""

    scenario: Scenario
    groups: dict = field(default_factory=dict)
    embeddings: dict = field(default_factory=dict)  # name -> embedding into its subgroup_of parent
    matrices: dict = field(default_factory=dict)  # matrix groups: generator matrices
    modules: dict = field(default_factory=dict)
    chains: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.scenario.p

    def group(self, name: str) -> FiniteGroup:
        if name not in self.groups:
            self._build_group(name)
        return self.groups[name]

    def _build_group(self, name: str):
        spec = self.scenario.data["groups"][name]
        cap = self.scenario.caps["order"]
        kind = spec.get("kind", "generators")
        try:
            if "subgroup_of" in spec:
                parent = self.group(spec["subgroup_of"])
                if kind in NAMED:
                    gens = named_group(kind, spec["n"], order_cap=cap).gen_perms
                else:
                    gens = [_perm(s, parent.degree) for s in spec["generators"]]
                e = embed(gens, parent, name=name)
                self.embeddings[name] = e
                self.groups[name] = e.sub
            elif kind in NAMED:
                G = named_group(kind, spec["n"], order_cap=cap)
                G.name = name
                self.groups[name] = G
            elif kind == "generators":
                gens = [_perm(s, spec.get("degree")) for s in spec["generators"]]
                self.groups[name] = group_from_generators(gens, order_cap=cap, degree=spec.get("degree"), name=name)
            else:
                q = spec.get("p", self.p)
                mats = SL2_GENERATORS if kind == "sl2" else spec["matrices"]
                self.groups[name] = matrix_group(mats, q, order_cap=cap, name=name)
                self.matrices[name] = (mats, q)
        except GcohomError as exc:
            raise ScenarioError(f"group {name!r}: {exc}") from None

    def embedding(self, sub: str, sup: FiniteGroup) -> SubgroupEmbedding:
        """Composite embedding of group ``sub`` into ``sup`` along subgroup_of links."""
        G = self.group(sub)
        groups = self.scenario.data["groups"]
        cur, emb = sub, None
        while self.groups[cur] is not sup:
            if "subgroup_of" not in groups[cur]:
                raise ScenarioError(f"group {sub!r} is not declared inside the module's group")
            e = self.embeddings[cur]
            emb = e if emb is None else emb.then(e)
            cur = groups[cur]["subgroup_of"]
            self.group(cur)
        if emb is None:
            from ..groups import identity_embedding

            emb = identity_embedding(G)
        return emb

    def module(self, name: str) -> gm.GModule:
        if name not in self.modules:
            spec = self.scenario.data["modules"][name]
            try:
                if isinstance(spec, dict):
                    G = self.group(spec["group"])
                    V = gm.from_matrices(G, spec["matrices"], self.p, name=name)
                else:
                    V = self._eval(ast.parse(spec, mode="eval").body, f"module {name!r}")
                    if not isinstance(V, gm.GModule):
                        raise ScenarioError(f"module {name!r}: expression does not denote a module")
            except ScenarioError:
                raise
            except GcohomError as exc:
                raise ScenarioError(f"module {name!r}: {exc}") from None
            self.modules[name] = V
        return self.modules[name]

    def _eval(self, node, where: str):
        if isinstance(node, ast.Name):
            if node.id in self.scenario.data.get("modules", {}):
                return self.module(node.id)
            return ("group", node.id)
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.UnaryOp):
            return -node.operand.value
        if isinstance(node, (ast.List, ast.Tuple)):
            return [self._eval(a, where) for a in node.elts]
        fname = node.func.id
        args = [self._eval(a, where) for a in node.args]
        p = self.p

        def grp(x):
            if not (isinstance(x, tuple) and x[0] == "group"):
                raise ScenarioError(f"{where}: {fname} expects a group name")
            return self.group(x[1])

        def mod(x):
            if not isinstance(x, gm.GModule):
                raise ScenarioError(f"{where}: {fname} expects a module")
            return x

        if fname == "trivial":
            dim = args[1] if len(args) > 1 else 1
            return gm.trivial(grp(args[0]), p, int(dim))
        if fname in ("perm", "permutation"):
            return gm.permutation(grp(args[0]), p)
        if fname == "regular":
            return gm.regular(grp(args[0]), p)
        if fname == "natural":
            G = grp(args[0])
            gname = args[0][1]
            if gname not in self.matrices:
                raise ScenarioError(f"{where}: natural() needs a matrix or sl2 group")
            mats, q = self.matrices[gname]
            if q != p:
                raise ScenarioError(f"{where}: group {gname!r} is defined over GF({q}), scenario p = {p}")
            return gm.from_matrices(G, mats, p, name=f"natural({gname})")
        if fname == "dual":
            return gm.dual(mod(args[0]))
        if fname in ("tensor", "sum"):
            out = mod(args[0])
            for a in args[1:]:
                out = gm.tensor(out, mod(a)) if fname == "tensor" else gm.direct_sum(out, mod(a))
            return out
        if fname == "hom":
            return gm.hom(mod(args[0]), mod(args[1]))
        if fname == "restrict":
            V = mod(args[0])
            if not (isinstance(args[1], tuple) and args[1][0] == "group"):
                raise ScenarioError(f"{where}: restrict expects a group name")
            return gm.restrict(V, self.embedding(args[1][1], V.group))
        if fname == "coinv":
            return gm.submodule_module(gm.coinvariants(mod(args[0])))
        if fname == "fixed":
            V = mod(args[0])
            return gm.submodule_module(gm.Submodule(V, gm.fixed_points(V)))
        if fname == "quotient_coinv":
            return gm.quotient_module(gm.coinvariants(mod(args[0])))[0]
        if fname == "spin":
            vecs = args[1]
            if vecs and not isinstance(vecs[0], list):
                vecs = [vecs]
            return gm.submodule_module(gm.spin(mod(args[0]), vecs))
        raise ScenarioError(f"{where}: unknown function {fname!r}")

    def chain(self, name: str) -> SubgroupChain:
        if name not in self.chains:
            levels = self.scenario.data["chains"][name]["levels"]
            embs = [self.embedding(a, self.group(b)) for a, b in zip(levels, levels[1:])]
            try:
                self.chains[name] = SubgroupChain(embs, top=self.group(levels[-1]))
            except GcohomError as exc:
                raise ScenarioError(f"chain {name!r}: {exc}") from None
        return self.chains[name]

    def build_all(self) -> "Workspace":
        d = self.scenario.data
        for name in d.get("groups", {}):
            self.group(name)
        for name in d.get("modules", {}):
            self.module(name)
        for name in d.get("chains", {}):
            self.chain(name)
        self._check_task_groups()
        return self

    def _check_task_groups(self):
        for t in self.scenario.tasks:
            tid = t.get("id")
            if "chain" in t:
                top = self.chain(t["chain"]).top
                for key in ("module", "v"):
                    if key in t and self.module(t[key]).group is not top:
                        raise ScenarioError(f"task {tid!r}: module {t[key]!r} is not over the top of chain {t['chain']!r}")
            for a, b in (("x", "y"),):
                if a in t and b in t and self.module(t[a]).group is not self.module(t[b]).group:
                    raise ScenarioError(f"task {tid!r}: modules {t[a]!r} and {t[b]!r} are over different groups")


def _perm(spec, degree):
    if isinstance(spec, str):
        return parse_cycles(spec, degree)
    return tuple(int(x) for x in spec)


def build(sc: Scenario) -> Workspace:
    return Workspace(sc).build_all()
