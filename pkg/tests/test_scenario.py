from __future__ import annotations

import pytest

from gcohom.cli.scenario import ScenarioError, build, parse_scenario, validate

TEMPLATE = """
p = {p}
[groups]
S3 = {{ kind = "symmetric", n = 3 }}
{extra}
[modules]
V = "{expr}"
"""


def load(p=2, expr="perm(S3)", extra=""):
    sc = parse_scenario(TEMPLATE.format(p=p, expr=expr.replace('"', '\\"'), extra=extra), "test")
    validate(sc)
    return build(sc)


def test_module_expressions_evaluate():
    ws = load(expr="tensor(perm(S3), dual(perm(S3)))")
    assert ws.module("V").dim == 9
    assert load(expr="coinv(perm(S3))").module("V").dim == 2


@pytest.mark.parametrize(
    "expr, message",
    [
        ("__import__('os')", "unknown module function"),
        ("perm(S3).x", "unsupported syntax"),
        ("perm(T)", "T"),
    ],
)
def test_unsafe_or_unknown_expressions_rejected(expr, message):
    with pytest.raises(ScenarioError, match=message) as info:
        load(expr=expr)
    assert info.value.kind == "validation"


def test_non_prime_rejected():
    with pytest.raises(ScenarioError, match="not a prime"):
        load(p=4)


def test_subgroup_cycle_rejected():
    extra = (
        'A = { subgroup_of = "B", generators = ["(0 1)"] }\n'
        'B = { subgroup_of = "A", generators = ["(0 1)"] }\n'
    )
    with pytest.raises(ScenarioError, match="cyclic"):
        load(extra=extra)


def test_subgroup_restriction():
    extra = 'T = { subgroup_of = "S3", generators = ["(0 1 2)"] }\n'
    ws = load(expr="restrict(perm(S3), T)", extra=extra)
    V = ws.module("V")
    assert V.group.order == 3 and V.dim == 3


def test_parse_error_kind():
    with pytest.raises(ScenarioError) as info:
        parse_scenario("p = \n", "x")
    assert info.value.kind == "parse"


def test_content_hash_ignores_formatting():
    a = parse_scenario(TEMPLATE.format(p=2, expr="perm(S3)", extra=""), "a")
    b = parse_scenario("p=2\n[modules]\nV='perm(S3)'\n[groups]\nS3={kind='symmetric',n=3}\n", "b")
    assert a.content_hash() == b.content_hash()


def test_les_top_degree_needs_one_more_degree():
    text = TEMPLATE.format(p=2, expr="perm(S3)", extra="") + (
        '[caps]\nmax_degree = 2\n[[tasks]]\nid = "les"\nkind = "les"\nmodule = "V"\ntop_degree = 2\n'
    )
    with pytest.raises(ScenarioError, match="top_degree 2 needs degree 3"):
        parse_scenario(text, "test")
