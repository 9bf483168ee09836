"""The thirteen acceptance criteria, each at its stated budget.

All criteria run once (criterion 3 inspects every complex the others built);
each then gets its own test and one PASS/FAIL line, which is also echoed in
the terminal summary.  Criterion 13 is a stretch target and does not block.
"""

from __future__ import annotations

import pytest

from gcohom import barcomplex as bc
from gcohom.criteria import CRITERIA, run_all

SEED = 1
LINES: list = []


@pytest.fixture(scope="module")
def results():
    bc.cache.clear()
    out = {r.number: r for r in run_all(seed=SEED)}
    LINES[:] = [out[n].line() for n in sorted(out)]
    yield out
    bc.cache.clear()


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(results, number):
    r = results[number]
    print(r.line())
    if not r.blocking:
        if not r.ok:
            pytest.xfail(f"non-blocking stretch target: {r.detail}")
        return
    assert r.passed, r.detail
    assert r.within_budget, f"{r.seconds:.1f} s over the {r.budget} s budget"
