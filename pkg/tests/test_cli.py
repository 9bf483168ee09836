from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


def gcohom(*args, env=None, cwd=None):
    full_env = {k: v for k, v in os.environ.items() if not k.startswith("GCOHOM_")}
    full_env.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "gcohom", *map(str, args)],
        capture_output=True,
        text=True,
        env=full_env,
        cwd=cwd,
        timeout=600,
    )


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


BASE = """
p = 2
seed = 1
[groups]
S3 = { kind = "symmetric", n = 3 }
[modules]
V = "perm(S3)"
"""


def test_sym3_permutation_dims():
    res = gcohom("run", SCENARIOS / "sym3-perm-p2.toml", "--no-timings")
    assert res.returncode == 0, res.stderr
    report = json.loads(res.stdout)
    (task,) = report["tasks"]
    assert task["result"]["dims"] == [1, 1, 1]


def test_empty_task_list(tmp_path):
    res = gcohom("run", write(tmp_path, "empty.toml", BASE))
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["tasks"] == []


def test_undefined_module_is_a_validation_error(tmp_path):
    text = BASE + '[[tasks]]\nid = "x"\nkind = "cohomology"\nmodule = "W"\ndegrees = [0]\n'
    res = gcohom("run", write(tmp_path, "bad.toml", text))
    assert res.returncode == 2
    assert "validation error" in res.stderr and "'W'" in res.stderr


def test_degree_over_cap_is_a_validation_error(tmp_path):
    text = BASE + '[[tasks]]\nid = "x"\nkind = "cohomology"\nmodule = "V"\ndegrees = [9]\n'
    res = gcohom("run", write(tmp_path, "deg.toml", text))
    assert res.returncode == 2 and "degree" in res.stderr


def test_parse_error_reports_position(tmp_path):
    res = gcohom("run", write(tmp_path, "broken.toml", "p = 2\n[groups\n"))
    assert res.returncode == 2
    assert "parse error" in res.stderr and "line 2" in res.stderr


def test_reports_are_byte_identical_without_timings(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        res = gcohom("run", SCENARIOS / "duality-sym3.toml", "--no-timings", "--no-figures", "--out", out)
        assert res.returncode == 0, res.stderr
    assert a.read_bytes() == b.read_bytes()


def test_cache_hits_reproduce_the_report(tmp_path):
    cache = tmp_path / "cache"
    args = ["run", SCENARIOS / "sym3-perm-p2.toml", "--no-timings", "--no-figures"]
    first = gcohom(*args, env={"GCOHOM_CACHE_DIR": str(cache)})
    second = gcohom(*args, env={"GCOHOM_CACHE_DIR": str(cache)})
    assert first.returncode == second.returncode == 0
    assert "0 hit(s), 1 miss(es)" in first.stderr
    assert "1 hit(s), 0 miss(es)" in second.stderr
    assert first.stdout == second.stdout
    third = gcohom(*args, "--cache-dir", cache, "--no-cache")
    assert third.stdout == first.stdout and "hit" not in third.stderr


def test_csv_and_text_formats():
    csv_out = gcohom("run", SCENARIOS / "sym3-perm-p2.toml", "--format", "csv", "--no-timings")
    assert csv_out.returncode == 0
    lines = csv_out.stdout.splitlines()
    assert lines[0].startswith("# hash,")
    assert lines[1] == "task,kind,field,value,ms"
    text_out = gcohom("run", SCENARIOS / "sym3-perm-p2.toml", "--format", "text", "--no-timings")
    assert text_out.returncode == 0 and "cohomology" in text_out.stdout


def test_figures_are_written_next_to_the_report(tmp_path):
    out = tmp_path / "report.json"
    res = gcohom("run", SCENARIOS / "duality-sym3.toml", "--out", out)
    assert res.returncode == 0, res.stderr
    figs = sorted((tmp_path / "report_figures").glob("*.png"))
    assert figs
    assert all(f.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n" for f in figs)


def test_parallel_jobs_match_serial(tmp_path):
    serial = gcohom("run", SCENARIOS / "sym-chain-p2.toml", "--no-timings")
    parallel = gcohom("run", SCENARIOS / "sym-chain-p2.toml", "--no-timings", "--jobs", "4")
    assert serial.returncode == parallel.returncode == 0, serial.stderr + parallel.stderr
    assert serial.stdout == parallel.stdout


def test_sl2_scenario():
    res = gcohom("run", SCENARIOS / "sl23-natural-p3.toml", "--no-timings")
    assert res.returncode == 0, res.stderr
    results = {t["id"]: t["result"] for t in json.loads(res.stdout)["tasks"]}
    ann = results["annihilator"]
    assert ann["annihilator_dim"] == ann["fixed_dim"] == 0 and ann["equal"]
    assert results["H0"]["dims"] == [0]
    assert results["reducibility"]["submodule_dims"] == [0, 2]


@pytest.mark.parametrize("suite", ["lemma2", "duality"])
def test_verify_suites_pass(suite):
    res = gcohom("verify", suite, "--seed", "1")
    assert res.returncode == 0, res.stdout + res.stderr
    assert f"{suite}: pass" in res.stdout


def test_verify_with_mutation_fails_with_witness():
    res = gcohom("verify", "lemma2", "--mutate", "annihilator")
    assert res.returncode == 1
    assert "lemma2: FAIL" in res.stdout and "first counterexample" in res.stdout
    env_res = gcohom("verify", "complexes", env={"GCOHOM_MUTATE": "coboundary"})
    assert env_res.returncode == 1 and "first counterexample" in env_res.stdout


def test_verify_unknown_suite():
    res = gcohom("verify", "nonsense")
    assert res.returncode == 2


def test_bench_empty_profile(tmp_path):
    out = tmp_path / "bench.json"
    res = gcohom("bench", "empty", "--out", out)
    assert res.returncode == 0, res.stderr
    assert json.loads(out.read_text())["rows"] == []


def test_version():
    res = gcohom("--version")
    assert res.returncode == 0 and "0.1.0" in res.stdout
