"""Running a scenario and rendering the report (JSON is canonical; CSV and text derive from it)."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Optional

from .. import __version__
from .. import barcomplex as bc
from ..errors import GcohomError
from ..exactla import caps as la_caps
from .cache import ResultStore, fragment_key
from .scenario import Scenario, build
from .tasks import run_task, task_inputs


class TaskError(GcohomError):
    def __init__(self, task_id: str, message: str):
        super().__init__(f"task {task_id!r}: {message}")
        self.task_id = task_id


@contextmanager
def applied_caps(caps: dict):
    old = (bc.settings.max_degree, la_caps.dense, la_caps.sparse)
    bc.settings.max_degree = caps["max_degree"]
    la_caps.dense, la_caps.sparse = caps["dense"], caps["sparse"]
    try:
        yield
    finally:
        bc.settings.max_degree, la_caps.dense, la_caps.sparse = old


def run_scenario(sc: Scenario, store: Optional[ResultStore] = None, jobs: int = 1, timings: bool = True) -> dict:
    """Execute every task; records come back in task order whatever the scheduling."""
    with applied_caps(sc.caps):
        ws = build(sc)
        defs = sc.definitions()

        def one(item):
            index, t = item
            tid = t.get("id", f"task{index}")
            t0 = time.perf_counter()
            key = fragment_key(defs, t) if store is not None else None
            result = store.get(key) if store is not None else None
            if result is None:
                try:
                    result = run_task(ws, t, index)
                except GcohomError as exc:
                    raise TaskError(tid, f"{type(exc).__name__}: {exc}") from exc
                if store is not None:
                    store.put(key, result)
            ms = int(round((time.perf_counter() - t0) * 1000)) if timings else 0
            return {"id": tid, "kind": t["kind"], "inputs": task_inputs(t), "result": result, "ms": ms}

        items = list(enumerate(sc.tasks))
        if jobs > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                records = list(pool.map(one, items))
        else:
            records = [one(it) for it in items]
    return {"hash": sc.content_hash(), "version": __version__, "tasks": records}


# ---------------------------------------------------------------------------
# rendering


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def flatten(value, prefix: str = "") -> list:
    """(dotted path, scalar) pairs; lists of scalars stay whole."""
    if isinstance(value, dict):
        out = []
        for k, v in value.items():
            out.extend(flatten(v, f"{prefix}.{k}" if prefix else str(k)))
        return out
    if isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        out = []
        for i, v in enumerate(value):
            out.extend(flatten(v, f"{prefix}[{i}]"))
        return out
    return [(prefix, value)]


def _cell(v) -> str:
    if isinstance(v, list):
        return json.dumps(v, separators=(",", ":"))
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def rows(report: dict) -> list:
    out = []
    for rec in report["tasks"]:
        for path, v in flatten(rec["result"]):
            out.append([rec["id"], rec["kind"], path, _cell(v), str(rec["ms"])])
    return out


HEADER = ["task", "kind", "field", "value", "ms"]


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["# hash", report["hash"], "version", report["version"], ""])
    w.writerow(HEADER)
    w.writerows(rows(report))
    return buf.getvalue()


def to_text(report: dict) -> str:
    body = rows(report)
    widths = [max([len(h)] + [len(r[i]) for r in body]) for i, h in enumerate(HEADER)]
    lines = [f"hash {report['hash']}  version {report['version']}  tasks {len(report['tasks'])}"]
    lines.append("  ".join(h.ljust(w) for h, w in zip(HEADER, widths)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for r in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


RENDERERS = {"json": to_json, "csv": to_csv, "text": to_text}


def render(report: dict, fmt: str) -> str:
    return RENDERERS[fmt](report)
