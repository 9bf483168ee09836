"""Bench profiles: rows of (name, wall time, budget, status, sizes)."""

from __future__ import annotations

from .. import criteria as cr


def _criterion_row(res: cr.CriterionResult) -> dict:
    return {
        "name": f"criterion {res.number}: {res.title}",
        "seconds": round(res.seconds, 3),
        "budget": res.budget,
        "status": "pass" if res.ok else "fail",
        "sizes": None,
    }


def bench_small(seed: int = 1) -> list:
    return [_criterion_row(res) for res in cr.run_all(range(1, 13), seed)]


def bench_stretch(seed: int = 1) -> list:
    rows = []
    for r in cr.stretch_rows():
        rows.append(
            {
                "name": r["task"],
                "seconds": r["seconds"],
                "budget": 1800.0,
                "status": "pass" if r["status"] == "computed" else r["status"],
                "sizes": {"delta_in": r["delta_in"], "delta_out": r["delta_out"], "dim_H": r["dim_H"]},
            }
        )
    return rows


PROFILES = {"small": bench_small, "stretch": bench_stretch, "empty": lambda seed=1: []}


def run_bench(profile: str, seed: int = 1) -> list:
    if profile not in PROFILES:
        raise KeyError(f"unknown bench profile {profile!r}; expected one of {sorted(PROFILES)}")
    return PROFILES[profile](seed)


def format_table(rows: list) -> str:
    head = ["name", "seconds", "budget", "status", "sizes"]
    body = [[r["name"], f"{r['seconds']:.3f}", "-" if r["budget"] is None else f"{r['budget']:g}", r["status"], "-" if r["sizes"] is None else str(r["sizes"])] for r in rows]
    widths = [max([len(h)] + [len(b[i]) for b in body]) for i, h in enumerate(head)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths)).rstrip(), "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.ljust(w) for c, w in zip(b, widths)).rstrip() for b in body]
    return "\n".join(lines) + "\n"
