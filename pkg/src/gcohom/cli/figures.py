"""Matplotlib figures for reports and bench tables (Agg backend, PNG files)."""

from __future__ import annotations

import math
import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "svg.hashsalt": "gcohom",
}

# PNG metadata without a software version keeps files stable across matplotlib upgrades
METADATA = {"Software": None}


def new_figure(width: float = 5.0, height: float = None):
    golden = (math.sqrt(5) - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height or width * golden))
    return fig, ax


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name) or "task"


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata=METADATA)
    plt.close(fig)
    return path


def _dims_figure(rec: dict):
    rows = rec["result"]["per_degree"]
    degrees = [r["degree"] for r in rows]
    fig, ax = new_figure()
    x = np.arange(len(rows))
    w = 0.27
    for k, (key, label) in enumerate((("dim_Z", "cycles" if rec["kind"] in ("homology", "tor") else "cocycles"), ("dim_B", "boundaries"), ("dim_H", "homology"))):
        ax.bar(x + (k - 1) * w, [r[key] for r in rows], w, label=label)
    ax.set_xticks(x, [str(d) for d in degrees])
    ax.set_xlabel("degree")
    ax.set_ylabel("dimension")
    ax.set_title(f"{rec['kind']}: {rec['id']}")
    ax.legend(frameon=False)
    return fig


def _survival_figure(rec: dict):
    rows = rec["result"]["per_degree"]
    levels = rec["result"]["levels"]
    fig, axes = plt.subplots(1, len(rows), figsize=(4.2 * len(rows), 3.6), squeeze=False)
    for ax, r in zip(axes[0], rows):
        m = np.array([[np.nan if v is None else v for v in row] for row in r["image_dims"]], dtype=float)
        im = ax.imshow(m, cmap="viridis", vmin=0)
        for (i, j), v in np.ndenumerate(m):
            if not np.isnan(v):
                ax.text(j, i, f"{int(v)}", ha="center", va="center", color="w")
        ax.set_xticks(range(len(levels)), levels, rotation=30)
        ax.set_yticks(range(len(levels)), levels)
        ax.set_xlabel("source level")
        ax.set_ylabel("target level")
        ax.set_title(f"image dims, degree {r['degree']}")
        fig.colorbar(im, ax=ax, shrink=0.8)
    return fig


def _les_figure(rec: dict):
    nodes = rec["result"]["nodes"]
    fig, ax = new_figure(6.0, 3.2)
    colors = ["tab:green" if nd["exact"] else "tab:red" for nd in nodes]
    ax.bar(range(len(nodes)), [nd["dim"] for nd in nodes], color=colors)
    ax.set_xticks(range(len(nodes)), [nd["node"] for nd in nodes], rotation=45, ha="right")
    ax.set_ylabel("dimension")
    ax.set_title(f"long exact sequence: {rec['id']} (green = exact)")
    return fig


def _duality_figure(rec: dict):
    rows = rec["result"]["per_degree"]
    fig, ax = new_figure()
    x = np.arange(len(rows))
    ax.bar(x - 0.2, [r["dim_ext"] for r in rows], 0.4, label="Ext")
    ax.bar(x + 0.2, [r["dim_tor"] for r in rows], 0.4, label="Tor")
    ax.plot(x, [r["rank"] for r in rows], "k.", label="pairing rank")
    ax.set_xticks(x, [str(r["degree"]) for r in rows])
    ax.set_xlabel("degree")
    ax.set_ylabel("dimension")
    ax.set_title(f"pairing certificate: {rec['id']}")
    ax.legend(frameon=False)
    return fig


FIGURES = {
    "cohomology": _dims_figure,
    "homology": _dims_figure,
    "ext": _dims_figure,
    "tor": _dims_figure,
    "survival": _survival_figure,
    "les": _les_figure,
    "duality_certificate": _duality_figure,
}


def render_report(report: dict, directory) -> list:
    """One PNG per task whose kind has a figure; returns the written paths."""
    directory = Path(directory)
    written = []
    with plt.rc_context(STYLE):
        for i, rec in enumerate(report["tasks"]):
            maker = FIGURES.get(rec["kind"])
            if maker is None:
                continue
            directory.mkdir(parents=True, exist_ok=True)
            written.append(_save(maker(rec), directory / f"{i:02d}_{_safe(rec['id'])}.png"))
    return written


def render_bench(rows: list, path) -> Path:
    """Horizontal bar chart of wall times, budgets marked where known."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(STYLE):
        fig, ax = new_figure(10.0, 0.45 * max(len(rows), 1) + 1.2)
        names = [r["name"] for r in rows]
        secs = [r["seconds"] for r in rows]
        colors = ["tab:blue" if r["status"] == "pass" else ("tab:orange" if r["status"].startswith("declined") else "tab:red") for r in rows]
        y = np.arange(len(rows))
        ax.barh(y, secs, color=colors)
        for k, r in enumerate(rows):
            if r.get("budget"):
                ax.plot([r["budget"]], [k], "k|", markersize=12)
        ax.set_yticks(y, names)
        ax.invert_yaxis()
        ax.set_xlabel("wall time (s)")
        positive = [s for s in secs if s > 0]
        if positive and max(positive) / min(positive) > 100:
            ax.set_xscale("log")
        ax.set_title("bench")
        return _save(fig, path)
