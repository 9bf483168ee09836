"""Command-line front end: ``gcohom run | verify | bench``."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .. import __version__
from .cache import ENV_VAR, ResultStore, default_cache_dir
from .report import TaskError, render, run_scenario
from .scenario import ScenarioError, load_scenario

EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_TASK = 3


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="gcohom")
def main():
    """Group (co)homology over GF(p): scenario runs, property suites, benchmarks."""


@main.command()
@click.argument("scenario", type=click.Path(dir_okay=False))
@click.option("--out", "out", type=click.Path(dir_okay=False), help="Write the report here instead of stdout.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json", show_default=True)
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None, help=f"Result cache directory (default: ${ENV_VAR}, else no cache).")
@click.option("--no-cache", is_flag=True, help="Ignore the cache even if a directory is configured.")
@click.option("--max-degree", type=click.IntRange(min=0), default=None, help="Override the scenario's degree cap.")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True, help="Tasks run concurrently.")
@click.option("--no-timings", is_flag=True, help="Write ms = 0 so reports are byte-identical across runs.")
@click.option("--figures/--no-figures", default=None, help="Render PNG figures next to --out (default: on when --out is given).")
@click.option("--figures-dir", type=click.Path(file_okay=False), default=None, help="Figure directory (default: <out stem>_figures).")
def run(scenario, out, fmt, cache_dir, no_cache, max_degree, seed, jobs, no_timings, figures, figures_dir):
    """Execute the tasks of a SCENARIO file and write a report."""
    try:
        sc = load_scenario(scenario).with_overrides(seed=seed, max_degree=max_degree)
    except ScenarioError as exc:
        click.echo(f"{exc.kind} error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    cache_dir = None if no_cache else (cache_dir or default_cache_dir())
    store = ResultStore(cache_dir) if cache_dir else None
    try:
        report = run_scenario(sc, store=store, jobs=jobs, timings=not no_timings)
    except ScenarioError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    except TaskError as exc:
        click.echo(f"task error: {exc}", err=True)
        sys.exit(EXIT_TASK)
    text = render(report, fmt)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    want_figures = figures if figures is not None else bool(out or figures_dir)
    if want_figures and report["tasks"]:
        from .figures import render_report

        target = Path(figures_dir) if figures_dir else (Path(out).with_name(Path(out).stem + "_figures") if out else Path("figures"))
        written = render_report(report, target)
        if written:
            click.echo(f"wrote {len(written)} figure(s) to {target}", err=True)
    if store is not None:
        click.echo(f"cache: {store.hits} hit(s), {store.misses} miss(es) in {cache_dir}", err=True)


@main.command()
@click.argument("suite")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--mutate", default=None, help="Run with a deliberately broken library function (see --list).")
@click.option("--list", "list_", is_flag=True, help="List suites and mutations, then exit.")
def verify(suite, seed, mutate, list_):
    """Run a property SUITE (or 'all'); exit 1 and print a witness on failure."""
    from .verify import MUTATIONS, SUITES, run_suites

    if list_:
        click.echo("suites: " + ", ".join(SUITES) + ", all")
        click.echo("mutations: " + ", ".join(f"{k} ({v[0]})" for k, v in MUTATIONS.items()))
        return
    if suite != "all" and suite not in SUITES:
        click.echo(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}, all", err=True)
        sys.exit(EXIT_INVALID)
    if mutate is not None and mutate not in MUTATIONS:
        click.echo(f"unknown mutation {mutate!r}; expected one of {', '.join(MUTATIONS)}", err=True)
        sys.exit(EXIT_INVALID)

    def show(r):
        for line in r.lines():
            click.echo(line)

    results = run_suites([suite] if suite != "all" else "all", seed=seed, mutation=mutate, progress=show)
    failed = [r.name for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} suites passed")
    if failed:
        sys.exit(EXIT_FAIL)


@main.command()
@click.argument("profile", type=click.Choice(["small", "stretch", "empty"]))
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--out", "out", type=click.Path(dir_okay=False), help="Also write the rows as JSON here.")
@click.option("--figure", type=click.Path(dir_okay=False), default=None, help="Timing chart PNG (default: next to --out).")
def bench(profile, seed, out, figure):
    """Time the acceptance computations (small) or the Sym(5) stretch run."""
    from .bench import format_table, run_bench

    rows = run_bench(profile, seed)
    click.echo(format_table(rows), nl=False)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(json.dumps({"profile": profile, "version": __version__, "rows": rows}, indent=2) + "\n", encoding="utf-8")
        figure = figure or str(Path(out).with_suffix(".png"))
    if figure and rows:
        from .figures import render_bench

        render_bench(rows, figure)
        click.echo(f"wrote {figure}", err=True)
    if any(r["status"] == "fail" for r in rows):
        sys.exit(EXIT_FAIL)
