"""Command-line frontend.

Exit codes: 0 success, 2 usage or configuration error, 3 degenerate data.
All numeric output prints with six significant digits; rerunning any
command with the same configuration and seed reproduces output files byte
for byte. ``--plot`` renders a figure next to each delimited file.
"""
from __future__ import annotations

import csv
import json
import os
import sys
from pathlib import Path

import click

from .degree_models import DegreeSample, PopulationSpec
from .design import StudyDesign, sample_size_detail, sample_size_grid
from .errors import (
    DegenerateSampleError,
    DomainError,
    InfeasibleModelError,
    NsumkitError,
    UnsupportedModelError,
    UsageError,
)
from .estimator import estimate_with_interval
from .graphs import ER, ERGM, PA, SBM, Deviation, SmallWorld
from .montecarlo import (
    CaseStudy,
    SimConfig,
    run_deviation_sweep,
    run_factorial,
    run_retrospective,
    bundled_case_studies,
)
from .reporting import (
    GRID_HEADER,
    RETRO_HEADER,
    SIMULATE_HEADER,
    SWEEP_HEADER,
    format_value,
    retro_row,
    simulate_row,
    sweep_row,
    write_csv,
    write_manifest,
)
from .stats import RngStream

EXIT_USAGE = 2
EXIT_DEGENERATE = 3

_MODEL_NAMES = ("er", "ergm", "pa", "sbm", "smallworld")


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(func):
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except DegenerateSampleError as exc:
            _fail(str(exc), EXIT_DEGENERATE)
        except (DomainError, UsageError, UnsupportedModelError,
                InfeasibleModelError, NsumkitError) as exc:
            _fail(str(exc), EXIT_USAGE)
        except (json.JSONDecodeError, OSError, KeyError, TypeError, ValueError) as exc:
            _fail(str(exc), EXIT_USAGE)

    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise UsageError("config file must hold a JSON object")
    return config


def _parse_model(entry, index: int):
    if isinstance(entry, str):
        if entry not in _MODEL_NAMES:
            raise UsageError(f"unknown model shorthand {entry!r}")
        return entry, entry
    if not isinstance(entry, dict):
        raise UsageError("model entries must be names or objects")
    kind = entry.get("model")
    label = entry.get("label", kind if kind else f"model{index}")
    params = {k: v for k, v in entry.items() if k not in ("model", "label")}
    if kind == "er":
        return label, ER(**params)
    if kind == "ergm":
        return label, ERGM(**params)
    if kind == "pa":
        return label, PA(**params)
    if kind == "sbm":
        params["block_fractions"] = tuple(params["block_fractions"])
        params["block_matrix"] = tuple(tuple(row) for row in params["block_matrix"])
        return label, SBM(**params)
    if kind == "smallworld":
        return label, SmallWorld(**params)
    if kind == "deviation":
        return label, Deviation(**params)
    raise UsageError(f"unknown model kind {kind!r}")


def _threads_option(value) -> int:
    if value is not None:
        return max(1, int(value))
    env = os.environ.get("NSUMKIT_THREADS")
    return max(1, int(env)) if env else 1


def _prepare_out(out: str) -> Path:
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def _result_notes(results) -> dict:
    notes = {}
    infeasible = [r.label for r in results if r.infeasible]
    truncated = [r.label for r in results if r.truncated]
    if infeasible:
        notes["infeasible_cells"] = sorted(set(
            f"{r.label}/M={r.m_population}/q={r.prevalence:g}/alpha={r.alpha:g}"
            for r in results if r.infeasible))
    if truncated:
        notes["sample_size_truncated_cells"] = sorted(set(
            f"{r.label}/M={r.m_population}/q={r.prevalence:g}/alpha={r.alpha:g}"
            for r in results if r.truncated))
    off_density = sorted(set(
        f"{r.label}/M={r.m_population}" for r in results
        if r.label == "smallworld" and r.m_population > 1000))
    if off_density:
        notes["density_departure"] = {
            "cells": off_density,
            "note": "the fixed lattice neighborhood gives a density below "
                    "the 10% target at this population size; quoted "
                    "parameters take precedence",
        }
    return notes


@click.group()
@click.version_option()
def main():
    """Scale-up survey toolkit: sample sizes, estimates, and simulations."""


@main.command()
@click.option("--epsilon", type=float, required=True, help="Relative margin of error.")
@click.option("--alpha", type=float, required=True, help="One minus the confidence level.")
@click.option("--prevalence", type=float, required=True, help="Hidden-population share.")
@click.option("--mean-degree", type=float, required=True, help="Average personal network size.")
@click.option("--population", type=int, required=True, help="General population size.")
@click.option("--deff", type=float, default=1.0, show_default=True,
              help="Design effect multiplier.")
@click.option("--z2", is_flag=True, help="Use the z=2 convention instead of the exact quantile.")
@_guard
def samplesize(epsilon, alpha, prevalence, mean_degree, population, deff, z2):
    """Minimum sample size for the requested precision."""
    design = StudyDesign(epsilon=epsilon, alpha=alpha, design_effect=deff,
                         z_convention="z2" if z2 else "exact")
    pop = PopulationSpec(population, prevalence, mean_degree)
    n, raw, truncated = sample_size_detail(design, pop)
    click.echo(f"n {n}")
    click.echo(f"pre_ceiling {format_value(raw)}")
    if truncated:
        click.echo(f"truncated_at_population {population}")


@main.command()
@click.option("--input", "input_path", type=str, required=True,
              help="Two-column headerless CSV of degree pairs.")
@click.option("--population", type=int, required=True)
@click.option("--alpha", type=float, required=True)
@click.option("--z2", is_flag=True, help="Use the z=2 convention.")
@_guard
def estimate(input_path, population, alpha, z2):
    """Scale-up estimate with its plug-in confidence interval."""
    degrees = []
    hidden = []
    with open(input_path, "r", encoding="utf-8") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise UsageError(f"line {line_no}: expected two columns")
            try:
                d, du = int(row[0]), int(row[1])
            except ValueError as exc:
                raise UsageError(f"line {line_no}: {exc}") from exc
            if d < 0 or du < 0:
                raise UsageError(f"line {line_no}: degree reports must be non-negative")
            degrees.append(d)
            hidden.append(du)
    if not degrees:
        raise UsageError("input file holds no degree pairs")
    sample = DegreeSample(degrees, hidden)
    result = estimate_with_interval(sample, population, alpha,
                                    "z2" if z2 else "exact")
    click.echo(f"n_hat {format_value(result.n_hat)}")
    click.echo(f"variance {format_value(result.variance)}")
    click.echo(f"ci_lo {format_value(result.ci_lo)}")
    click.echo(f"ci_hi {format_value(result.ci_hi)}")


@main.command()
@click.option("--config", "config_path", type=str, required=True,
              help="JSON file with models, M, q, alpha, epsilon, replicates.")
@click.option("--out", type=str, required=True, help="Output directory.")
@click.option("--seed", type=int, required=True)
@click.option("--threads", type=int, default=None,
              help="Worker processes (NSUMKIT_THREADS is the fallback).")
@click.option("--plot", is_flag=True, help="Render a figure next to the CSV.")
@_guard
def simulate(config_path, out, seed, threads, plot):
    """Factorial Monte Carlo study over graph models."""
    raw = _load_config(config_path)
    models = tuple(_parse_model(entry, i)
                   for i, entry in enumerate(raw.get("models", _MODEL_NAMES)))
    config = SimConfig(
        models=models,
        m_grid=tuple(int(m) for m in raw["M"]),
        q_grid=tuple(float(q) for q in raw["q"]),
        alpha_grid=tuple(float(a) for a in raw["alpha"]),
        epsilon=float(raw.get("epsilon", 0.1)),
        replicates=int(raw.get("replicates", 500)),
        seed=seed,
    )
    results = run_factorial(config, workers=_threads_option(threads))
    out_dir = _prepare_out(out)
    csv_path = out_dir / "results.csv"
    write_csv(csv_path, SIMULATE_HEADER, [simulate_row(r) for r in results])
    outputs = [csv_path.name]
    if plot:
        from .plots import figure_factorial, save_figure
        fig_path = out_dir / "results.png"
        save_figure(figure_factorial(results), fig_path)
        outputs.append(fig_path.name)
    write_manifest(out_dir / "manifest.json", "simulate", raw, seed, outputs,
                   _result_notes(results))


@main.command()
@click.option("--config", "config_path", type=str, required=True,
              help="JSON file with families, deltas, M, q, alpha, epsilon, replicates.")
@click.option("--out", type=str, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--plot", is_flag=True)
@_guard
def sweep(config_path, out, seed, plot):
    """Deviation sweep away from the ER baseline."""
    raw = _load_config(config_path)
    results = run_deviation_sweep(
        delta_grid=[float(d) for d in raw.get("deltas",
                                              [i / 10 for i in range(11)])],
        m_population=int(raw.get("M", 1000)),
        prevalence=float(raw.get("q", 0.1)),
        alpha=float(raw.get("alpha", 0.05)),
        epsilon=float(raw.get("epsilon", 0.1)),
        replicates=int(raw.get("replicates", 500)),
        rng=RngStream(seed),
        families=tuple(raw.get("families", ("pa_mixture", "sbm_2block",
                                            "ergm_plus", "ergm_minus"))),
        base_p=float(raw.get("base_p", 0.1)),
    )
    out_dir = _prepare_out(out)
    csv_path = out_dir / "sweep.csv"
    write_csv(csv_path, SWEEP_HEADER, [sweep_row(r) for r in results])
    outputs = [csv_path.name]
    if plot:
        from .plots import figure_sweep, save_figure
        fig_path = out_dir / "sweep.png"
        save_figure(figure_sweep(results), fig_path)
        outputs.append(fig_path.name)
    write_manifest(out_dir / "manifest.json", "sweep", raw, seed, outputs,
                   _result_notes(results))


@main.command()
@click.option("--config", "config_path", type=str, default=None,
              help="JSON case-study config; defaults to the bundled studies.")
@click.option("--out", type=str, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--plot", is_flag=True)
@_guard
def retro(config_path, out, seed, plot):
    """Retrospective relative error and minimum sample size per study."""
    raw = _load_config(config_path) if config_path else {}
    if "cases" in raw:
        cases = [CaseStudy(**case) for case in raw["cases"]]
    else:
        cases = bundled_case_studies()
    epsilon = float(raw.get("epsilon", 0.1))
    alpha = float(raw.get("alpha", 0.05))
    replicates = int(raw.get("replicates", 10000))
    z_convention = raw.get("z_convention", "exact")
    rng = RngStream(seed)
    rows = []
    for case in cases:
        rel_err, n_min = run_retrospective(case, epsilon, alpha, replicates, rng,
                                           z_convention)
        rows.append((case, rel_err, n_min))
    out_dir = _prepare_out(out)
    csv_path = out_dir / "retro.csv"
    write_csv(csv_path, RETRO_HEADER,
              [retro_row(case, rel, n_min) for case, rel, n_min in rows])
    outputs = [csv_path.name]
    if plot:
        from .plots import figure_retro, save_figure
        fig_path = out_dir / "retro.png"
        save_figure(figure_retro(rows), fig_path)
        outputs.append(fig_path.name)
    write_manifest(out_dir / "manifest.json", "retro", raw, seed, outputs)


@main.command()
@click.option("--config", "config_path", type=str, required=True,
              help="JSON file with M, q_grid, dbar_grid, epsilon, alpha.")
@click.option("--out", type=str, required=True)
@click.option("--seed", type=int, default=0, help="Recorded in the manifest only.")
@click.option("--plot", is_flag=True)
@_guard
def grid(config_path, out, seed, plot):
    """Minimum-sample-size surface over prevalence and mean degree."""
    raw = _load_config(config_path)
    population = int(raw["M"])
    q_grid = [float(q) for q in raw["q_grid"]]
    dbar_grid = [float(d) for d in raw["dbar_grid"]]
    design = StudyDesign(
        epsilon=float(raw.get("epsilon", 0.1)),
        alpha=float(raw.get("alpha", 0.05)),
        design_effect=float(raw.get("design_effect", 1.0)),
        z_convention="z2" if raw.get("z2", False) else "exact",
    )
    matrix = sample_size_grid(design, population, q_grid, dbar_grid)
    rows = [(q, dbar, int(matrix[i, j]))
            for i, q in enumerate(q_grid)
            for j, dbar in enumerate(dbar_grid)]
    out_dir = _prepare_out(out)
    csv_path = out_dir / "grid.csv"
    write_csv(csv_path, GRID_HEADER, rows)
    outputs = [csv_path.name]
    if plot:
        from .plots import figure_samplesize_grid, save_figure
        fig_path = out_dir / "grid.png"
        save_figure(figure_samplesize_grid(q_grid, dbar_grid, matrix, population),
                    fig_path)
        outputs.append(fig_path.name)
    write_manifest(out_dir / "manifest.json", "grid", raw, seed, outputs)


if __name__ == "__main__":
    main()
