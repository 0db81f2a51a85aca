"""Delimited output and run manifests.

CSV schemas are fixed so downstream plot scripts never guess: numeric
fields print with six significant digits, missing statistics print empty,
and row order follows the harness's sorted cell order. Identical inputs
always produce byte-identical files.
"""
from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .montecarlo import CaseStudy, SimResult

SIMULATE_HEADER = ("model", "M", "q", "alpha", "epsilon", "n_used", "mean_rel_err",
                   "sd_rel_err", "coverage", "replicates", "degenerate", "infeasible")
SWEEP_HEADER = ("model", "delta", "M", "q", "alpha", "epsilon", "n_used",
                "mean_rel_err", "sd_rel_err", "coverage", "replicates",
                "degenerate", "infeasible")
RETRO_HEADER = ("name", "n_study", "M", "N_hat", "d_bar", "d_bar_u", "rel_err", "n_min")
GRID_HEADER = ("q", "d_bar", "n")


def format_value(value) -> str:
    """Fixed formatting: ints plain, floats at 6 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def simulate_row(r: SimResult) -> tuple:
    return (r.label, r.m_population, r.prevalence, r.alpha, r.epsilon, r.n_used,
            r.mean_rel_err, r.sd_rel_err, r.coverage, r.replicates_run,
            r.degenerate, r.infeasible)


def sweep_row(r: SimResult) -> tuple:
    return (r.label, r.delta, r.m_population, r.prevalence, r.alpha, r.epsilon,
            r.n_used, r.mean_rel_err, r.sd_rel_err, r.coverage, r.replicates_run,
            r.degenerate, r.infeasible)


def retro_row(case: CaseStudy, rel_err: float, n_min: int) -> tuple:
    return (case.name, case.n_study, case.population_size, case.published_estimate,
            case.mean_degree, case.mean_hidden_degree, rel_err, n_min)


def write_manifest(path, command: str, config: dict, seed: Optional[int],
                   outputs: Sequence[str], notes: Optional[dict] = None) -> None:
    """Record everything needed to reproduce a run's outputs bit for bit."""
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": list(outputs),
        "notes": notes or {},
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
