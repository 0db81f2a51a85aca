"""Figure rendering for the delimited outputs.

Each builder takes the same result records the CSV writers consume and
returns a matplotlib figure; the CLI saves them next to the CSV when asked
to. Rendering is presentation only and never feeds back into results.
"""
from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .montecarlo import CaseStudy, SimResult

_MODEL_COLORS = {
    "er": "tab:blue",
    "ergm": "tab:orange",
    "pa": "tab:green",
    "sbm": "tab:red",
    "smallworld": "tab:purple",
    "pa_mixture": "tab:green",
    "sbm_2block": "tab:red",
    "ergm_plus": "tab:orange",
    "ergm_minus": "tab:brown",
}


def _color(label: str):
    return _MODEL_COLORS.get(label, "tab:gray")


def figure_samplesize_grid(q_grid: Sequence[float], dbar_grid: Sequence[float],
                           matrix: np.ndarray, population_size: int):
    """Minimum sample size against prevalence, one curve per mean degree."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for j, dbar in enumerate(dbar_grid):
        ax.plot(q_grid, matrix[:, j], marker="o", ms=3, label=f"mean degree {dbar:g}")
    ax.axhline(population_size, color="k", ls="--", lw=0.8,
               label=f"population cap {population_size}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("prevalence")
    ax.set_ylabel("minimum sample size")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _grouped(results: Sequence[SimResult], x_of):
    groups: dict[tuple, list[SimResult]] = {}
    for r in results:
        if r.infeasible or r.mean_rel_err is None:
            continue
        groups.setdefault((r.label, r.m_population, r.alpha), []).append(r)
    for key, rows in groups.items():
        rows.sort(key=x_of)
    return groups


def figure_factorial(results: Sequence[SimResult]):
    """Relative error and coverage against prevalence, per model."""
    fig, (ax_err, ax_cov) = plt.subplots(2, 1, figsize=(8, 8), sharex=True)
    groups = _grouped(results, x_of=lambda r: r.prevalence)
    epsilons = set()
    for (label, m, alpha), rows in sorted(groups.items()):
        xs = [r.prevalence for r in rows]
        ax_err.plot(xs, [r.mean_rel_err for r in rows], marker="o", ms=3,
                    color=_color(label), label=f"{label} M={m} a={alpha:g}")
        ax_cov.plot(xs, [r.coverage for r in rows], marker="o", ms=3,
                    color=_color(label))
        ax_cov.axhline(1 - alpha, color="k", ls=":", lw=0.6)
        epsilons.update(r.epsilon for r in rows)
    for eps in epsilons:
        ax_err.axhline(eps, color="k", ls="--", lw=0.8)
    ax_err.set_ylabel("mean relative error")
    ax_cov.set_ylabel("coverage")
    ax_cov.set_xlabel("prevalence")
    ax_err.legend(fontsize=7)
    fig.tight_layout()
    return fig


def figure_sweep(results: Sequence[SimResult]):
    """Relative error and coverage against the deviation size, per family."""
    fig, (ax_err, ax_cov) = plt.subplots(2, 1, figsize=(8, 8), sharex=True)
    groups: dict[str, list[SimResult]] = {}
    for r in results:
        if r.infeasible or r.mean_rel_err is None or r.delta is None:
            continue
        groups.setdefault(r.label, []).append(r)
    for label, rows in sorted(groups.items()):
        rows.sort(key=lambda r: r.delta)
        xs = [r.delta for r in rows]
        ax_err.errorbar(xs, [r.mean_rel_err for r in rows],
                        yerr=[r.sd_rel_err for r in rows], marker="o", ms=3,
                        capsize=2, color=_color(label), label=label)
        ax_cov.plot(xs, [r.coverage for r in rows], marker="o", ms=3,
                    color=_color(label))
    if results:
        ax_err.axhline(results[0].epsilon, color="k", ls="--", lw=0.8)
        ax_cov.axhline(1 - results[0].alpha, color="k", ls=":", lw=0.8)
    ax_err.set_ylabel("mean relative error")
    ax_cov.set_ylabel("coverage")
    ax_cov.set_xlabel("deviation from the ER baseline")
    ax_err.legend(fontsize=8)
    fig.tight_layout()
    return fig


def figure_retro(rows: Sequence[tuple[CaseStudy, float, int]]):
    """Study sample sizes against the computed minimums, plus error bars."""
    fig, (ax_n, ax_err) = plt.subplots(1, 2, figsize=(11, 5))
    ns = [case.n_study for case, _, _ in rows]
    mins = [n_min for _, _, n_min in rows]
    ax_n.scatter(mins, ns, color="tab:blue")
    for case, _, n_min in rows:
        ax_n.annotate(case.name, (n_min, case.n_study), fontsize=7,
                      textcoords="offset points", xytext=(4, 2))
    lim = [min(mins + ns) * 0.7, max(mins + ns) * 1.5]
    ax_n.plot(lim, lim, "k--", lw=0.8)
    ax_n.set_xscale("log")
    ax_n.set_yscale("log")
    ax_n.set_xlabel("computed minimum sample size")
    ax_n.set_ylabel("study sample size")

    names = [case.name for case, _, _ in rows]
    errs = [rel for _, rel, _ in rows]
    ax_err.barh(names, errs, color="tab:orange")
    ax_err.set_xlabel("mean relative error")
    fig.tight_layout()
    return fig


def save_figure(fig, path) -> None:
    fig.savefig(path, dpi=150)
    plt.close(fig)
