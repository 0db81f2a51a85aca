"""Simulation harness: factorial study, deviation sweep, retrospective engine.

Every cell and replicate is addressed by a content-derived substream of the
run seed, so results are independent of execution order and identical
across reruns, worker counts, and partial runs.
"""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from .degree_models import DegreeSample, PopulationSpec
from .design import StudyDesign, sample_size_detail
from .errors import DegenerateSampleError, DomainError
from .estimator import confidence_interval, nsum_estimate, variance_conservative
from .graphs import (
    ERGM,
    Deviation,
    GraphModelSpec,
    assign_hidden,
    deviation_spec,
    generate,
)
from .stats import RngStream

_PURPOSE_GRAPH = 0
_PURPOSE_LABELS = 1
_PURPOSE_RESPONDENTS = 2


@dataclass(frozen=True)
class SimResult:
    """Aggregated outcome of one simulation cell."""

    label: str
    m_population: int
    prevalence: float
    alpha: float
    epsilon: float
    delta: Optional[float]
    n_used: Optional[int]
    mean_rel_err: Optional[float]
    sd_rel_err: Optional[float]
    coverage: Optional[float]
    replicates_run: int
    degenerate: int
    infeasible: bool
    truncated: bool
    rel_errs: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SimConfig:
    """Factorial study configuration.

    A model entry is (label, spec); the spec may also be one of the five
    shorthand names, which resolves to its default parameters per
    population size (preferential attachment scales its edges-per-step).
    """

    models: tuple[tuple[str, object], ...]
    m_grid: tuple[int, ...]
    q_grid: tuple[float, ...]
    alpha_grid: tuple[float, ...]
    epsilon: float
    replicates: int
    seed: int

    def __post_init__(self):
        if not self.models or not self.m_grid or not self.q_grid or not self.alpha_grid:
            raise DomainError("factorial grids must be non-empty")
        if self.replicates < 1:
            raise DomainError("replicates must be >= 1")


@dataclass(frozen=True)
class CaseStudy:
    """Published survey inputs for the retrospective engine."""

    name: str
    n_study: int
    population_size: int
    published_estimate: int
    mean_degree: float
    mean_hidden_degree: float

    def __post_init__(self):
        if self.n_study < 1 or self.n_study > self.population_size:
            raise DomainError("n_study must lie in [1, population_size]")
        if not (1 <= self.published_estimate <= self.population_size):
            raise DomainError("published_estimate must lie in [1, population_size]")
        if not (0.0 < self.mean_degree <= self.population_size):
            raise DomainError("mean_degree must lie in (0, population_size]")
        if not (0.0 <= self.mean_hidden_degree <= self.published_estimate):
            raise DomainError("mean_hidden_degree must lie in [0, published_estimate]")


def resolve_model(spec: GraphModelSpec, m_population: int) -> GraphModelSpec:
    """Canonical form of a model spec (deviation families reduce at delta 0/1)."""
    if isinstance(spec, Deviation):
        return deviation_spec(spec.family, spec.delta, m_population, spec.base_p)
    return spec


def model_requires_chain(spec: GraphModelSpec, m_population: int) -> bool:
    resolved = resolve_model(spec, m_population)
    return isinstance(resolved, ERGM) and resolved.theta_triangle != 0.0


def cell_is_infeasible(spec: GraphModelSpec, m_population: int, limit: int = 1000) -> bool:
    """Edge-toggle chains are limited to small populations."""
    return model_requires_chain(spec, m_population) and m_population > limit


def _descriptor_words(descriptor: str) -> tuple[int, int, int, int]:
    digest = hashlib.sha256(descriptor.encode("utf-8")).digest()
    return tuple(int.from_bytes(digest[4 * k:4 * k + 4], "big") for k in range(4))


def _cell_words(spec: GraphModelSpec, m: int, q: float, alpha: float,
                epsilon: float) -> tuple[int, int, int, int]:
    return _descriptor_words(f"{spec!r}|M={m}|q={q!r}|alpha={alpha!r}|eps={epsilon!r}|v1")


def simulate_cell(
    spec: GraphModelSpec,
    m_population: int,
    prevalence: float,
    alpha: float,
    epsilon: float,
    replicates: int,
    rng: RngStream,
    *,
    label: Optional[str] = None,
    delta: Optional[float] = None,
    z_convention: str = "exact",
    design_effect: float = 1.0,
    ci_variance: str = "plugin",
    include_hidden: bool = True,
    replicate_start: int = 0,
    return_replicates: bool = False,
) -> SimResult:
    """Monte Carlo study of one (model, M, q, alpha) cell.

    Each replicate draws a fresh graph, labels the hidden population,
    sizes the survey from the realized mean degree, samples respondents
    uniformly without replacement, and scores the scale-up estimate and
    its confidence interval against the true hidden count.
    """
    if replicates < 1:
        raise DomainError("replicates must be >= 1")
    if ci_variance not in ("plugin", "true"):
        raise DomainError(f"unknown ci_variance {ci_variance!r}")
    resolved = resolve_model(spec, m_population)
    name = label if label is not None else model_label(spec)
    if cell_is_infeasible(spec, m_population):
        return SimResult(name, m_population, prevalence, alpha, epsilon, delta,
                         None, None, None, None, 0, 0, True, False)

    words = _cell_words(resolved, m_population, prevalence, alpha, epsilon)
    design = StudyDesign(epsilon=epsilon, alpha=alpha, design_effect=design_effect,
                         z_convention=z_convention)
    z = design.z

    rel_errs: list[float] = []
    n_values: list[int] = []
    covered = 0
    degenerate = 0
    truncated_any = False

    for rep in range(replicate_start, replicate_start + replicates):
        graph_stream = rng.child(*words, rep, _PURPOSE_GRAPH)
        graph = generate(resolved, m_population, graph_stream)
        mean_degree = graph.mean_degree
        if mean_degree <= 0.0:
            degenerate += 1
            continue
        graph = assign_hidden(graph, prevalence,
                              rng.child(*words, rep, _PURPOSE_LABELS))
        n_true = graph.hidden_count

        pop = PopulationSpec(m_population, prevalence, min(mean_degree, m_population))
        n, _, truncated = sample_size_detail(design, pop)
        truncated_any = truncated_any or truncated

        gen = rng.child(*words, rep, _PURPOSE_RESPONDENTS).generator()
        if include_hidden:
            pool_size = m_population
            respondents = gen.choice(pool_size, size=min(n, pool_size), replace=False)
        else:
            pool = np.flatnonzero(~graph.hidden)
            respondents = pool[gen.choice(pool.size, size=min(n, pool.size),
                                          replace=False)]

        d = graph.degrees_array()[respondents]
        du = graph.hidden_degrees_array()[respondents]
        if d.sum() == 0:
            degenerate += 1
            continue
        sample = DegreeSample(d, du)
        n_hat = nsum_estimate(sample, m_population)
        n_hat = min(max(n_hat, 0.0), float(m_population))
        if ci_variance == "plugin":
            lo, hi = confidence_interval(n_hat, sample, m_population, alpha,
                                         z_convention)
        else:
            p_true = mean_degree / m_population
            var = variance_conservative(n_true, p_true, sample.n)
            half = z * math.sqrt(var)
            lo = min(max(n_hat - half, 0.0), float(m_population))
            hi = min(max(n_hat + half, 0.0), float(m_population))

        rel_errs.append(abs(n_hat - n_true) / n_true)
        n_values.append(len(respondents))
        if lo <= n_true <= hi:
            covered += 1

    run = len(rel_errs)
    if run == 0:
        return SimResult(name, m_population, prevalence, alpha, epsilon, delta,
                         None, None, None, None, 0, degenerate, False, truncated_any)
    errs = np.asarray(rel_errs)
    return SimResult(
        label=name,
        m_population=m_population,
        prevalence=prevalence,
        alpha=alpha,
        epsilon=epsilon,
        delta=delta,
        n_used=int(round(float(np.mean(n_values)))),
        mean_rel_err=float(errs.mean()),
        sd_rel_err=float(errs.std(ddof=1)) if run > 1 else 0.0,
        coverage=covered / run,
        replicates_run=run,
        degenerate=degenerate,
        infeasible=False,
        truncated=truncated_any,
        rel_errs=errs if return_replicates else None,
    )


def model_label(spec: GraphModelSpec) -> str:
    if isinstance(spec, Deviation):
        return spec.family
    return type(spec).__name__.lower()


def _factorial_cell(args) -> SimResult:
    config, label, spec, m, q, alpha = args
    if isinstance(spec, str):
        from .graphs import factorial_model
        spec = factorial_model(spec, m)
    return simulate_cell(spec, m, q, alpha, config.epsilon, config.replicates,
                         RngStream(config.seed), label=label)


def run_factorial(config: SimConfig, workers: int = 1) -> list[SimResult]:
    """One SimResult per cell of the Cartesian product, in sorted cell order."""
    cells = [
        ((label, m, q, alpha), spec)
        for (label, spec) in config.models
        for m in config.m_grid
        for q in config.q_grid
        for alpha in config.alpha_grid
    ]
    cells.sort(key=lambda entry: entry[0])
    jobs = [(config, key[0], spec, key[1], key[2], key[3]) for key, spec in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_factorial_cell, jobs))
    return [_factorial_cell(job) for job in jobs]


def run_deviation_sweep(
    delta_grid: Sequence[float],
    m_population: int,
    prevalence: float,
    alpha: float,
    epsilon: float,
    replicates: int,
    rng: RngStream,
    families: Sequence[str] = ("pa_mixture", "sbm_2block", "ergm_plus", "ergm_minus"),
    base_p: float = 0.1,
) -> list[SimResult]:
    """Sweep the deviation families over delta; rows sorted by (family, delta).

    At delta 0 every family reduces exactly to the ER baseline model, so
    those rows share the baseline's substreams and reproduce it bit for bit.
    """
    results = []
    for family in sorted(families):
        for delta in sorted(float(d) for d in delta_grid):
            spec = Deviation(family, delta, base_p)
            results.append(simulate_cell(
                spec, m_population, prevalence, alpha, epsilon, replicates, rng,
                label=family, delta=delta))
    return results


def retro_bias(case: CaseStudy) -> float:
    """Closed-form bias of the retrospective engine's relative error.

    The engine's estimates center on M * mean_hidden_degree / mean_degree;
    the published estimate differs from that by this relative amount, which
    dominates the Monte Carlo average when it is large.
    """
    centered = case.population_size * case.mean_hidden_degree / case.mean_degree
    return abs(centered - case.published_estimate) / case.published_estimate


def retro_minimum_sample_size(case: CaseStudy, epsilon: float, alpha: float,
                              z_convention: str = "exact") -> int:
    design = StudyDesign(epsilon=epsilon, alpha=alpha, z_convention=z_convention)
    pop = PopulationSpec(case.population_size,
                         case.published_estimate / case.population_size,
                         case.mean_degree)
    n, _, _ = sample_size_detail(design, pop)
    return n


def run_retrospective(
    case: CaseStudy,
    epsilon: float,
    alpha: float,
    replicates: int,
    rng: RngStream,
    z_convention: str = "exact",
    return_detail: bool = False,
):
    """Monte Carlo mean relative error and minimum sample size for one study.

    Each replicate redraws the study's degree reports from independent
    binomials matched to the published means and re-estimates the hidden
    population. Respondent totals are drawn directly through the
    binomial-sum identity (a sum of n iid Bin(t, p) is Bin(n*t, p)), which
    is distribution-exact and keeps 10,000 replicates instantaneous.
    """
    if replicates < 1:
        raise DomainError("replicates must be >= 1")
    n_min = retro_minimum_sample_size(case, epsilon, alpha, z_convention)
    words = _descriptor_words(
        f"retro|{case.name}|{case.n_study}|{case.population_size}"
        f"|{case.published_estimate}|{case.mean_degree!r}"
        f"|{case.mean_hidden_degree!r}|{epsilon!r}|{alpha!r}|v1")
    gen = rng.child(*words).generator()

    m = case.population_size
    n = case.n_study
    p_d = case.mean_degree / m
    p_u = case.mean_hidden_degree / case.published_estimate
    sum_d = gen.binomial(n * m, p_d, size=replicates)
    sum_du = gen.binomial(n * case.published_estimate, p_u, size=replicates)
    ok = sum_d > 0
    if not ok.any():
        raise DegenerateSampleError("every replicate drew an all-zero degree sample")
    estimates = m * sum_du[ok] / sum_d[ok]
    signed = (estimates - case.published_estimate) / case.published_estimate
    rel_err = float(np.abs(signed).mean())
    if return_detail:
        return rel_err, n_min, signed
    return rel_err, n_min


def bundled_case_studies() -> list[CaseStudy]:
    """The seven bundled published surveys used by the retrospective engine."""
    raw = json.loads(resources.files("nsumkit.data").joinpath("case_studies.json")
                     .read_text(encoding="utf-8"))
    return [CaseStudy(**row) for row in raw]
