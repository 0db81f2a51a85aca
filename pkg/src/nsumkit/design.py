"""Minimum-sample-size heuristics for scale-up surveys.

The core formula is ceil((z^2 / eps^2) * (1/q) * (1/d_bar - 1/M) * deff),
clamped to [1, M]. A ``z2`` convention replaces the exact normal quantile
with 2, matching the back-of-envelope arithmetic common in applied work.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .degree_models import PopulationSpec
from .errors import DomainError
from .stats import normal_quantile


@dataclass(frozen=True)
class StudyDesign:
    """Precision targets for a survey: relative margin, level, design effect."""

    epsilon: float
    alpha: float
    design_effect: float = 1.0
    z_convention: str = "exact"

    def __post_init__(self):
        if not (self.epsilon > 0.0):
            raise DomainError(f"epsilon must be positive, got {self.epsilon!r}")
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (self.design_effect > 0.0):
            raise DomainError(f"design_effect must be positive, got {self.design_effect!r}")
        if self.z_convention not in ("exact", "z2"):
            raise DomainError(f"unknown z convention {self.z_convention!r}")

    @property
    def z(self) -> float:
        if self.z_convention == "z2":
            return 2.0
        return normal_quantile(1.0 - self.alpha / 2.0)


def sample_size_raw(design: StudyDesign, pop: PopulationSpec) -> float:
    """The pre-ceiling, pre-clamp value of the minimum-sample-size formula."""
    z = design.z
    bracket = 1.0 / pop.mean_degree - 1.0 / pop.population_size
    return (z * z / (design.epsilon * design.epsilon)) / pop.prevalence \
        * bracket * design.design_effect


def min_sample_size(design: StudyDesign, pop: PopulationSpec) -> int:
    """Minimum respondents for the requested relative precision, in [1, M]."""
    n, _, _ = sample_size_detail(design, pop)
    return n


def sample_size_detail(design: StudyDesign, pop: PopulationSpec) -> tuple[int, float, bool]:
    """Returns (n, raw pre-ceiling value, whether the cap at M was binding)."""
    raw = sample_size_raw(design, pop)
    # guard the ceiling against float slop in products that are exactly integral
    n = math.ceil(raw - 1e-12 * max(1.0, abs(raw)))
    truncated = n > pop.population_size
    n = min(max(n, 1), pop.population_size)
    return n, raw, truncated


def effective_sample_size(n: int, design_effect: float) -> float:
    """Nominal sample size deflated by the design effect."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not (design_effect > 0.0):
        raise DomainError("design_effect must be positive")
    return n / design_effect


def sample_size_grid(
    design: StudyDesign,
    population_size: int,
    q_grid: Sequence[float],
    dbar_grid: Sequence[float],
) -> np.ndarray:
    """Matrix of minimum sample sizes over prevalence x mean-degree, capped at M.

    Rows follow ``q_grid``, columns follow ``dbar_grid``; entries are
    non-increasing along both axes.
    """
    if len(q_grid) == 0 or len(dbar_grid) == 0:
        raise DomainError("grids must be non-empty")
    out = np.empty((len(q_grid), len(dbar_grid)), dtype=np.int64)
    for i, q in enumerate(q_grid):
        for j, dbar in enumerate(dbar_grid):
            pop = PopulationSpec(population_size, q, dbar)
            out[i, j] = min_sample_size(design, pop)
    return out
