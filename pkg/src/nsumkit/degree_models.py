"""Generative models for reported degree pairs and their exact moments.

Each model describes how a respondent's personal network size and their
number of ties into the hidden population are drawn. Sampling goes through
numpy's exact binomial/hypergeometric generators on a caller-supplied
stream, so every draw sequence is reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, UnsupportedModelError, UsageError
from .stats import RngStream


@dataclass(frozen=True)
class PopulationSpec:
    """General-population inputs a survey designer works with.

    ``hidden_size`` and ``tie_probability`` are derived: the number of
    hidden members is ``round(prevalence * population_size)`` and the
    implied tie probability is ``mean_degree / population_size``.
    """

    population_size: int
    prevalence: float
    mean_degree: float

    def __post_init__(self):
        m = self.population_size
        if not isinstance(m, int) or m < 2:
            raise DomainError(f"population_size must be an integer >= 2, got {m!r}")
        if not (0.0 < self.prevalence <= 1.0):
            raise DomainError(f"prevalence must lie in (0, 1], got {self.prevalence!r}")
        if not (0.0 < self.mean_degree <= m):
            raise DomainError(
                f"mean_degree must lie in (0, population_size], got {self.mean_degree!r}")
        if self.hidden_size < 1:
            raise DomainError("prevalence rounds to an empty hidden population")

    @property
    def hidden_size(self) -> int:
        return int(round(self.prevalence * self.population_size))

    @property
    def tie_probability(self) -> float:
        return self.mean_degree / self.population_size


def _check_probability(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class MarginalBinomial:
    """Independent binomial reports: degree Bin(M-1, p), hidden ties Bin(N, p)."""

    population_size: int
    hidden_size: int
    tie_probability: float

    def __post_init__(self):
        if self.population_size < 2:
            raise DomainError("population_size must be >= 2")
        if not (0 <= self.hidden_size <= self.population_size):
            raise DomainError("hidden_size must lie in [0, population_size]")
        _check_probability("tie_probability", self.tie_probability)


@dataclass(frozen=True)
class HypergeometricConditional:
    """Degree Bin(M-1, p); hidden ties drawn hypergeometrically from the degree.

    Conditioning on the degree guarantees hidden ties never exceed it while
    keeping the same binomial marginals.
    """

    population_size: int
    hidden_size: int
    tie_probability: float

    def __post_init__(self):
        if self.population_size < 2:
            raise DomainError("population_size must be >= 2")
        if not (0 <= self.hidden_size <= self.population_size - 1):
            raise DomainError("hidden_size must lie in [0, population_size - 1]")
        _check_probability("tie_probability", self.tie_probability)


@dataclass(frozen=True)
class ConditionalBinomial:
    """Degree Bin(M-1, p); hidden ties Bin(degree, p)."""

    population_size: int
    tie_probability: float

    def __post_init__(self):
        if self.population_size < 2:
            raise DomainError("population_size must be >= 2")
        _check_probability("tie_probability", self.tie_probability)


@dataclass(frozen=True)
class Killworth:
    """Hidden ties Bin(degree, N/M); degrees supplied by the caller."""

    population_size: int
    hidden_size: int

    def __post_init__(self):
        if self.population_size < 2:
            raise DomainError("population_size must be >= 2")
        if not (0 <= self.hidden_size <= self.population_size):
            raise DomainError("hidden_size must lie in [0, population_size]")


@dataclass(frozen=True)
class RetroBinomial:
    """Published-study reconstruction: degree Bin(M, d/M), hidden ties Bin(N, du/N)."""

    population_size: int
    estimated_hidden: int
    mean_degree: float
    mean_hidden_degree: float

    def __post_init__(self):
        if self.population_size < 2:
            raise DomainError("population_size must be >= 2")
        if not (1 <= self.estimated_hidden <= self.population_size):
            raise DomainError("estimated_hidden must lie in [1, population_size]")
        if not (0.0 < self.mean_degree <= self.population_size):
            raise DomainError("mean_degree must lie in (0, population_size]")
        if not (0.0 <= self.mean_hidden_degree <= self.estimated_hidden):
            raise DomainError("mean_hidden_degree must lie in [0, estimated_hidden]")


DegreeModel = Union[
    MarginalBinomial, HypergeometricConditional, ConditionalBinomial,
    Killworth, RetroBinomial,
]


@dataclass(frozen=True)
class DegreeSample:
    """Paired respondent reports: personal degrees and hidden-population ties."""

    degrees: np.ndarray
    hidden_degrees: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.degrees, dtype=np.int64)
        du = np.asarray(self.hidden_degrees, dtype=np.int64)
        if d.ndim != 1 or du.ndim != 1 or d.size != du.size or d.size < 1:
            raise DomainError("degree vectors must be 1-d, equal length and non-empty")
        if (d < 0).any() or (du < 0).any():
            raise DomainError("degree reports must be non-negative")
        object.__setattr__(self, "degrees", d)
        object.__setattr__(self, "hidden_degrees", du)

    @property
    def n(self) -> int:
        return int(self.degrees.size)


def sample_degrees(
    model: DegreeModel,
    n: int,
    rng: RngStream,
    *,
    personal_degrees: Optional[Sequence[int]] = None,
) -> DegreeSample:
    """Draw ``n`` i.i.d. paired degree reports from ``model``.

    The Killworth model has no marginal degree distribution, so it requires
    ``personal_degrees``; every other model rejects that argument.
    """
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n!r}")
    gen = rng.generator()

    if isinstance(model, Killworth):
        if personal_degrees is None:
            raise UsageError("the Killworth model needs caller-supplied personal degrees")
        d = np.asarray(personal_degrees, dtype=np.int64)
        if d.size != n:
            raise UsageError(f"expected {n} personal degrees, got {d.size}")
        if (d < 0).any() or (d > model.population_size - 1).any():
            raise DomainError("personal degrees must lie in [0, population_size - 1]")
        du = gen.binomial(d, model.hidden_size / model.population_size)
        return DegreeSample(d, du)

    if personal_degrees is not None:
        raise UsageError("only the Killworth model accepts supplied personal degrees")

    if isinstance(model, MarginalBinomial):
        d = gen.binomial(model.population_size - 1, model.tie_probability, size=n)
        du = gen.binomial(model.hidden_size, model.tie_probability, size=n)
        return DegreeSample(d, du)

    if isinstance(model, HypergeometricConditional):
        d = gen.binomial(model.population_size - 1, model.tie_probability, size=n)
        k, m = model.hidden_size, model.population_size
        du = np.zeros(n, dtype=np.int64)
        positive = d > 0
        if positive.any():
            du[positive] = gen.hypergeometric(k, m - 1 - k, d[positive])
        return DegreeSample(d, du)

    if isinstance(model, ConditionalBinomial):
        d = gen.binomial(model.population_size - 1, model.tie_probability, size=n)
        du = gen.binomial(d, model.tie_probability)
        return DegreeSample(d, du)

    if isinstance(model, RetroBinomial):
        d = gen.binomial(model.population_size,
                         model.mean_degree / model.population_size, size=n)
        du = gen.binomial(model.estimated_hidden,
                          model.mean_hidden_degree / model.estimated_hidden, size=n)
        return DegreeSample(d, du)

    raise UnsupportedModelError(f"unknown degree model: {model!r}")


def model_moments(model: DegreeModel) -> tuple[float, float, float, float]:
    """Exact marginal (mean, variance) of degrees and hidden-degree reports.

    Returns ``(mean_d, var_d, mean_du, var_du)``. The Killworth model has
    no marginal degree distribution and is rejected.
    """
    if isinstance(model, MarginalBinomial):
        m, k, p = model.population_size, model.hidden_size, model.tie_probability
        return ((m - 1) * p, (m - 1) * p * (1 - p), k * p, k * p * (1 - p))

    if isinstance(model, HypergeometricConditional):
        # Mixing Hypergeometric(M-1, N, d) over d ~ Bin(M-1, p) recovers
        # exactly Bin(N, p) marginally, so the moments match the marginal
        # binomial model.
        m, k, p = model.population_size, model.hidden_size, model.tie_probability
        return ((m - 1) * p, (m - 1) * p * (1 - p), k * p, k * p * (1 - p))

    if isinstance(model, ConditionalBinomial):
        m, p = model.population_size, model.tie_probability
        mean_d = (m - 1) * p
        var_d = (m - 1) * p * (1 - p)
        mean_du = (m - 1) * p * p
        # law of total variance over the degree
        var_du = (m - 1) * p * p * (1 - p) * (1 + p)
        return (mean_d, var_d, mean_du, var_du)

    if isinstance(model, RetroBinomial):
        m = model.population_size
        k = model.estimated_hidden
        pd = model.mean_degree / m
        pu = model.mean_hidden_degree / k
        return (m * pd, m * pd * (1 - pd), k * pu, k * pu * (1 - pu))

    if isinstance(model, Killworth):
        raise UnsupportedModelError(
            "the Killworth model specifies no marginal degree distribution")

    raise UnsupportedModelError(f"unknown degree model: {model!r}")
