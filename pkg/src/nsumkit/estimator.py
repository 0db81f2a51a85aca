"""The classic network scale-up estimator and its variance approximations.

The point estimate is the population size times the ratio of summed
hidden-tie reports to summed personal degrees. Several variance
approximations are provided: the conservative closed form used for study
design, first-order Taylor linearization of a ratio, and the published
closed-form table entries for particular degree models.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .degree_models import (
    ConditionalBinomial,
    DegreeModel,
    DegreeSample,
    Killworth,
    MarginalBinomial,
)
from .errors import DegenerateSampleError, DomainError, UnsupportedModelError
from .stats import normal_quantile


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of the numerator/denominator pair of a ratio."""

    mu_x: float
    mu_y: float
    var_x: float
    var_y: float
    cov_xy: float

    def __post_init__(self):
        if self.var_x < 0 or self.var_y < 0:
            raise DomainError("variances must be non-negative")
        bound = math.sqrt(self.var_x * self.var_y)
        if abs(self.cov_xy) > bound * (1 + 1e-12) + 1e-300:
            raise DomainError("covariance violates the Cauchy-Schwarz bound")


@dataclass(frozen=True)
class NsumEstimate:
    """A scale-up estimate with its plug-in variance and confidence interval."""

    n_hat: float
    variance: float
    ci_lo: float
    ci_hi: float
    n: int
    alpha: float


def _z_value(alpha: float, z_convention: str) -> float:
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if z_convention == "z2":
        return 2.0
    if z_convention == "exact":
        return normal_quantile(1.0 - alpha / 2.0)
    raise DomainError(f"unknown z convention {z_convention!r}")


def nsum_estimate(sample: DegreeSample, population_size: int) -> float:
    """Scale-up point estimate: population_size * sum(hidden ties) / sum(degrees)."""
    if population_size < 1:
        raise DomainError("population_size must be >= 1")
    total_d = int(sample.degrees.sum())
    if total_d == 0:
        raise DegenerateSampleError(
            "all personal degrees are zero; the estimate is undefined")
    total_du = int(sample.hidden_degrees.sum())
    return population_size * total_du / total_d


def variance_conservative(n_hidden: float, tie_probability: float, n: int) -> float:
    """Conservative estimator variance (N/n) * (1-p)/p.

    This is the design-time variance: it dominates the model-specific
    approximations below and converges to the linearized one as the
    population grows with the hidden count held fixed.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if n_hidden <= 0:
        raise DomainError("n_hidden must be positive")
    if not (0.0 < tie_probability < 1.0):
        raise DomainError("tie_probability must lie strictly inside (0, 1)")
    return (n_hidden / n) * (1.0 - tie_probability) / tie_probability


def variance_taylor_ratio(moments: MomentSet) -> float:
    """First-order delta-method variance of the ratio X/Y."""
    if moments.mu_x == 0.0 or moments.mu_y == 0.0:
        raise DomainError("ratio moments require non-zero means")
    mx, my = moments.mu_x, moments.mu_y
    return (mx * mx / (my * my)) * (
        moments.var_x / (mx * mx)
        - 2.0 * moments.cov_xy / (mx * my)
        + moments.var_y / (my * my)
    )


def mean_taylor(moments: MomentSet, order: int) -> float:
    """Delta-method mean of the ratio X/Y at first or second order."""
    if moments.mu_y == 0.0:
        raise DomainError("ratio moments require a non-zero denominator mean")
    first = moments.mu_x / moments.mu_y
    if order == 1:
        return first
    if order == 2:
        my = moments.mu_y
        return first - moments.cov_xy / (my * my) + moments.mu_x * moments.var_y / my**3
    raise UnsupportedModelError(f"mean approximation order must be 1 or 2, got {order!r}")


def variance_table(model: DegreeModel, n: int, method: str = "linearize_xy") -> float:
    """Closed-form estimator variance for the documented model/method pairs.

    Methods are ``linearize_xy`` (delta method on X/Y) and
    ``linearize_inv_y`` (total-variance decomposition, linearizing 1/Y).
    Combinations without a published closed form raise
    ``UnsupportedModelError``. The reference-style conditional model is
    addressed through ``Killworth`` with tie probability N/M.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if method not in ("linearize_xy", "linearize_inv_y"):
        raise UnsupportedModelError(f"unknown linearization method {method!r}")

    if isinstance(model, MarginalBinomial):
        m, k, p = model.population_size, model.hidden_size, model.tie_probability
        if not (0.0 < p < 1.0):
            raise DomainError("tie_probability must lie strictly inside (0, 1)")
        if method == "linearize_xy":
            return (k / n) * ((1.0 - p) / p) * (1.0 - k / m)
        # Published long-form entry for the 1/Y linearization; documented
        # as-is and excluded from the conservativeness ordering.
        return (k / n) * ((1.0 - p) / p) * (
            n * p * (m - k) + 2.0 + 1.0 / m + k / (m * m))

    if isinstance(model, ConditionalBinomial):
        if method != "linearize_inv_y":
            raise UnsupportedModelError(
                "the conditional binomial model only has a 1/Y linearization")
        m, p = model.population_size, model.tie_probability
        if not (0.0 < p < 1.0):
            raise DomainError("tie_probability must lie strictly inside (0, 1)")
        return m * p * (1.0 - p) * (m + 1.0 / n)

    if isinstance(model, Killworth):
        if method != "linearize_inv_y":
            raise UnsupportedModelError(
                "the reference conditional model only has a 1/Y linearization")
        m, k = model.population_size, model.hidden_size
        p = k / m
        if not (0.0 < p < 1.0):
            raise DomainError("hidden share must lie strictly inside (0, 1)")
        return (k / n) * ((1.0 - p) / p) * (1.0 + k / m)

    raise UnsupportedModelError(
        f"no closed-form variance is defined for {type(model).__name__}")


def confidence_interval(
    n_hat: float,
    sample: DegreeSample,
    population_size: int,
    alpha: float,
    z_convention: str = "exact",
) -> tuple[float, float]:
    """Plug-in normal interval for the scale-up estimate, clamped to [0, M].

    The variance plugs the estimate and the observed mean degree into the
    conservative closed form, mirroring what a survey can actually compute.
    """
    z = _z_value(alpha, z_convention)
    p_hat = float(sample.degrees.mean()) / population_size
    if p_hat == 0.0:
        raise DegenerateSampleError("observed mean degree is zero; no interval exists")
    if n_hat < 0:
        raise DomainError("n_hat must be non-negative")
    if p_hat >= 1.0:
        variance = 0.0
    else:
        variance = (n_hat / sample.n) * (1.0 - p_hat) / p_hat
    half = z * math.sqrt(variance)
    lo = min(max(n_hat - half, 0.0), float(population_size))
    hi = min(max(n_hat + half, 0.0), float(population_size))
    return lo, hi


def estimate_with_interval(
    sample: DegreeSample,
    population_size: int,
    alpha: float,
    z_convention: str = "exact",
) -> NsumEstimate:
    """Point estimate, plug-in variance and confidence interval in one record."""
    raw = nsum_estimate(sample, population_size)
    n_hat = min(max(raw, 0.0), float(population_size))
    p_hat = float(sample.degrees.mean()) / population_size
    variance = 0.0 if p_hat >= 1.0 else (n_hat / sample.n) * (1.0 - p_hat) / p_hat
    lo, hi = confidence_interval(n_hat, sample, population_size, alpha, z_convention)
    return NsumEstimate(n_hat=n_hat, variance=variance, ci_lo=lo, ci_hi=hi,
                        n=sample.n, alpha=alpha)
