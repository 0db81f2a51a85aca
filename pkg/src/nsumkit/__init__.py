"""Scale-up survey toolkit: estimator, sample-size heuristics, simulations."""

__version__ = "0.1.0"

from .degree_models import (
    ConditionalBinomial,
    DegreeSample,
    HypergeometricConditional,
    Killworth,
    MarginalBinomial,
    PopulationSpec,
    RetroBinomial,
    model_moments,
    sample_degrees,
)
from .design import (
    StudyDesign,
    effective_sample_size,
    min_sample_size,
    sample_size_detail,
    sample_size_grid,
)
from .estimator import (
    MomentSet,
    NsumEstimate,
    confidence_interval,
    estimate_with_interval,
    mean_taylor,
    nsum_estimate,
    variance_conservative,
    variance_table,
    variance_taylor_ratio,
)
from .graphs import (
    ER,
    ERGM,
    PA,
    SBM,
    Deviation,
    Graph,
    SmallWorld,
    factorial_model,
    factorial_models,
    assign_hidden,
    degrees,
    deviation_spec,
    generate,
)
from .montecarlo import (
    CaseStudy,
    SimConfig,
    SimResult,
    retro_bias,
    run_deviation_sweep,
    run_factorial,
    run_retrospective,
    simulate_cell,
    bundled_case_studies,
)
from .stats import RngStream, normal_cdf, normal_quantile, summarize

__all__ = [
    "__version__",
    "ConditionalBinomial", "DegreeSample", "HypergeometricConditional",
    "Killworth", "MarginalBinomial", "PopulationSpec", "RetroBinomial",
    "model_moments", "sample_degrees",
    "StudyDesign", "effective_sample_size", "min_sample_size",
    "sample_size_detail", "sample_size_grid",
    "MomentSet", "NsumEstimate", "confidence_interval", "estimate_with_interval",
    "mean_taylor", "nsum_estimate", "variance_conservative", "variance_table",
    "variance_taylor_ratio",
    "ER", "ERGM", "PA", "SBM", "Deviation", "Graph", "SmallWorld",
    "factorial_model", "factorial_models", "assign_hidden", "degrees",
    "deviation_spec", "generate",
    "CaseStudy", "SimConfig", "SimResult", "retro_bias", "run_deviation_sweep",
    "run_factorial", "run_retrospective", "simulate_cell", "bundled_case_studies",
    "RngStream", "normal_cdf", "normal_quantile", "summarize",
]
