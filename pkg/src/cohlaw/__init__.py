"""Coherence of random matrices with independent spherical columns.

The library samples n-by-p matrices whose columns are rotation-invariant,
computes the coherence (the largest absolute column correlation), and gives
the exact finite-sample law of a single correlation, the limiting extreme
value laws of the coherence across growth regimes, a Poisson (Chen-Stein)
finite-n approximation with a rigorous error bound, an independence test
built on these laws, sparse-recovery (mutual incoherence) audits, and a
Monte Carlo harness that verifies the distributional claims empirically.
"""

from .errors import (
    CohlawError,
    DegenerateColumnError,
    DiscreteLawError,
    DomainError,
    FileFormatError,
    InfeasibleThresholdError,
    ParameterError,
    ResourceBudgetError,
    ShapeError,
)
from .exact import (
    CorrLaw,
    SmallSampleLaw,
    TailAsymptotic,
    cdf,
    gamma_ratio,
    gamma_ratio_asymptotic,
    pdf,
    small_n_law,
    tail_integral,
    tail_integral_asymptotic,
    tail_prob,
    tail_quantile,
)
from .harness import (
    DEFAULT_BUDGET,
    SUITE_NAMES,
    EmpiricalDist,
    ExperimentConfig,
    Statistic,
    compare_to_law,
    flop_estimate,
    ks_distance,
    run,
    verify_suite,
)
from .inference import (
    MipReport,
    TestMethod,
    TestReport,
    independence_test,
    make_sensing_matrix,
    mip_report,
)
from .kernel import CoherenceResult, coherence, log_one_minus_square, pair_correlations
from .limits import (
    K_SUBEXP,
    K_SUPEREXP,
    LawSpec,
    LlnPrediction,
    PivotalStat,
    Regime,
    RegimeDecision,
    RegimeThresholds,
    classify_regime,
    exp_cdf,
    k_exponential,
    law_cdf,
    lln_prediction,
    pivotal_stat,
    subexp_cdf,
    superexp_cdf,
    superexp_stat,
    threshold_from_level,
    transitional_cdf,
)
from .matio import read_matrix, write_matrix
from .poisson import PoissonApprox, h_n_value, poisson_approx
from .sampling import (
    DistributionSpec,
    Gaussian,
    MultivariateT,
    SampleMatrix,
    ScaleMixture,
    sample_matrix,
    sample_unit_sphere,
)

__version__ = "0.1.0"

__all__ = [
    "CohlawError",
    "DegenerateColumnError",
    "DiscreteLawError",
    "DomainError",
    "FileFormatError",
    "InfeasibleThresholdError",
    "ParameterError",
    "ResourceBudgetError",
    "ShapeError",
    "CorrLaw",
    "SmallSampleLaw",
    "TailAsymptotic",
    "cdf",
    "gamma_ratio",
    "gamma_ratio_asymptotic",
    "pdf",
    "small_n_law",
    "tail_integral",
    "tail_integral_asymptotic",
    "tail_prob",
    "tail_quantile",
    "DEFAULT_BUDGET",
    "SUITE_NAMES",
    "EmpiricalDist",
    "ExperimentConfig",
    "Statistic",
    "compare_to_law",
    "flop_estimate",
    "ks_distance",
    "run",
    "verify_suite",
    "MipReport",
    "TestMethod",
    "TestReport",
    "independence_test",
    "make_sensing_matrix",
    "mip_report",
    "CoherenceResult",
    "coherence",
    "log_one_minus_square",
    "pair_correlations",
    "K_SUBEXP",
    "K_SUPEREXP",
    "LawSpec",
    "LlnPrediction",
    "PivotalStat",
    "Regime",
    "RegimeDecision",
    "RegimeThresholds",
    "classify_regime",
    "exp_cdf",
    "k_exponential",
    "law_cdf",
    "lln_prediction",
    "pivotal_stat",
    "subexp_cdf",
    "superexp_cdf",
    "superexp_stat",
    "threshold_from_level",
    "transitional_cdf",
    "read_matrix",
    "write_matrix",
    "PoissonApprox",
    "h_n_value",
    "poisson_approx",
    "DistributionSpec",
    "Gaussian",
    "MultivariateT",
    "SampleMatrix",
    "ScaleMixture",
    "sample_matrix",
    "sample_unit_sphere",
    "__version__",
]
