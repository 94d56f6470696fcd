"""Evaluation of pairwise comparison data.

Three evaluation methods (logarithmic least squares, eigenvector method, and
Bradley-Terry/Thurstone maximum likelihood), consistency tests in both the
count and ratio representations, a catalog of connected comparison structures
up to isomorphism (n <= 6), and a seeded Monte-Carlo experiment scoring how
much of the complete-data evaluation each incomplete structure retrieves.
"""

from .core import (
    DEFAULT_CYCLE_TOL,
    IPCM,
    ComparisonGraph,
    ConsistencyReport,
    DataMatrix,
    ExpectedValueVector,
    ModelKind,
    WeightVector,
    data_consistency,
    exact_probabilities,
    ford_condition,
    pcm_consistency,
    pcm_from_data,
)
from .errors import (
    BadDiagonal,
    BadHeader,
    DisconnectedGraph,
    DuplicatePair,
    FordViolation,
    MissingSlice,
    NegativeCount,
    NoConvergence,
    NonPositiveEntry,
    NotReciprocal,
    PaircompError,
    ParseError,
    TooLarge,
)
from .estimators import (
    EmResult,
    MleResult,
    bt_mle,
    em,
    llsm,
    log_likelihood,
    log_likelihood_gradient,
    m_from_weights,
    mm_step,
    weights_from_m,
)
from .graphs import (
    GraphClass,
    GraphProperties,
    canonical_code,
    enumerate_connected,
    properties,
    single_edge_extensions,
    star_class,
)
from .simulation import (
    HIGHER_IS_BETTER,
    MEASURE_NAMES,
    MeasureSet,
    MeasureStats,
    SimulationConfig,
    SimulationSummary,
    draw_initial_weights,
    error_bound,
    perturb_data,
    run,
    similarity,
)

__version__ = "0.1.0"

__all__ = [
    "BadDiagonal",
    "BadHeader",
    "ComparisonGraph",
    "ConsistencyReport",
    "DataMatrix",
    "DEFAULT_CYCLE_TOL",
    "DisconnectedGraph",
    "DuplicatePair",
    "EmResult",
    "ExpectedValueVector",
    "FordViolation",
    "GraphClass",
    "GraphProperties",
    "HIGHER_IS_BETTER",
    "IPCM",
    "MEASURE_NAMES",
    "MeasureSet",
    "MeasureStats",
    "MissingSlice",
    "MleResult",
    "ModelKind",
    "NegativeCount",
    "NoConvergence",
    "NonPositiveEntry",
    "NotReciprocal",
    "PaircompError",
    "ParseError",
    "SimulationConfig",
    "SimulationSummary",
    "TooLarge",
    "WeightVector",
    "bt_mle",
    "canonical_code",
    "data_consistency",
    "draw_initial_weights",
    "em",
    "enumerate_connected",
    "error_bound",
    "exact_probabilities",
    "ford_condition",
    "llsm",
    "log_likelihood",
    "log_likelihood_gradient",
    "m_from_weights",
    "mm_step",
    "pcm_consistency",
    "pcm_from_data",
    "perturb_data",
    "properties",
    "run",
    "similarity",
    "single_edge_extensions",
    "star_class",
    "weights_from_m",
    "__version__",
]
