"""Exact finite-stage constructions for 1-Lipschitz retractions of the
Urysohn space: metric triples, amalgamation, rationalization, a Fraisse-style
stage builder, and stage-level topology predicates."""

from .errors import (
    BudgetExceededError,
    ConvergenceError,
    InvalidTripleError,
    MetricError,
    PipelineError,
    PreconditionError,
    UrysohnError,
)
from .scalar import ONE, SQRT2, ZERO, Ordering, Scalar, rational_in_interval, scalar_compare
from .metric import (
    Embedding,
    FiniteMetricSpace,
    KatetovFunction,
    ValidationReport,
    Violation,
    distance_to_subset,
    extend_one_point,
    find_isometric_embeddings,
    katetov_validate,
    validate_metric,
)
from .triple import (
    AttachTo,
    DiscrepancyReport,
    ExtensionSpec,
    NewRetractPoint,
    Triple,
    apply_extension,
    discrepancy,
    enumerate_one_point_extensions,
    find_commuting_embeddings,
    validate_triple,
)
from .amalgam import (
    SharedPart,
    amalgamate_max,
    amalgamate_min,
    commuting_completion,
    extend_retraction_over_point,
    glue_epsilon_copy,
    max_metric_regularize,
)
from .rationalize import RationalizationTrace, nearby_rational_embedding, rationalize_triple

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "ConvergenceError",
    "InvalidTripleError",
    "MetricError",
    "PipelineError",
    "PreconditionError",
    "UrysohnError",
    "ONE",
    "SQRT2",
    "ZERO",
    "Ordering",
    "Scalar",
    "rational_in_interval",
    "scalar_compare",
    "Embedding",
    "FiniteMetricSpace",
    "KatetovFunction",
    "ValidationReport",
    "Violation",
    "distance_to_subset",
    "extend_one_point",
    "find_isometric_embeddings",
    "katetov_validate",
    "validate_metric",
    "AttachTo",
    "DiscrepancyReport",
    "ExtensionSpec",
    "NewRetractPoint",
    "Triple",
    "apply_extension",
    "discrepancy",
    "enumerate_one_point_extensions",
    "find_commuting_embeddings",
    "validate_triple",
    "SharedPart",
    "amalgamate_max",
    "amalgamate_min",
    "commuting_completion",
    "extend_retraction_over_point",
    "glue_epsilon_copy",
    "max_metric_regularize",
    "RationalizationTrace",
    "nearby_rational_embedding",
    "rationalize_triple",
]
