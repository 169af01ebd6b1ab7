"""Affine functions on geodesic spaces and the splitting ``X -> Y x H``."""

from .affine import (
    AffineFunction,
    NotAffineError,
    absolute_gradient,
    affine_basis,
    check_affine,
    check_gradient_monotonicity,
    directional_slopes,
    evaluate,
    lipschitz_norm,
)
from .cat import check_bruhat_tits, check_cat, comparison_distance, model_distance
from .config import ConfigError, SpaceConfig, load_config, parse_config
from .embedding import (
    EmbeddingReport,
    EvaluationMap,
    FactorizationError,
    LipschitzViolation,
    QuotientView,
    TildeMetric,
    check_bruhat_tits_quotient,
    check_geodesic_additivity,
    check_isometry_identity,
    check_normalized,
    check_pseudometric,
    embed,
    evaluation_map,
    factor_affine_function,
    quotient_classes,
    tilde_distance,
)
from .estimator import AffineSplitting
from .hilbert import HilbertModel, NotHilbert, build_hilbert_model, parallelogram_residual, polarization_inner_product
from .results import CheckResult
from .spaces import (
    Curvature,
    EuclideanSpace,
    GraphPoint,
    InvalidSpaceError,
    L2Product,
    MetricGraph,
    NormedProduct,
    Pair,
    PointError,
    build_space,
    curvature_validity,
)
from .tolerances import DEFAULT as DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "absolute_gradient",
    "affine_basis",
    "AffineFunction",
    "AffineSplitting",
    "build_hilbert_model",
    "build_space",
    "check_affine",
    "check_bruhat_tits",
    "check_bruhat_tits_quotient",
    "check_cat",
    "check_geodesic_additivity",
    "check_gradient_monotonicity",
    "check_isometry_identity",
    "check_normalized",
    "check_pseudometric",
    "CheckResult",
    "comparison_distance",
    "ConfigError",
    "Curvature",
    "curvature_validity",
    "DEFAULT_TOLERANCES",
    "directional_slopes",
    "embed",
    "EmbeddingReport",
    "EuclideanSpace",
    "evaluate",
    "evaluation_map",
    "EvaluationMap",
    "factor_affine_function",
    "FactorizationError",
    "GraphPoint",
    "HilbertModel",
    "InvalidSpaceError",
    "L2Product",
    "lipschitz_norm",
    "LipschitzViolation",
    "load_config",
    "MetricGraph",
    "model_distance",
    "NormedProduct",
    "NotAffineError",
    "NotHilbert",
    "Pair",
    "parallelogram_residual",
    "parse_config",
    "PointError",
    "polarization_inner_product",
    "quotient_classes",
    "QuotientView",
    "SpaceConfig",
    "tilde_distance",
    "TildeMetric",
    "Tolerances",
]

__version__ = "0.1.0"
