"""Plane trees under leaf/internal/root Gibbs weights.

Exact counting, generating-function tables, exact-distribution
sampling, and scaling experiments for rooted ordered trees weighted by
``a^leaves * b^internal * c^root_degree``.
"""

from .asymptotics import (
    HypothesisViolated,
    LimitPrediction,
    TollAnalysis,
    analyze_toll,
    predict_limit,
    predict_mean_ratio,
    q_constant,
    q_k,
)
from .counting import (
    catalan,
    count_by_internal,
    count_by_leaves,
    count_by_root,
    count_full,
    count_kr,
    count_mk,
    motzkin,
    psi,
)
from .enumeration import (
    ExactDistribution,
    enumerate_trees,
    exact_distribution,
    exact_moments,
    exact_partition,
    iter_parens,
)
from .properties import (
    NAMED_TOLLS,
    AdditiveProperty,
    PolynomialToll,
    eval_additive,
    eval_polynomial_toll,
    internal_root_distance,
    leaf_root_distance,
    parse_toll,
    path_length,
    wiener_index,
)
from .sampler import (
    SampleBatch,
    SamplerContext,
    make_context,
    sample_batch,
    sample_batch_parallel,
    sample_bounded_root,
    sample_tree,
)
from .series import (
    SeriesTables,
    build_tables,
    gn_explicit,
    log_partition,
    log_partition_asymptotic,
    partition_asymptotic,
    partition_exact,
    partition_ratio_to_asymptotic,
    rho,
    rho_from_weights,
)
from .stats import (
    MomentEstimate,
    RatioReport,
    bounded_root_experiment,
    chi_square_test,
    estimate_moment,
    ratio_experiment,
    scaling_experiment,
    total_variation,
)
from .trees import Convention, PlaneTree, TreeStats, join, subtree_records, unjoin
from .weights import ThermoParams, WeightTriple, coerce_weights

__version__ = "0.1.0"

__all__ = [
    "AdditiveProperty",
    "Convention",
    "ExactDistribution",
    "HypothesisViolated",
    "LimitPrediction",
    "MomentEstimate",
    "NAMED_TOLLS",
    "PlaneTree",
    "PolynomialToll",
    "RatioReport",
    "SampleBatch",
    "SamplerContext",
    "SeriesTables",
    "ThermoParams",
    "TollAnalysis",
    "TreeStats",
    "WeightTriple",
    "analyze_toll",
    "bounded_root_experiment",
    "build_tables",
    "catalan",
    "chi_square_test",
    "coerce_weights",
    "count_by_internal",
    "count_by_leaves",
    "count_by_root",
    "count_full",
    "count_kr",
    "count_mk",
    "enumerate_trees",
    "estimate_moment",
    "eval_additive",
    "eval_polynomial_toll",
    "exact_distribution",
    "exact_moments",
    "exact_partition",
    "gn_explicit",
    "internal_root_distance",
    "iter_parens",
    "join",
    "leaf_root_distance",
    "log_partition",
    "log_partition_asymptotic",
    "make_context",
    "motzkin",
    "parse_toll",
    "partition_asymptotic",
    "partition_exact",
    "partition_ratio_to_asymptotic",
    "path_length",
    "predict_limit",
    "predict_mean_ratio",
    "psi",
    "q_constant",
    "q_k",
    "ratio_experiment",
    "rho",
    "rho_from_weights",
    "sample_batch",
    "sample_batch_parallel",
    "sample_bounded_root",
    "sample_tree",
    "scaling_experiment",
    "subtree_records",
    "total_variation",
    "unjoin",
    "wiener_index",
]
