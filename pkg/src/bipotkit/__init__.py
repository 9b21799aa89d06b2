"""Computational toolkit for bipotentials.

A bipotential couples a state x with a conjugate variable y through a single
function b(x, y) that is convex in each argument, dominates the duality
pairing, and turns the subgradient relations between x and y into the
equality b(x, y) = <x, y>. This package decides when a sampled multivalued
law admits such a function, builds bipotentials from convex lagrangian
covers by an infimum recipe, verifies the axioms numerically, and ships the
classic Cauchy-inequality and plasticity examples end to end.
"""

from .bipotentials import (
    AnalyticFormUnavailableError,
    AxiomCounterexample,
    AxiomReport,
    BICCounterexample,
    BICProbePlan,
    BICReport,
    BInfinityBipotential,
    Bipotential,
    CauchyProduct,
    InfOfCoverBipotential,
    NoContactNote,
    SeparableBipotential,
    bic_check,
    build_b_infinity,
    build_inf,
    build_separable,
    default_probe_plan,
    embed_dual,
    embed_primal,
    graph_of_bipotential,
    verify_axioms,
)
from .convex import (
    ANALYTIC_TOL,
    SAMPLED_TOL,
    Affine,
    ConjugateDomainError,
    ConvexFunction,
    FenchelGapReport,
    IndicatorBall,
    IndicatorPoint,
    MaxAffine,
    Quadratic,
    Sampled,
    ScaledNorm,
    conjugate,
    discrete_conjugate_values,
    fenchel_gap,
    graph_of,
    subdifferential_contains,
)
from .covers import (
    CandidateNotFoundError,
    ClosedInterval,
    Cover,
    CoverageReport,
    FiniteSet,
    NormFamily,
    PreconditionError,
    QuadraticFamily,
    SeparableFamily,
    TabulatedFamily,
    coverage_check,
    norm_cover,
    p1_candidate,
    quadratic_cover,
    separable_cover,
    tabulated_cover,
)
from .formats import (
    FormatError,
    load_cover,
    load_law,
    save_cover,
    save_law,
)
from .laws import (
    Ball,
    BBReport,
    CycleReport,
    FailingSlice,
    HalfLineRay,
    LawGraph,
    NotBBGraphError,
    NotCyclicallyMonotoneError,
    Segment,
    Singleton,
    bb_check,
    cycle_sum,
    cyclic_monotonicity_check,
    rockafellar_reconstruct,
    weight_matrix,
)
from .numerics import (
    INF,
    DimensionMismatchError,
    MinusInfinityError,
    NegativeFenchelGapError,
    inner,
)

__version__ = "0.1.0"

__all__ = [
    "ANALYTIC_TOL",
    "Affine",
    "AnalyticFormUnavailableError",
    "AxiomCounterexample",
    "AxiomReport",
    "BBReport",
    "BICCounterexample",
    "BICProbePlan",
    "BICReport",
    "BInfinityBipotential",
    "Ball",
    "Bipotential",
    "CandidateNotFoundError",
    "CauchyProduct",
    "ClosedInterval",
    "ConjugateDomainError",
    "ConvexFunction",
    "Cover",
    "CoverageReport",
    "CycleReport",
    "DimensionMismatchError",
    "FailingSlice",
    "FenchelGapReport",
    "FiniteSet",
    "FormatError",
    "HalfLineRay",
    "INF",
    "IndicatorBall",
    "IndicatorPoint",
    "InfOfCoverBipotential",
    "LawGraph",
    "MaxAffine",
    "MinusInfinityError",
    "NegativeFenchelGapError",
    "NoContactNote",
    "NormFamily",
    "NotBBGraphError",
    "NotCyclicallyMonotoneError",
    "PreconditionError",
    "Quadratic",
    "QuadraticFamily",
    "SAMPLED_TOL",
    "Sampled",
    "ScaledNorm",
    "Segment",
    "SeparableBipotential",
    "SeparableFamily",
    "Singleton",
    "TabulatedFamily",
    "bb_check",
    "bic_check",
    "build_b_infinity",
    "build_inf",
    "build_separable",
    "conjugate",
    "coverage_check",
    "cycle_sum",
    "cyclic_monotonicity_check",
    "default_probe_plan",
    "discrete_conjugate_values",
    "embed_dual",
    "embed_primal",
    "fenchel_gap",
    "graph_of",
    "graph_of_bipotential",
    "inner",
    "load_cover",
    "load_law",
    "norm_cover",
    "p1_candidate",
    "quadratic_cover",
    "rockafellar_reconstruct",
    "save_cover",
    "save_law",
    "separable_cover",
    "subdifferential_contains",
    "tabulated_cover",
    "verify_axioms",
    "weight_matrix",
]
