"""Secant-avoidance projections for dimensionality reduction and dimension estimation."""

from .analysis import (
    BiLipschitzBounds,
    DimensionCurve,
    DimensionEstimate,
    bilipschitz_constants,
    compare_projections,
    estimate_dimension,
    naive_projection,
    repeated_sample_sweep,
    sweep,
)
from .estimators import SecantAvoidingProjection, SecantDimensionEstimator
from .exceptions import (
    DataFormatError,
    EmptySecantSetError,
    InvalidArgumentError,
    MemoryBudgetError,
    NumericalFailureError,
    RankDeficiencyError,
    SchemaVersionError,
    SecantProjError,
)
from .linalg import SvdFactors, modified_gram_schmidt, thin_svd
from .sap import (
    ProjectionBasis,
    SapConfig,
    SapResult,
    init_pca,
    min_projected_secant,
    project,
    run_sap,
    sap_step,
)
from .secants import SecantSet, compute_secants, secant_count, subsample
from .synth import DataSet

__version__ = "0.1.0"
