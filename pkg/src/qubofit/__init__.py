"""Multi-model geometric fitting by QUBO annealing.

Pipeline: sample model hypotheses for a point cloud, build the binary
preference matrix of inlier relationships, encode disjoint set cover as
a QUBO, and minimize it with simulated annealing, either directly or by
iterative column-pool decomposition for large pools.
"""

from .annealer import (
    AnnealConfig,
    SampleSet,
    optimal_solution_probability,
    sample_exhaustive,
    sample_sa,
)
from .datagen import HypothesisPoolSpec, SyntheticSpec, generate_star, sample_hypotheses
from .errors import (
    DegenerateSample,
    DimensionMismatch,
    EmptySelection,
    ExhaustedRedraws,
    IndexOutOfRange,
    InvalidSpec,
    LengthMismatch,
    StalledPruning,
    TooLarge,
)
from .evaluation import (
    EvalReport,
    Labeling,
    label_points,
    misclassification,
    single_model_error,
)
from .geometry import (
    CircleModel,
    LineModel,
    ModelHypothesis,
    Point2D,
    fit_minimal,
    residual,
)
from .preference import PreferenceMatrix, build_preference, restrict_columns
from .qubo import Qubo, Reduction, build_mmf_qubo, reduce_forced
from .solver import (
    DecompositionConfig,
    ModelSelection,
    SolveConfig,
    column_partition,
    dequmf,
    extract_single_model,
    qumf,
)

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig",
    "CircleModel",
    "DecompositionConfig",
    "DegenerateSample",
    "DimensionMismatch",
    "EmptySelection",
    "EvalReport",
    "ExhaustedRedraws",
    "HypothesisPoolSpec",
    "IndexOutOfRange",
    "InvalidSpec",
    "Labeling",
    "LengthMismatch",
    "LineModel",
    "ModelHypothesis",
    "ModelSelection",
    "Point2D",
    "PreferenceMatrix",
    "Qubo",
    "Reduction",
    "SampleSet",
    "SolveConfig",
    "StalledPruning",
    "SyntheticSpec",
    "TooLarge",
    "build_mmf_qubo",
    "build_preference",
    "column_partition",
    "dequmf",
    "extract_single_model",
    "fit_minimal",
    "generate_star",
    "label_points",
    "misclassification",
    "optimal_solution_probability",
    "qumf",
    "reduce_forced",
    "residual",
    "restrict_columns",
    "sample_exhaustive",
    "sample_hypotheses",
    "sample_sa",
    "single_model_error",
]
