"""cflab: a collaborative-filtering laboratory.

Correlation-based and spectral (Laplacian eigen-embedding) recommenders,
the simple-average baselines they are measured against, a synthetic
correlated-vote generator, and a sparsity-sweep evaluation harness.
"""

from .baselines import (
    BlendRecommender,
    ItemMeanRecommender,
    UserMeanRecommender,
    predict_blend,
    predict_item_mean,
    predict_user_mean,
)
from .base import Recommender
from .correlation import (
    CorrelationRecommender,
    SimilarityMatrix,
    build_similarity,
    case_amplify,
    mean_field_fill,
    pearson,
    pearson_matrix,
    predict_correlation,
)
from .exceptions import CflabError, ConvergenceError, DataError, UndefinedStatisticError
from .harness import (
    ExperimentPlan,
    FileSource,
    ReductionSpec,
    SweepReport,
    SweepRow,
    SyntheticSource,
    emit_report,
    load_plan,
    make_method,
    read_report,
    run_sweep,
)
from .ingest import (
    SplitPlan,
    TimedTriple,
    fill_to_checkpoint,
    load_file,
    parse_jester,
    parse_movielens,
    parse_triples,
    reduce_dataset,
    split,
    write_triples,
)
from .metrics import mae
from .prediction import Prediction
from .ratings import ItemStats, RatingMatrix, UserStats, build_matrix, sparsity, vote_entropy
from .spectral import (
    LaplacianSpectrum,
    SpectralRecommender,
    build_spectral_similarity,
    cluster_diagnostic,
    embed_and_similarity,
    embedding_coords,
    fill_empty,
    normalized_laplacian,
    overlap_matrix,
    predict_spectral,
    select_k,
    smallest_eigenpairs,
)
from .synthetic import (
    CorrelationSummary,
    CorrelationTarget,
    SyntheticVotes,
    correlation_distribution,
    offdiag_moments,
    psd_project,
    sample_votes,
    sample_votes_bimodal,
    seed_symmetric,
    valid_correlation_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BlendRecommender",
    "CflabError",
    "ConvergenceError",
    "CorrelationRecommender",
    "CorrelationSummary",
    "CorrelationTarget",
    "DataError",
    "ExperimentPlan",
    "FileSource",
    "ItemMeanRecommender",
    "ItemStats",
    "LaplacianSpectrum",
    "Prediction",
    "RatingMatrix",
    "Recommender",
    "ReductionSpec",
    "SimilarityMatrix",
    "SpectralRecommender",
    "SplitPlan",
    "SweepReport",
    "SweepRow",
    "SyntheticSource",
    "SyntheticVotes",
    "TimedTriple",
    "UndefinedStatisticError",
    "UserMeanRecommender",
    "UserStats",
    "build_matrix",
    "build_similarity",
    "build_spectral_similarity",
    "case_amplify",
    "cluster_diagnostic",
    "correlation_distribution",
    "embed_and_similarity",
    "embedding_coords",
    "emit_report",
    "fill_empty",
    "fill_to_checkpoint",
    "load_file",
    "load_plan",
    "mae",
    "make_method",
    "mean_field_fill",
    "normalized_laplacian",
    "offdiag_moments",
    "overlap_matrix",
    "parse_jester",
    "parse_movielens",
    "parse_triples",
    "pearson",
    "pearson_matrix",
    "predict_blend",
    "predict_correlation",
    "predict_item_mean",
    "predict_spectral",
    "predict_user_mean",
    "psd_project",
    "read_report",
    "reduce_dataset",
    "run_sweep",
    "sample_votes",
    "sample_votes_bimodal",
    "seed_symmetric",
    "select_k",
    "smallest_eigenpairs",
    "sparsity",
    "split",
    "valid_correlation_matrix",
    "vote_entropy",
    "write_triples",
]
