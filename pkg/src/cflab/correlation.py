"""Pearson-similarity recommender.

Pairwise user-user correlations over commonly rated items, with a
minimum-overlap cutoff, optional replacement of unknown (zero) entries by
the population-average correlation, and optional sign-preserving power
amplification. Predictions go through the shared weighted-sum engine.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Recommender
from .exceptions import DataError
from .prediction import Prediction, weighted_prediction, weighted_predictions
from .ratings import RatingMatrix
from .validation import check_fitted

PROVENANCES = ("raw_pearson", "meanfield_filled", "amplified", "spectral_cosine")


@dataclass(frozen=True)
class SimilarityMatrix:
    """Dense symmetric user-user weights with a provenance tag.

    The diagonal is unused by every consumer (the weighted-sum engine never
    lets a user vote for themselves) and is kept at 0. Treat ``weights`` as
    read-only.
    """

    weights: np.ndarray
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise DataError(f"unknown provenance {self.provenance!r}")
        w = self.weights
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DataError(f"similarity weights must be square, got shape {w.shape}")

    @property
    def n_users(self) -> int:
        return self.weights.shape[0]


def _centered_dense(matrix: RatingMatrix):
    values, mask = matrix.to_dense()
    b = mask.astype(np.float64)
    counts = b.sum(axis=1)
    sums = (values * b).sum(axis=1)
    means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    centered = (values - means[:, None]) * b
    return centered, b


def pearson(matrix: RatingMatrix, i: int, j: int, n_c: int = 3,
            center: str = "global") -> float:
    """Correlation of two users' votes over their commonly rated items.

    With ``center="global"`` each user's mean is taken over all their
    expressed votes; ``center="overlap"`` restricts the means to the common
    items. Returns 0 (the "unknown" encoding) when the overlap is smaller
    than ``n_c`` or either user's centered votes on the overlap vanish.
    """
    if i == j:
        raise DataError("pearson similarity is defined for distinct users")
    votes_i = matrix.user_items(i)
    votes_j = matrix.user_items(j)
    common = [a for a in votes_i if a in votes_j]
    if len(common) < max(n_c, 1):
        return 0.0
    x = np.array([votes_i[a] for a in common])
    y = np.array([votes_j[a] for a in common])
    if center == "global":
        xc = x - matrix.user_stats(i).mean
        yc = y - matrix.user_stats(j).mean
    elif center == "overlap":
        xc = x - x.mean()
        yc = y - y.mean()
    else:
        raise DataError(f"center must be 'global' or 'overlap', got {center!r}")
    dx = float((xc * xc).sum())
    dy = float((yc * yc).sum())
    if dx <= 0.0 or dy <= 0.0:
        return 0.0
    c = float((xc * yc).sum()) / np.sqrt(dx * dy)
    return float(np.clip(c, -1.0, 1.0))


def pearson_matrix(matrix: RatingMatrix, n_c: int = 3, center: str = "global",
                   return_valid: bool = False):
    """All pairwise correlations at once via dense matrix products.

    Agrees with :func:`pearson` entrywise; pairs below the overlap cutoff
    or with degenerate overlap votes are 0. Diagonal is 0. With
    ``return_valid`` also returns the boolean mask of pairs whose
    correlation was actually computable (distinguishing a genuine 0 from
    the zero that encodes "unknown").
    """
    if matrix.n_users < 1:
        empty = np.zeros((0, 0))
        return (empty, empty.astype(bool)) if return_valid else empty
    values, mask = matrix.to_dense()
    b = mask.astype(np.float64)
    overlap = b @ b.T
    overlap = (overlap + overlap.T) / 2

    if center == "global":
        centered, _ = _centered_dense(matrix)
        num = centered @ centered.T
        num = (num + num.T) / 2
        sq = (centered ** 2) @ b.T  # (i, j): user i's centered energy on j's items
        denom_sq = sq * sq.T
        valid = (overlap >= max(n_c, 1)) & (sq > 0) & (sq.T > 0)
    elif center == "overlap":
        vm = values * b
        sxy = vm @ vm.T
        sxy = (sxy + sxy.T) / 2
        sx = vm @ b.T           # (i, j): sum of i's votes over the overlap with j
        sx2 = (vm ** 2) @ b.T
        di = overlap * sx2 - sx ** 2
        num = overlap * sxy - sx * sx.T
        num = (num + num.T) / 2
        denom_sq = di * di.T
        valid = (overlap >= max(n_c, 1)) & (di > 0) & (di.T > 0)
    else:
        raise DataError(f"center must be 'global' or 'overlap', got {center!r}")

    weights = np.zeros_like(num)
    np.divide(num, np.sqrt(denom_sq, out=np.ones_like(denom_sq), where=valid),
              out=weights, where=valid)
    weights = np.clip(weights, -1.0, 1.0)
    weights[~valid] = 0.0
    np.fill_diagonal(weights, 0.0)
    weights = (weights + weights.T) / 2
    if return_valid:
        off_valid = valid.copy()
        np.fill_diagonal(off_valid, False)
        return weights, off_valid
    return weights


def mean_field_fill(weights: np.ndarray) -> np.ndarray:
    """Replace unknown (exactly zero) off-diagonal entries by the average
    of the known ones; 0 stays when no entry is known. Diagonal untouched."""
    filled = weights.copy()
    n = filled.shape[0]
    off = ~np.eye(n, dtype=bool)
    known = off & (filled != 0.0)
    if known.any():
        fill_value = filled[known].mean()
        filled[off & (filled == 0.0)] = fill_value
    return filled


def case_amplify(weights: np.ndarray, gamma: float) -> np.ndarray:
    """Sign-preserving power |w|^gamma that punishes weak correlations."""
    if gamma == 1.0:
        return weights.copy()
    if gamma <= 0:
        raise DataError(f"amplification exponent must be > 0, got {gamma}")
    return np.sign(weights) * np.abs(weights) ** gamma


def build_similarity(matrix: RatingMatrix, n_c: int = 3, gamma: float = 1.0,
                     center: str = "global", mean_field: bool = True) -> SimilarityMatrix:
    """Full similarity construction: correlations, mean-field fill, amplification."""
    if matrix.n_users < 2:
        raise DataError("similarity construction needs at least 2 users")
    weights = pearson_matrix(matrix, n_c=n_c, center=center)
    provenance = "raw_pearson"
    if mean_field:
        weights = mean_field_fill(weights)
        provenance = "meanfield_filled"
    if gamma != 1.0:
        weights = case_amplify(weights, gamma)
        provenance = "amplified"
    np.fill_diagonal(weights, 0.0)
    return SimilarityMatrix(weights, provenance)


def predict_correlation(matrix: RatingMatrix, similarity: SimilarityMatrix,
                        user: int, item: int) -> float:
    """Weighted-sum prediction with correlation weights (clamped, total)."""
    return weighted_prediction(matrix, similarity.weights, user, item).value


class CorrelationRecommender(Recommender):
    """Pearson-correlation recommender.

    Parameters
    ----------
    n_c : int
        Minimum overlap for a correlation to be computed (default 3).
    gamma : float
        Case-amplification exponent; 1 disables it.
    mean_field : bool
        Replace unknown correlations with the population average.
    center : {"global", "overlap"}
        Whether user means are taken over all votes or per-pair overlaps.
    """

    def __init__(self, n_c: int = 3, gamma: float = 1.0, mean_field: bool = True,
                 center: str = "global"):
        self.n_c = n_c
        self.gamma = gamma
        self.mean_field = mean_field
        self.center = center

    def fit(self, X: RatingMatrix, y=None) -> "CorrelationRecommender":
        self.matrix_ = X
        self.similarity_ = build_similarity(
            X, n_c=self.n_c, gamma=self.gamma, center=self.center,
            mean_field=self.mean_field)
        return self

    def predict_pair(self, user: int, item: int) -> Prediction:
        check_fitted(self)
        return weighted_prediction(self.matrix_, self.similarity_.weights, user, item)

    def predict_pairs(self, X) -> tuple[np.ndarray, np.ndarray]:
        check_fitted(self)
        return weighted_predictions(self.matrix_, self.similarity_.weights, X)
