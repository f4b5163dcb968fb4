"""Non-personalized and weakly personalized reference predictors.

These are the yardsticks the personalized methods are judged against:
the item's average received vote, the user's average expressed vote, and
a fixed blend of the plain correlation prediction with the item average.
"""
from __future__ import annotations

import numpy as np

from .base import Recommender
from .correlation import SimilarityMatrix, pearson_matrix
from .exceptions import DataError
from .prediction import (
    Prediction,
    item_mean_with_fallback,
    user_mean_with_fallback,
    weighted_prediction,
    weighted_predictions,
)
from .ratings import RatingMatrix
from .validation import as_pair_array, check_fitted


def predict_item_mean(matrix: RatingMatrix, user: int, item: int) -> float:
    """Average vote received by the item; same value for every user."""
    return item_mean_with_fallback(matrix, item).value


def predict_user_mean(matrix: RatingMatrix, user: int, item: int) -> float:
    """Average vote the user has expressed on any item."""
    return user_mean_with_fallback(matrix, user).value


def predict_blend(matrix: RatingMatrix, similarity: SimilarityMatrix,
                  user: int, item: int, q: float) -> float:
    """q times the plain correlation prediction plus (1 - q) times the item mean."""
    if not 0.0 <= q <= 1.0:
        raise DataError(f"blend weight q must be in [0, 1], got {q}")
    corr = weighted_prediction(matrix, similarity.weights, user, item)
    item_part = item_mean_with_fallback(matrix, item)
    v_min, v_max = matrix.scale
    return float(np.clip(q * corr.value + (1.0 - q) * item_part.value, v_min, v_max))


class ItemMeanRecommender(Recommender):
    """Predicts every user the item's average received vote."""

    def fit(self, X: RatingMatrix, y=None) -> "ItemMeanRecommender":
        self.matrix_ = X
        return self

    def predict_pair(self, user: int, item: int) -> Prediction:
        check_fitted(self)
        return item_mean_with_fallback(self.matrix_, item)

    def predict_pairs(self, X) -> tuple[np.ndarray, np.ndarray]:
        check_fitted(self)
        pairs = as_pair_array(X)
        matrix = self.matrix_
        means = matrix.item_means()
        g = matrix.global_mean()
        chain = matrix.midpoint() if g is None else g
        raw = means[pairs[:, 1]]
        fallback = np.isnan(raw)
        return np.where(fallback, chain, raw), fallback


class UserMeanRecommender(Recommender):
    """Predicts the user's average expressed vote for every item."""

    def fit(self, X: RatingMatrix, y=None) -> "UserMeanRecommender":
        self.matrix_ = X
        return self

    def predict_pair(self, user: int, item: int) -> Prediction:
        check_fitted(self)
        return user_mean_with_fallback(self.matrix_, user)

    def predict_pairs(self, X) -> tuple[np.ndarray, np.ndarray]:
        check_fitted(self)
        pairs = as_pair_array(X)
        matrix = self.matrix_
        means = matrix.user_means()
        g = matrix.global_mean()
        chain = matrix.midpoint() if g is None else g
        raw = means[pairs[:, 0]]
        fallback = np.isnan(raw)
        return np.where(fallback, chain, raw), fallback


class BlendRecommender(Recommender):
    """Fixed-weight blend of the plain correlation prediction and the item mean.

    Parameters
    ----------
    q : float in [0, 1]
        Weight of the correlation prediction; 1 - q goes to the item mean.
    n_c : int
        Minimum number of commonly rated items for a correlation to count.
    """

    def __init__(self, q: float = 0.5, n_c: int = 3):
        self.q = q
        self.n_c = n_c

    def fit(self, X: RatingMatrix, y=None) -> "BlendRecommender":
        if not 0.0 <= self.q <= 1.0:
            raise DataError(f"blend weight q must be in [0, 1], got {self.q}")
        self.matrix_ = X
        self.similarity_ = SimilarityMatrix(pearson_matrix(X, n_c=self.n_c), "raw_pearson")
        return self

    def predict_pair(self, user: int, item: int) -> Prediction:
        check_fitted(self)
        matrix = self.matrix_
        corr = weighted_prediction(matrix, self.similarity_.weights, user, item)
        item_part = item_mean_with_fallback(matrix, item)
        v_min, v_max = matrix.scale
        value = float(np.clip(self.q * corr.value + (1.0 - self.q) * item_part.value,
                              v_min, v_max))
        return Prediction(value, corr.fallback or item_part.fallback)

    def predict_pairs(self, X) -> tuple[np.ndarray, np.ndarray]:
        check_fitted(self)
        pairs = as_pair_array(X)
        matrix = self.matrix_
        corr_vals, corr_fb = weighted_predictions(matrix, self.similarity_.weights, pairs)
        item_vals = np.empty(len(pairs))
        item_fb = np.zeros(len(pairs), dtype=bool)
        for row, item in enumerate(pairs[:, 1]):
            p = item_mean_with_fallback(matrix, int(item))
            item_vals[row] = p.value
            item_fb[row] = p.fallback
        v_min, v_max = matrix.scale
        values = np.clip(self.q * corr_vals + (1.0 - self.q) * item_vals, v_min, v_max)
        return values, corr_fb | item_fb
