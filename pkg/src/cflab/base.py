"""Estimator base class shared by all recommenders."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .prediction import Prediction
from .ratings import RatingMatrix
from .validation import as_pair_array, check_fitted


class Recommender(BaseEstimator):
    """Base recommender: fit on a :class:`RatingMatrix`, predict votes.

    Follows the scikit-learn estimator contract: hyperparameters are set in
    ``__init__`` and stored verbatim, ``fit`` binds the training matrix and
    derived state on trailing-underscore attributes and returns ``self``,
    and ``get_params`` / ``set_params`` / ``clone`` work out of the box.
    ``predict`` takes an (n, 2) array of (user, item) index pairs.
    """

    def fit(self, X: RatingMatrix, y=None) -> "Recommender":
        raise NotImplementedError

    def predict_pair(self, user: int, item: int) -> Prediction:
        """Predict one vote, reporting whether a fallback produced it."""
        raise NotImplementedError

    def predict_pairs(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Predict votes for (user, item) pairs; returns (votes, fallback_flags)."""
        check_fitted(self)
        pairs = as_pair_array(X)
        values = np.empty(len(pairs))
        fallback = np.zeros(len(pairs), dtype=bool)
        for row, (user, item) in enumerate(pairs):
            p = self.predict_pair(int(user), int(item))
            values[row] = p.value
            fallback[row] = p.fallback
        return values, fallback

    def predict(self, X) -> np.ndarray:
        """Predicted votes for an (n, 2) array of (user, item) pairs."""
        return self.predict_pairs(X)[0]
