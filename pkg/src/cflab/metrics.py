"""Prediction accuracy metrics."""
from __future__ import annotations

import numpy as np

from .exceptions import DataError, UndefinedStatisticError


def mae(predictions, vote_range: float) -> float:
    """Mean absolute error normalized by the rating range.

    ``predictions`` is a sequence of (predicted, actual) pairs. The result
    lies in [0, 1] whenever both entries of every pair are on the scale.
    """
    if vote_range <= 0:
        raise DataError(f"vote range must be > 0, got {vote_range}")
    pairs = np.asarray(list(predictions) if not isinstance(predictions, np.ndarray)
                       else predictions, dtype=np.float64)
    if pairs.size == 0:
        raise UndefinedStatisticError("MAE is undefined on an empty prediction set")
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise DataError(f"expected (n, 2) (predicted, actual) pairs, got {pairs.shape}")
    return float(np.abs(pairs[:, 0] - pairs[:, 1]).sum() / (len(pairs) * vote_range))
