"""Shared prediction engine.

Every method in the package predicts through the same weighted-sum rule:
the target user's mean vote plus a similarity-weighted average of the
raters' centered votes, with weights normalized by their absolute sum.
What differs between methods is only the similarity matrix plugged in.

All predictors are total functions: when the rule cannot be applied
(unrated item, user without history, all-zero weights) they fall through
a fixed chain -- item mean, then global mean, then scale midpoint -- and
report that a fallback was used.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ratings import RatingMatrix
from .validation import as_pair_array


@dataclass(frozen=True)
class Prediction:
    """A predicted vote plus whether the fallback chain produced it."""

    value: float
    fallback: bool


def item_mean_with_fallback(matrix: RatingMatrix, item: int) -> Prediction:
    """m(item) when rated, else global mean, else scale midpoint."""
    stats = matrix.item_stats(item)
    if stats.mean is not None:
        return Prediction(stats.mean, False)
    g = matrix.global_mean()
    if g is not None:
        return Prediction(g, True)
    return Prediction(matrix.midpoint(), True)


def user_mean_with_fallback(matrix: RatingMatrix, user: int) -> Prediction:
    """User's mean vote when present, else global mean, else midpoint."""
    stats = matrix.user_stats(user)
    if stats.mean is not None:
        return Prediction(stats.mean, False)
    g = matrix.global_mean()
    if g is not None:
        return Prediction(g, True)
    return Prediction(matrix.midpoint(), True)


def weighted_prediction(matrix: RatingMatrix, weights: np.ndarray,
                        user: int, item: int) -> Prediction:
    """Similarity-weighted prediction of one vote.

    The sum runs over the item's raters other than the target user; each
    weight is divided by the sum of absolute weights over those raters.
    The result is clamped to the vote scale. Falls back to the item-mean
    chain when the item has no raters, the target user has no votes, or
    every rater weight is zero.
    """
    raters = matrix.item_raters(item)
    if not raters:
        return item_mean_with_fallback(matrix, item)
    user_mean = matrix.user_stats(user).mean
    if user_mean is None:
        return Prediction(item_mean_with_fallback(matrix, item).value, True)
    num = 0.0
    den = 0.0
    for i, vote in raters.items():
        if i == user:
            continue
        w = weights[user, i]
        if w == 0.0:
            continue
        num += w * (vote - matrix.user_stats(i).mean)
        den += abs(w)
    if den == 0.0:
        return Prediction(item_mean_with_fallback(matrix, item).value, True)
    v_min, v_max = matrix.scale
    value = min(max(user_mean + num / den, v_min), v_max)
    return Prediction(value, False)


def weighted_predictions(matrix: RatingMatrix, weights: np.ndarray,
                         pairs) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`weighted_prediction` over (user, item) pairs.

    Groups the queries by item so each item's rater block is sliced once.
    Returns (values, fallback_flags) aligned with the input rows.
    """
    pairs = as_pair_array(pairs)
    n = len(pairs)
    values = np.empty(n)
    fallback = np.zeros(n, dtype=bool)
    if n == 0:
        return values, fallback

    user_means = matrix.user_means()
    v_min, v_max = matrix.scale

    order = np.argsort(pairs[:, 1], kind="stable")
    sorted_items = pairs[order, 1]
    boundaries = np.flatnonzero(np.diff(sorted_items)) + 1
    groups = np.split(order, boundaries)

    for group in groups:
        item = int(pairs[group[0], 1])
        users = pairs[group, 0]
        raters = matrix.item_raters(item)
        chain = item_mean_with_fallback(matrix, item)
        if not raters:
            values[group] = chain.value
            fallback[group] = True
            continue
        r_idx = np.fromiter(raters.keys(), dtype=np.int64, count=len(raters))
        r_votes = np.fromiter(raters.values(), dtype=np.float64, count=len(raters))
        centered = r_votes - user_means[r_idx]
        w_block = weights[np.ix_(users, r_idx)].copy()
        # exclude the target user's own vote when it happens to be present
        pos_of = {int(r): p for p, r in enumerate(r_idx)}
        for row, j in enumerate(users):
            p = pos_of.get(int(j))
            if p is not None:
                w_block[row, p] = 0.0
        den = np.abs(w_block).sum(axis=1)
        num = w_block @ centered
        base = user_means[users]
        ok = (den > 0) & ~np.isnan(base)
        out = np.full(len(group), chain.value)
        safe_den = np.where(den > 0, den, 1.0)
        out[ok] = np.clip(base[ok] + num[ok] / safe_den[ok], v_min, v_max)
        values[group] = out
        fallback[group] = ~ok
    return values, fallback
