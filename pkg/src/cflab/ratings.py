"""Sparse vote storage and the dataset statistics every predictor shares.

A :class:`RatingMatrix` holds votes for N users on M items. An absent
(user, item) pair *is* the empty state; no sentinel value is ever stored,
so scales that contain 0 (Jester's [-10, 10]) stay uncorrupted. Per-user
and per-item sums/counts are maintained incrementally as votes are added.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .exceptions import DataError, UndefinedStatisticError
from .validation import check_scale


@dataclass(frozen=True)
class UserStats:
    """Mean expressed vote of one user; mean is None when the user has no votes."""

    mean: float | None
    vote_count: int


@dataclass(frozen=True)
class ItemStats:
    """Mean received vote of one item; mean is None when the item has no votes."""

    mean: float | None
    vote_count: int


class RatingMatrix:
    """Users x items vote store with explicit empty cells.

    Immutable by convention once a sweep checkpoint is reached; the only
    mutating operation is :meth:`add`, used single-threaded while filling
    the training set between checkpoints.
    """

    def __init__(self, n_users: int, n_items: int, scale):
        if n_users < 0 or n_items < 0:
            raise DataError(f"matrix dimensions must be >= 0, got {(n_users, n_items)}")
        self.n_users = int(n_users)
        self.n_items = int(n_items)
        self.scale = check_scale(scale)
        self._by_user: list[dict[int, float]] = [dict() for _ in range(self.n_users)]
        self._by_item: list[dict[int, float]] = [dict() for _ in range(self.n_items)]
        self._user_sum = np.zeros(self.n_users)
        self._item_sum = np.zeros(self.n_items)
        self._total_sum = 0.0
        self._n_votes = 0

    # -- construction -----------------------------------------------------

    @classmethod
    def from_triples(cls, triples: Iterable, scale, n_users: int | None = None,
                     n_items: int | None = None) -> "RatingMatrix":
        """Build a matrix from (user, item, vote) triples.

        Dimensions are inferred from the largest index unless given. Extra
        trailing fields on a triple (timestamps) are ignored.
        """
        triples = list(triples)
        if n_users is None:
            n_users = 1 + max((int(t[0]) for t in triples), default=-1)
        if n_items is None:
            n_items = 1 + max((int(t[1]) for t in triples), default=-1)
        matrix = cls(n_users, n_items, scale)
        for t in triples:
            matrix.add(int(t[0]), int(t[1]), float(t[2]))
        return matrix

    def add(self, user: int, item: int, vote: float) -> None:
        """Insert one vote; rejects duplicates and out-of-scale values."""
        if not (0 <= user < self.n_users):
            raise DataError(f"user index {user} outside [0, {self.n_users})")
        if not (0 <= item < self.n_items):
            raise DataError(f"item index {item} outside [0, {self.n_items})")
        vote = float(vote)
        v_min, v_max = self.scale
        if not (v_min <= vote <= v_max):
            raise DataError(
                f"vote {vote} for pair ({user}, {item}) outside scale [{v_min}, {v_max}]"
            )
        if item in self._by_user[user]:
            raise DataError(f"duplicate vote for pair ({user}, {item})")
        self._by_user[user][item] = vote
        self._by_item[item][user] = vote
        self._user_sum[user] += vote
        self._item_sum[item] += vote
        self._total_sum += vote
        self._n_votes += 1

    def copy(self) -> "RatingMatrix":
        dup = RatingMatrix(self.n_users, self.n_items, self.scale)
        dup._by_user = [d.copy() for d in self._by_user]
        dup._by_item = [d.copy() for d in self._by_item]
        dup._user_sum = self._user_sum.copy()
        dup._item_sum = self._item_sum.copy()
        dup._total_sum = self._total_sum
        dup._n_votes = self._n_votes
        return dup

    # -- lookups ----------------------------------------------------------

    @property
    def n_votes(self) -> int:
        return self._n_votes

    @property
    def vote_range(self) -> float:
        """R = v_max - v_min."""
        return self.scale[1] - self.scale[0]

    def get(self, user: int, item: int) -> float | None:
        """The stored vote, or None for an empty cell."""
        return self._by_user[user].get(item)

    def user_items(self, user: int) -> dict[int, float]:
        """item -> vote mapping of one user (do not mutate)."""
        return self._by_user[user]

    def item_raters(self, item: int) -> dict[int, float]:
        """user -> vote mapping of one item (do not mutate)."""
        return self._by_item[item]

    def iter_votes(self) -> Iterator[tuple[int, int, float]]:
        for user, row in enumerate(self._by_user):
            for item, vote in row.items():
                yield user, item, vote

    # -- aggregates --------------------------------------------------------

    def user_stats(self, user: int) -> UserStats:
        count = len(self._by_user[user])
        mean = self._user_sum[user] / count if count else None
        return UserStats(mean=mean, vote_count=count)

    def item_stats(self, item: int) -> ItemStats:
        count = len(self._by_item[item])
        mean = self._item_sum[item] / count if count else None
        return ItemStats(mean=mean, vote_count=count)

    def user_counts(self) -> np.ndarray:
        return np.array([len(d) for d in self._by_user], dtype=np.int64)

    def item_counts(self) -> np.ndarray:
        return np.array([len(d) for d in self._by_item], dtype=np.int64)

    def user_means(self) -> np.ndarray:
        """Per-user mean votes; NaN where a user has no votes."""
        counts = self.user_counts()
        with np.errstate(invalid="ignore", divide="ignore"):
            means = np.where(counts > 0, self._user_sum / np.maximum(counts, 1), np.nan)
        return means

    def item_means(self) -> np.ndarray:
        """Per-item mean votes; NaN where an item has no votes."""
        counts = self.item_counts()
        with np.errstate(invalid="ignore", divide="ignore"):
            means = np.where(counts > 0, self._item_sum / np.maximum(counts, 1), np.nan)
        return means

    def global_mean(self) -> float | None:
        if self._n_votes == 0:
            return None
        return self._total_sum / self._n_votes

    def midpoint(self) -> float:
        return 0.5 * (self.scale[0] + self.scale[1])

    def to_dense(self) -> tuple[np.ndarray, np.ndarray]:
        """(values, mask) arrays; values hold 0.0 in empty cells."""
        values = np.zeros((self.n_users, self.n_items))
        mask = np.zeros((self.n_users, self.n_items), dtype=bool)
        for user, row in enumerate(self._by_user):
            if row:
                items = np.fromiter(row.keys(), dtype=np.int64, count=len(row))
                votes = np.fromiter(row.values(), dtype=np.float64, count=len(row))
                values[user, items] = votes
                mask[user, items] = True
        return values, mask


def build_matrix(triples, scale, n_users: int | None = None,
                 n_items: int | None = None) -> RatingMatrix:
    """Functional alias for :meth:`RatingMatrix.from_triples`."""
    return RatingMatrix.from_triples(triples, scale, n_users=n_users, n_items=n_items)


def sparsity(matrix: RatingMatrix) -> float:
    """Fraction of expressed votes, n / (N * M); 0.0 for an empty matrix."""
    if matrix.n_votes == 0:
        return 0.0
    return matrix.n_votes / (matrix.n_users * matrix.n_items)


def vote_entropy(matrix: RatingMatrix, bins: int = 5) -> float:
    """Normalized entropy of the vote histogram.

    Votes are binned into ``bins`` equal-width bins over the declared scale
    and the entropy is taken base ``bins``, so the result lies in [0, 1]:
    0 for all votes in one bin, 1 for a uniform spread.
    """
    if bins < 2:
        raise DataError(f"bins must be >= 2, got {bins}")
    if matrix.n_votes == 0:
        raise UndefinedStatisticError("vote entropy is undefined on an empty matrix")
    votes = np.fromiter((v for _, _, v in matrix.iter_votes()), dtype=np.float64,
                        count=matrix.n_votes)
    counts, _ = np.histogram(votes, bins=bins, range=matrix.scale)
    p = counts / matrix.n_votes
    nonzero = p[p > 0]
    return float(-(nonzero * (np.log(nonzero) / np.log(bins))).sum())
