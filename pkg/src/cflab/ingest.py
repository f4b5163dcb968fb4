"""Dataset parsing, reduction and train/test splitting.

Three input dialects are understood: the MovieLens ``ratings.dat`` format
(``UserID::MovieID::Rating::Timestamp``), the Jester per-user CSV rows
(``n_rated, r_1, ..., r_100`` with 99 marking an unrated cell), and the
package's canonical triple CSV (``user,item,vote[,timestamp]``).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DataError
from .ratings import RatingMatrix, sparsity
from .validation import check_fraction, ensure_rng

MOVIELENS_SCALE = (1.0, 5.0)
JESTER_SCALE = (-10.0, 10.0)
JESTER_UNRATED = 99.0
JESTER_ROW_WIDTH = 101


@dataclass(frozen=True)
class TimedTriple:
    """One expressed vote, optionally with the second it was cast."""

    user: int
    item: int
    vote: float
    timestamp: int | None = None


@dataclass(frozen=True)
class SplitPlan:
    """How to carve a dataset into a fixed test set and an ordered train feed.

    ``checkpoints`` are the target sparsity values at which the harness
    pauses filling and evaluates; empty means the default grid.
    """

    mode: str
    n_test: int
    seed: int = 0
    checkpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if self.mode not in ("temporal", "random"):
            raise DataError(f"split mode must be 'temporal' or 'random', got {self.mode!r}")
        if self.n_test < 1:
            raise DataError(f"n_test must be >= 1, got {self.n_test}")
        cps = tuple(float(c) for c in self.checkpoints)
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise DataError(f"checkpoints must be strictly increasing, got {cps}")
        if any(not 0 < c <= 1 for c in cps):
            raise DataError(f"checkpoints must lie in (0, 1], got {cps}")
        object.__setattr__(self, "checkpoints", cps)


def _check_timestamp_consistency(triples: Sequence[TimedTriple]) -> None:
    if not triples:
        return
    with_ts = sum(1 for t in triples if t.timestamp is not None)
    if with_ts not in (0, len(triples)):
        raise DataError(
            f"timestamps must be present on all triples or none; "
            f"found {with_ts} of {len(triples)}")


def parse_movielens(stream: Iterable[str]) -> list[TimedTriple]:
    """Parse ``UserID::MovieID::Rating::Timestamp`` lines.

    User and item ids are re-indexed densely from 0 in order of first
    appearance; ratings must be on the 1..5 scale.
    """
    triples: list[TimedTriple] = []
    user_index: dict[str, int] = {}
    item_index: dict[str, int] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split("::")
        if len(parts) != 4:
            raise DataError(f"line {lineno}: expected 4 '::'-separated fields, got {len(parts)}")
        try:
            rating = float(parts[2])
            timestamp = int(parts[3])
        except ValueError:
            raise DataError(f"line {lineno}: malformed rating or timestamp in {line!r}")
        if not MOVIELENS_SCALE[0] <= rating <= MOVIELENS_SCALE[1]:
            raise DataError(f"line {lineno}: rating {rating} outside scale 1..5")
        user = user_index.setdefault(parts[0], len(user_index))
        item = item_index.setdefault(parts[1], len(item_index))
        triples.append(TimedTriple(user, item, rating, timestamp))
    return triples


def parse_jester(stream: Iterable[str]) -> list[TimedTriple]:
    """Parse Jester per-user CSV rows; 99 encodes an unrated joke.

    Row order gives the user index; columns 1..100 give the joke index.
    No timestamps exist in this dataset.
    """
    triples: list[TimedTriple] = []
    for rowno, row in enumerate(csv.reader(stream)):
        if not row:
            continue
        if len(row) != JESTER_ROW_WIDTH:
            raise DataError(
                f"row {rowno + 1}: expected {JESTER_ROW_WIDTH} columns, got {len(row)}")
        for col, cell in enumerate(row[1:]):
            try:
                value = float(cell)
            except ValueError:
                raise DataError(f"row {rowno + 1}: malformed vote {cell!r}")
            if value == JESTER_UNRATED:
                continue
            if not JESTER_SCALE[0] <= value <= JESTER_SCALE[1]:
                raise DataError(
                    f"row {rowno + 1}: vote {value} outside scale -10..10 and not 99")
            triples.append(TimedTriple(rowno, col, value, None))
    return triples


def parse_triples(stream: Iterable[str]) -> list[TimedTriple]:
    """Parse the canonical ``user,item,vote[,timestamp]`` CSV.

    Indices are kept as given (they must be non-negative integers); a
    header line is detected by a non-numeric first field and skipped.
    """
    triples: list[TimedTriple] = []
    for lineno, row in enumerate(csv.reader(stream), start=1):
        if not row:
            continue
        if lineno == 1:
            try:
                float(row[0])
            except ValueError:
                continue  # header
        if len(row) not in (3, 4):
            raise DataError(f"line {lineno}: expected 3 or 4 fields, got {len(row)}")
        try:
            user = int(row[0])
            item = int(row[1])
            vote = float(row[2])
            timestamp = int(row[3]) if len(row) == 4 and row[3].strip() != "" else None
        except ValueError:
            raise DataError(f"line {lineno}: malformed triple {row!r}")
        if user < 0 or item < 0:
            raise DataError(f"line {lineno}: negative index in {row!r}")
        triples.append(TimedTriple(user, item, vote, timestamp))
    _check_timestamp_consistency(triples)
    return triples


def write_triples(triples: Iterable[TimedTriple], path) -> None:
    """Write triples in the canonical CSV dialect (12 significant digits)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write("user,item,vote,timestamp\n")
        for t in triples:
            ts = "" if t.timestamp is None else str(t.timestamp)
            handle.write(f"{t.user},{t.item},{t.vote:.12g},{ts}\n")


def detect_format(path, forced: str | None = None) -> str:
    """Guess the file dialect from its extension and first line."""
    if forced and forced != "auto":
        if forced not in ("movielens", "jester", "triples"):
            raise DataError(f"unknown format {forced!r}")
        return forced
    path = Path(path)
    if path.suffix == ".dat":
        return "movielens"
    try:
        with path.open("r", encoding="utf-8") as handle:
            first = handle.readline()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if "::" in first:
        return "movielens"
    n_fields = len(next(csv.reader([first]), []))
    if n_fields == JESTER_ROW_WIDTH:
        return "jester"
    if 2 <= n_fields <= 4:
        return "triples"
    raise DataError(f"cannot detect format of {path} ({n_fields} fields in first line)")


def load_file(path, fmt: str = "auto") -> tuple[list[TimedTriple], tuple[float, float]]:
    """Parse a dataset file, returning its triples and vote scale.

    The canonical CSV carries no scale declaration, so its scale is the
    empirical vote range.
    """
    fmt = detect_format(path, fmt)
    try:
        with Path(path).open("r", encoding="utf-8") as handle:
            if fmt == "movielens":
                return parse_movielens(handle), MOVIELENS_SCALE
            if fmt == "jester":
                return parse_jester(handle), JESTER_SCALE
            triples = parse_triples(handle)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not triples:
        raise DataError(f"no votes found in {path}")
    votes = [t.vote for t in triples]
    v_min, v_max = min(votes), max(votes)
    if v_min == v_max:
        raise DataError(f"degenerate vote range in {path}: all votes equal {v_min}")
    return triples, (v_min, v_max)


def _reindex(triples: Sequence[TimedTriple], kept_users, kept_items) -> list[TimedTriple]:
    user_map = {int(u): idx for idx, u in enumerate(sorted(kept_users))}
    item_map = {int(i): idx for idx, i in enumerate(sorted(kept_items))}
    return [TimedTriple(user_map[t.user], item_map[t.item], t.vote, t.timestamp)
            for t in triples
            if t.user in user_map and t.item in item_map]


def reduce_dataset(triples: Sequence[TimedTriple], user_fraction: float = 1.0,
                   item_fraction: float = 1.0, seed: int = 0,
                   n_users: int | None = None,
                   n_items: int | None = None) -> list[TimedTriple]:
    """Randomly drop users and items, keeping votes whose both ends survive.

    Users and items are sampled independently and uniformly, which
    approximately preserves sparsity, the votes-per-user distribution and
    the N/M ratio. Fractions toss a coin per index; ``n_users``/``n_items``
    instead sample exactly that many, for hitting a prescribed shape.
    Survivors are re-indexed densely in ascending original order.
    """
    if not triples:
        raise DataError("cannot reduce an empty dataset")
    check_fraction(user_fraction, "user_fraction")
    check_fraction(item_fraction, "item_fraction")
    total_users = 1 + max(t.user for t in triples)
    total_items = 1 + max(t.item for t in triples)
    rng = ensure_rng(seed)

    if n_users is not None:
        if not 1 <= n_users <= total_users:
            raise DataError(f"n_users must be in [1, {total_users}], got {n_users}")
        kept_users = rng.choice(total_users, size=n_users, replace=False)
    else:
        kept_users = np.flatnonzero(rng.random(total_users) < user_fraction)
    if n_items is not None:
        if not 1 <= n_items <= total_items:
            raise DataError(f"n_items must be in [1, {total_items}], got {n_items}")
        kept_items = rng.choice(total_items, size=n_items, replace=False)
    else:
        kept_items = np.flatnonzero(rng.random(total_items) < item_fraction)

    reduced = _reindex(triples, kept_users, kept_items)
    if not reduced:
        raise DataError(
            f"reduction left no votes (kept {len(kept_users)} users, {len(kept_items)} items)")
    return reduced


def split(triples: Sequence[TimedTriple],
          plan: SplitPlan) -> tuple[list[TimedTriple], list[TimedTriple]]:
    """Partition into an ordered training feed and a fixed test set.

    Temporal mode sorts by timestamp (stable, so input order breaks ties)
    and reserves the most recent ``n_test`` votes for testing; random mode
    draws the test set uniformly and shuffles the rest, both from one
    seeded permutation.
    """
    triples = list(triples)
    _check_timestamp_consistency(triples)
    if plan.n_test >= len(triples):
        raise DataError(
            f"n_test={plan.n_test} must be smaller than the dataset ({len(triples)} votes)")
    if plan.mode == "temporal":
        if not triples or triples[0].timestamp is None:
            raise DataError("temporal split requires timestamps on every triple")
        ordered = sorted(triples, key=lambda t: t.timestamp)
        return ordered[:-plan.n_test], ordered[-plan.n_test:]
    rng = ensure_rng(plan.seed)
    perm = rng.permutation(len(triples))
    test = [triples[idx] for idx in perm[:plan.n_test]]
    train = [triples[idx] for idx in perm[plan.n_test:]]
    return train, test


def fill_to_checkpoint(train: Sequence[TimedTriple], matrix: RatingMatrix,
                       eta_target: float, start: int = 0) -> int:
    """Append training votes in order until sparsity reaches ``eta_target``.

    Mutates ``matrix`` and returns the index of the first unconsumed
    triple, to be passed back as ``start`` for the next checkpoint.
    """
    current = sparsity(matrix)
    if eta_target < current - 1e-12:
        raise DataError(
            f"checkpoint {eta_target} below current sparsity {current}")
    cursor = start
    while sparsity(matrix) + 1e-12 < eta_target:
        if cursor >= len(train):
            raise DataError(
                f"training votes exhausted at sparsity {sparsity(matrix):.6g} "
                f"before target {eta_target:.6g}")
        t = train[cursor]
        matrix.add(t.user, t.item, t.vote)
        cursor += 1
    return cursor
