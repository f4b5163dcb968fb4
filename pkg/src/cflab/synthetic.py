"""Synthetic correlated votes with a prescribed correlation distribution.

A valid (positive semi-definite, unit diagonal) user-user correlation
matrix whose off-diagonal entries have chosen mean and standard deviation
is built by alternating two steps: project onto the PSD cone by clipping
negative eigenvalues and rescaling rows back to unit diagonal, then
restore the target moments by an affine adjustment of the off-diagonal.
Votes are drawn as a multivariate Gaussian with that correlation matrix,
optionally shifted apart into two user groups to make the pooled vote
distribution bimodal.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .correlation import pearson_matrix
from .exceptions import ConvergenceError, DataError, UndefinedStatisticError
from .ratings import RatingMatrix
from .validation import ensure_rng


@dataclass(frozen=True)
class CorrelationTarget:
    """Requested off-diagonal moments for the generated correlation matrix.

    Feasibility is not guaranteed for every (mean, std) pair; infeasible
    targets surface as ConvergenceError from the generator.
    """

    n_users: int
    mean: float
    std: float
    dist: str = "uniform"
    tol_mean: float = 0.01
    tol_std: float = 0.02
    max_iter: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.n_users < 2:
            raise DataError(f"need at least 2 users, got {self.n_users}")
        if not -1.0 < self.mean < 1.0:
            raise DataError(f"target mean must be in (-1, 1), got {self.mean}")
        if self.std < 0:
            raise DataError(f"target std must be >= 0, got {self.std}")
        if self.dist not in ("uniform", "gaussian"):
            raise DataError(f"dist must be 'uniform' or 'gaussian', got {self.dist!r}")


@dataclass(frozen=True)
class SyntheticVotes:
    """Dense generated votes; group_assignment is set in bimodal mode."""

    votes: np.ndarray
    mode: str
    group_assignment: np.ndarray | None = None

    def to_triples(self) -> list[tuple[int, int, float]]:
        n_users, n_items = self.votes.shape
        return [(u, i, float(self.votes[u, i]))
                for u in range(n_users) for i in range(n_items)]

    def scale(self) -> tuple[float, float]:
        """Empirical vote range; the rating scale of the generated set."""
        return float(self.votes.min()), float(self.votes.max())


def _offdiag(matrix: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(matrix.shape[0], k=1)
    return matrix[iu]


def offdiag_moments(matrix: np.ndarray) -> tuple[float, float]:
    """Mean and standard deviation of the strict upper triangle."""
    values = _offdiag(matrix)
    return float(values.mean()), float(values.std())


def seed_symmetric(target: CorrelationTarget) -> np.ndarray:
    """Symmetric start matrix: i.i.d. off-diagonal draws, unit diagonal."""
    n = target.n_users
    rng = ensure_rng(target.seed)
    size = n * (n - 1) // 2
    if target.dist == "uniform":
        half_width = target.std * np.sqrt(3.0)
        draws = rng.uniform(target.mean - half_width, target.mean + half_width, size)
    else:
        draws = rng.normal(target.mean, target.std, size)
    matrix = np.zeros((n, n))
    matrix[np.triu_indices(n, k=1)] = draws
    matrix = matrix + matrix.T
    np.fill_diagonal(matrix, 1.0)
    return matrix


def psd_project(matrix: np.ndarray) -> np.ndarray:
    """Nearest-style PSD correlation matrix via eigenvalue clipping.

    Negative eigenvalues are clipped to zero and each row of the
    factor is rescaled so the result keeps a unit diagonal exactly.
    """
    sym = np.asarray(matrix, dtype=np.float64)
    if sym.ndim != 2 or sym.shape[0] != sym.shape[1]:
        raise DataError(f"expected a square matrix, got shape {sym.shape}")
    eigenvalues, eigenvectors = np.linalg.eigh(sym)
    clipped = np.clip(eigenvalues, 0.0, None)
    row_power = (eigenvectors ** 2) @ clipped
    if np.any(row_power <= 0):
        raise DataError(
            "degenerate row: a user projects to zero on every retained eigenvector")
    factor = eigenvectors * np.sqrt(clipped)[None, :] / np.sqrt(row_power)[:, None]
    projected = factor @ factor.T
    projected = (projected + projected.T) / 2
    np.fill_diagonal(projected, 1.0)
    return projected


def valid_correlation_matrix(target: CorrelationTarget) -> np.ndarray:
    """PSD unit-diagonal matrix whose off-diagonal moments hit the target.

    Alternates PSD projection with an affine moment restoration until both
    |mean - target| <= tol_mean and |std - target| <= tol_std hold for a
    PSD iterate, or raises ConvergenceError carrying the achieved values.
    """
    current = seed_symmetric(target)
    achieved_mean = achieved_std = float("nan")
    projected = None
    for _ in range(target.max_iter):
        projected = psd_project(current)
        achieved_mean, achieved_std = offdiag_moments(projected)
        if (abs(achieved_mean - target.mean) <= target.tol_mean
                and abs(achieved_std - target.std) <= target.tol_std):
            return projected
        values = _offdiag(projected)
        if achieved_std > 0 and target.std > 0:
            values = (values - achieved_mean) * (target.std / achieved_std) + target.mean
        else:
            values = np.full_like(values, target.mean)
        n = target.n_users
        current = np.zeros((n, n))
        current[np.triu_indices(n, k=1)] = values
        current = current + current.T
        np.fill_diagonal(current, 1.0)
    lam_min = float(np.linalg.eigvalsh(projected)[0])
    raise ConvergenceError(
        f"correlation target (mean={target.mean}, std={target.std}) not reached "
        f"in {target.max_iter} iterations: achieved mean={achieved_mean:.4g}, "
        f"std={achieved_std:.4g}",
        mean=achieved_mean, std=achieved_std, lambda_min=lam_min)


def _gaussian_factor(correlation: np.ndarray) -> np.ndarray:
    eigenvalues, eigenvectors = np.linalg.eigh(np.asarray(correlation, dtype=np.float64))
    if eigenvalues[0] < -1e-8:
        raise DataError(
            f"correlation matrix is not PSD (min eigenvalue {eigenvalues[0]:.3g})")
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))[None, :]


def sample_votes(correlation: np.ndarray, n_items: int, seed: int = 0) -> SyntheticVotes:
    """Zero-mean Gaussian votes whose user-user correlation is as given.

    Each item is an independent draw of the N-user Gaussian; every user's
    vote series has unit variance in expectation.
    """
    if n_items < 1:
        raise DataError(f"n_items must be >= 1, got {n_items}")
    factor = _gaussian_factor(correlation)
    rng = ensure_rng(seed)
    standard = rng.standard_normal((factor.shape[1], n_items))
    return SyntheticVotes(factor @ standard, "unimodal")


def sample_votes_bimodal(correlation: np.ndarray, n_items: int, delta: float,
                         seed: int = 0) -> SyntheticVotes:
    """Correlated Gaussian votes shifted +delta/-delta for two user halves.

    The pooled vote histogram becomes bimodal once delta is comfortably
    above the unit noise scale. delta=0 reduces to :func:`sample_votes`.
    """
    if delta < 0:
        raise DataError(f"group offset must be >= 0, got {delta}")
    base = sample_votes(correlation, n_items, seed=seed)
    n_users = base.votes.shape[0]
    groups = np.zeros(n_users, dtype=np.int64)
    groups[n_users // 2:] = 1
    shifts = np.where(groups == 0, delta, -delta)
    return SyntheticVotes(base.votes + shifts[:, None], "bimodal", groups)


@dataclass(frozen=True)
class CorrelationSummary:
    """Observed distribution of the computable pairwise correlations."""

    mean: float
    std: float
    histogram: np.ndarray
    bin_edges: np.ndarray
    n_pairs: int


def correlation_distribution(matrix: RatingMatrix, n_c: int = 3,
                             bins: int = 40) -> CorrelationSummary:
    """Moments and histogram of the pairwise correlations of a dataset.

    Only pairs whose overlap reaches ``n_c`` and whose votes admit a
    correlation at all are counted; zero-filled "unknown" pairs are not.
    The histogram has ``bins`` equal-width bins over [-1, 1].
    """
    if matrix.n_users < 2:
        raise DataError("correlation distribution needs at least 2 users")
    weights, valid = pearson_matrix(matrix, n_c=n_c, return_valid=True)
    iu = np.triu_indices(matrix.n_users, k=1)
    keep = valid[iu]
    if not keep.any():
        raise UndefinedStatisticError(
            f"no user pair has {n_c} or more common votes")
    values = weights[iu][keep]
    histogram, bin_edges = np.histogram(values, bins=bins, range=(-1.0, 1.0))
    return CorrelationSummary(float(values.mean()), float(values.std()),
                              histogram, bin_edges, int(keep.sum()))


def write_metadata(path, parameters: dict) -> None:
    """Sidecar key=value provenance file next to a generated dataset."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for key, value in parameters.items():
            handle.write(f"{key}={value}\n")
