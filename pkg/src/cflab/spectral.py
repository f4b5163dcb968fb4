"""Spectral recommender: eigen-embedding of the user graph.

Pipeline: impute empty cells with item means, build a user-user overlap
graph that decays with Euclidean distance between vote vectors, take the
smallest eigenpairs of its normalized Laplacian, embed each user by the
non-trivial eigenvector components, and use cosine similarity between
embeddings as the weights of the shared prediction engine. The imputed
votes are used only for building the graph; predictions always draw on
actually expressed votes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Recommender
from .correlation import SimilarityMatrix
from .exceptions import ConvergenceError, DataError
from .metrics import mae
from .prediction import Prediction, weighted_prediction, weighted_predictions
from .ratings import RatingMatrix
from .validation import check_fitted, check_fraction, ensure_rng

# Eigenvalues closer than this are treated as one degenerate group.
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class LaplacianSpectrum:
    """The k smallest Laplacian eigenpairs, ascending, orthonormal.

    ``degenerate`` is True when any two retained eigenvalues coincide
    within tolerance; embeddings are non-unique there and reports flag it.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # one column per eigenvalue
    degenerate: bool

    @property
    def k(self) -> int:
        return len(self.eigenvalues)


def fill_empty(matrix: RatingMatrix) -> np.ndarray:
    """Dense vote matrix with empty cells imputed by item means.

    Items nobody rated fall back to the global mean, and to the scale
    midpoint when the matrix is empty.
    """
    values, mask = matrix.to_dense()
    item_means = matrix.item_means()
    g = matrix.global_mean()
    default = matrix.midpoint() if g is None else g
    column_fill = np.where(np.isnan(item_means), default, item_means)
    return np.where(mask, values, column_fill[None, :])


def overlap_matrix(dense_votes: np.ndarray, kernel: str = "quadratic",
                   width: float | None = None) -> np.ndarray:
    """User-user overlap weights decreasing with vote-vector distance.

    The default kernel is 1 - (d / d_max)^2, the quadratic expansion of a
    Gaussian whose width equals the largest pairwise distance; the full
    Gaussian exp(-d^2 / width^2) is available behind ``kernel="gaussian"``.
    All weights are 1 when every user is identical.
    """
    votes = np.asarray(dense_votes, dtype=np.float64)
    if votes.ndim != 2 or votes.shape[0] < 2:
        raise DataError("overlap matrix needs a dense (n_users >= 2) x n_items array")
    sq_norms = (votes ** 2).sum(axis=1)
    d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (votes @ votes.T)
    d2 = np.maximum(d2, 0.0)
    d2 = (d2 + d2.T) / 2
    np.fill_diagonal(d2, 0.0)
    d2_max = d2.max()
    if kernel == "quadratic":
        if width is not None:
            raise DataError("width only applies to the gaussian kernel")
        omega = np.ones_like(d2) if d2_max == 0.0 else 1.0 - d2 / d2_max
    elif kernel == "gaussian":
        w2 = d2_max if width is None else float(width) ** 2
        if w2 <= 0.0:
            omega = np.ones_like(d2)
        else:
            omega = np.exp(-d2 / w2)
    else:
        raise DataError(f"kernel must be 'quadratic' or 'gaussian', got {kernel!r}")
    omega = (omega + omega.T) / 2
    np.fill_diagonal(omega, 1.0)
    return omega


def normalized_laplacian(omega: np.ndarray) -> np.ndarray:
    """L = D^(-1/2) (D - W) D^(-1/2) with D the diagonal of row sums."""
    w = np.asarray(omega, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DataError(f"weight matrix must be square, got shape {w.shape}")
    d = w.sum(axis=1)
    if np.any(d <= 0):
        raise DataError("normalized Laplacian requires positive row sums")
    inv_sqrt = 1.0 / np.sqrt(d)
    lap = -w * inv_sqrt[:, None] * inv_sqrt[None, :]
    np.fill_diagonal(lap, lap.diagonal() + 1.0)
    return (lap + lap.T) / 2


def _degenerate_groups(eigenvalues: np.ndarray) -> list[list[int]]:
    groups: list[list[int]] = [[0]]
    for idx in range(1, len(eigenvalues)):
        if eigenvalues[idx] - eigenvalues[idx - 1] <= DEGENERACY_TOL:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry positive (reproducibility)."""
    fixed = vectors.copy()
    for col in range(fixed.shape[1]):
        v = fixed[:, col]
        lead = v[np.argmax(np.abs(v))]
        if lead < 0:
            fixed[:, col] = -v
    return fixed


def smallest_eigenpairs(laplacian: np.ndarray, k: int, tol: float = 1e-10,
                        null_direction: np.ndarray | None = None) -> LaplacianSpectrum:
    """The k eigenpairs of smallest eigenvalue of a symmetric matrix.

    Eigenvectors come back orthonormal with a deterministic sign
    convention; within a degenerate eigenvalue group they are ordered
    lexicographically, so reruns on identical input are bit-identical.
    When the smallest eigenvalue is degenerate (a disconnected graph) and
    ``null_direction`` is given, the group's basis is rotated so its first
    vector is the known null direction; the remaining vectors then carry
    the cluster structure instead of mixing it with the trivial one.

    Residuals ||L y - lambda y|| are checked against ``tol * ||L||``; a
    violation (or a LAPACK failure) raises ConvergenceError.
    """
    lap = np.asarray(laplacian, dtype=np.float64)
    n = lap.shape[0]
    if not 1 <= k <= n:
        raise DataError(f"k must be in [1, {n}], got {k}")
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc

    values = eigenvalues[:k].copy()
    vectors = eigenvectors[:, :k].copy()
    groups = _degenerate_groups(values)

    if (null_direction is not None and len(groups[0]) > 1):
        cols = groups[0]
        q0 = np.asarray(null_direction, dtype=np.float64)
        q0 = q0 / np.linalg.norm(q0)
        span = vectors[:, cols]
        projected = span @ (span.T @ q0)
        norm = np.linalg.norm(projected)
        if norm > 1e-8:
            basis, _ = np.linalg.qr(
                np.column_stack([projected / norm, span]))
            vectors[:, cols] = basis[:, :len(cols)]

    vectors = _fix_signs(vectors)
    for group in groups:
        if len(group) < 2:
            continue
        start = 1 if (group is groups[0] and null_direction is not None) else 0
        tail = group[start:]
        if len(tail) < 2:
            continue
        order = sorted(tail, key=lambda c: tuple(vectors[:, c]))
        vectors[:, tail] = vectors[:, order]
        values[tail] = values[order]

    scale = max(np.max(np.abs(eigenvalues)), 1e-300)
    residuals = np.linalg.norm(lap @ vectors - vectors * values[None, :], axis=0)
    if np.any(residuals > tol * scale):
        raise ConvergenceError(
            "eigenpair residuals exceed tolerance",
            residuals=residuals, bound=tol * scale)

    degenerate = any(len(g) > 1 for g in groups)
    if k < n and eigenvalues[k] - values[-1] <= DEGENERACY_TOL:
        degenerate = True
    return LaplacianSpectrum(values, vectors, degenerate)


def embedding_coords(spectrum: LaplacianSpectrum, k: int) -> np.ndarray:
    """Per-user coordinates in the k-1 non-trivial eigenvector components."""
    if k < 2:
        raise DataError(f"embedding needs k >= 2, got {k}")
    if spectrum.k < k:
        raise DataError(f"spectrum holds {spectrum.k} eigenvectors, k={k} requested")
    return spectrum.eigenvectors[:, 1:k]


def embed_and_similarity(spectrum: LaplacianSpectrum, k: int) -> SimilarityMatrix:
    """Cosine similarities between user embeddings (diagonal zeroed).

    Users whose embedding is the zero vector get an all-zero similarity row.
    """
    coords = embedding_coords(spectrum, k)
    norms = np.linalg.norm(coords, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = coords / safe[:, None]
    unit[norms == 0] = 0.0
    weights = unit @ unit.T
    weights = (weights + weights.T) / 2
    weights = np.clip(weights, -1.0, 1.0)
    np.fill_diagonal(weights, 0.0)
    return SimilarityMatrix(weights, "spectral_cosine")


def build_spectral_similarity(matrix: RatingMatrix, k: int,
                              kernel: str = "quadratic",
                              width: float | None = None,
                              center_users: bool = False,
                              tol: float = 1e-10) -> tuple[SimilarityMatrix, LaplacianSpectrum]:
    """Run the whole pipeline from a sparse matrix to cosine similarities."""
    dense = fill_empty(matrix)
    if center_users:
        user_means = matrix.user_means()
        dense = dense - np.where(np.isnan(user_means), 0.0, user_means)[:, None]
    omega = overlap_matrix(dense, kernel=kernel, width=width)
    lap = normalized_laplacian(omega)
    null_direction = np.sqrt(omega.sum(axis=1))
    spectrum = smallest_eigenpairs(lap, k, tol=tol, null_direction=null_direction)
    return embed_and_similarity(spectrum, k), spectrum


def predict_spectral(matrix: RatingMatrix, similarity: SimilarityMatrix,
                     user: int, item: int) -> float:
    """Weighted-sum prediction with spectral cosine weights (clamped, total)."""
    return weighted_prediction(matrix, similarity.weights, user, item).value


def select_k(matrix: RatingMatrix, candidates, holdout_fraction: float = 0.1,
             seed: int = 0, kernel: str = "quadratic", width: float | None = None,
             center_users: bool = False) -> int:
    """Pick the embedding dimension by cross-checking on held-out votes.

    Holds out a fraction of the known votes, runs the full pipeline for
    each candidate k on the rest, and returns the candidate with the
    lowest held-out MAE; ties go to the smaller k.
    """
    candidates = sorted({int(c) for c in candidates})
    if not candidates:
        raise DataError("select_k needs at least one candidate")
    bad = [c for c in candidates if not 2 <= c <= matrix.n_users]
    if bad:
        raise DataError(f"candidates {bad} outside [2, {matrix.n_users}]")
    check_fraction(holdout_fraction, "holdout_fraction")
    votes = list(matrix.iter_votes())
    n_hold = int(round(holdout_fraction * len(votes)))
    if n_hold < 1 or len(votes) - n_hold < 1:
        raise DataError(
            f"cannot hold out {n_hold} of {len(votes)} votes for cross checking")
    rng = ensure_rng(seed)
    perm = rng.permutation(len(votes))
    held = [votes[idx] for idx in perm[:n_hold]]
    kept = [votes[idx] for idx in perm[n_hold:]]
    reduced = RatingMatrix(matrix.n_users, matrix.n_items, matrix.scale)
    for user, item, vote in kept:
        reduced.add(user, item, vote)
    held_pairs = np.array([(u, i) for u, i, _ in held], dtype=np.int64)
    held_votes = np.array([v for _, _, v in held])

    best_k = None
    best_mae = np.inf
    for k in candidates:
        similarity, _ = build_spectral_similarity(
            reduced, k, kernel=kernel, width=width, center_users=center_users)
        predicted, _ = weighted_predictions(reduced, similarity.weights, held_pairs)
        score = mae(np.column_stack([predicted, held_votes]), matrix.vote_range)
        if score < best_mae:
            best_mae = score
            best_k = k
    return best_k


def cluster_diagnostic(spectrum: LaplacianSpectrum) -> tuple[np.ndarray, np.ndarray]:
    """Report data for the cluster plots.

    Returns the per-user components of the first non-trivial eigenvector
    and the (y1, y2) projection points; a jump in the former or separate
    islands in the latter indicate user clusters.
    """
    if spectrum.k < 3:
        raise DataError("cluster diagnostic needs at least 3 eigenvectors")
    y1 = spectrum.eigenvectors[:, 1].copy()
    projection = spectrum.eigenvectors[:, 1:3].copy()
    return y1, projection


class SpectralRecommender(Recommender):
    """Recommender driven by the Laplacian eigen-embedding.

    Parameters
    ----------
    k : int or "auto"
        Number of eigenvectors (embedding dimension is k - 1). "auto"
        cross-checks the candidates on held-out training votes.
    k_candidates : sequence of int, optional
        Candidates for the "auto" search (default 2..20-ish).
    holdout_fraction : float
        Fraction of training votes held out by the "auto" search.
    kernel : {"quadratic", "gaussian"}
        Overlap kernel; quadratic is the Gaussian's expansion at width
        equal to the maximum pairwise distance.
    width : float, optional
        Gaussian kernel width (defaults to the maximum distance).
    center_users : bool
        Subtract each user's mean expressed vote from their dense row
        before distances are computed (experimental, off by default).
    select_seed : int
        Seed for the "auto" holdout choice.
    """

    DEFAULT_CANDIDATES = (2, 4, 6, 8, 10, 12, 16, 20)

    def __init__(self, k=8, k_candidates=None, holdout_fraction: float = 0.1,
                 kernel: str = "quadratic", width: float | None = None,
                 center_users: bool = False, eig_tol: float = 1e-10,
                 select_seed: int = 0):
        self.k = k
        self.k_candidates = k_candidates
        self.holdout_fraction = holdout_fraction
        self.kernel = kernel
        self.width = width
        self.center_users = center_users
        self.eig_tol = eig_tol
        self.select_seed = select_seed

    def fit(self, X: RatingMatrix, y=None) -> "SpectralRecommender":
        if self.k == "auto":
            candidates = self.k_candidates or [
                c for c in self.DEFAULT_CANDIDATES if c <= X.n_users]
            k = select_k(X, candidates, holdout_fraction=self.holdout_fraction,
                         seed=self.select_seed, kernel=self.kernel,
                         width=self.width, center_users=self.center_users)
        else:
            k = int(self.k)
        self.matrix_ = X
        self.k_ = k
        self.similarity_, self.spectrum_ = build_spectral_similarity(
            X, k, kernel=self.kernel, width=self.width,
            center_users=self.center_users, tol=self.eig_tol)
        return self

    def predict_pair(self, user: int, item: int) -> Prediction:
        check_fitted(self)
        return weighted_prediction(self.matrix_, self.similarity_.weights, user, item)

    def predict_pairs(self, X) -> tuple[np.ndarray, np.ndarray]:
        check_fitted(self)
        return weighted_predictions(self.matrix_, self.similarity_.weights, X)
