"""Small input-validation helpers used by the estimators and operations."""
from __future__ import annotations

import numpy as np

from .exceptions import DataError


def check_scale(scale) -> tuple[float, float]:
    """Validate a (v_min, v_max) vote scale and return it as floats."""
    try:
        v_min, v_max = (float(scale[0]), float(scale[1]))
    except (TypeError, ValueError, IndexError):
        raise DataError(f"scale must be a (v_min, v_max) pair, got {scale!r}")
    if not np.isfinite(v_min) or not np.isfinite(v_max):
        raise DataError(f"scale bounds must be finite, got {(v_min, v_max)}")
    if v_min >= v_max:
        raise DataError(f"scale must satisfy v_min < v_max, got {(v_min, v_max)}")
    return v_min, v_max


def check_fraction(value: float, name: str, *, allow_zero: bool = False) -> float:
    value = float(value)
    low_ok = value >= 0.0 if allow_zero else value > 0.0
    if not (low_ok and value <= 1.0):
        bound = "[0, 1]" if allow_zero else "(0, 1]"
        raise DataError(f"{name} must be in {bound}, got {value}")
    return value


def as_pair_array(X) -> np.ndarray:
    """Coerce X to an (n, 2) integer array of (user, item) pairs."""
    pairs = np.asarray(X)
    if pairs.ndim == 1 and pairs.shape == (2,):
        pairs = pairs[None, :]
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise DataError(f"expected (n, 2) array of (user, item) pairs, got shape {pairs.shape}")
    if not np.issubdtype(pairs.dtype, np.integer):
        rounded = np.rint(pairs)
        if not np.all(rounded == pairs):
            raise DataError("user/item indices must be integers")
        pairs = rounded.astype(np.int64)
    return pairs


def check_fitted(estimator, attribute: str = "matrix_") -> None:
    if not hasattr(estimator, attribute):
        raise RuntimeError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )


def ensure_rng(seed) -> np.random.Generator:
    """Accept an int seed or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
