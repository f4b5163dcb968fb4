import numpy as np
import pytest

from cflab import RatingMatrix


def random_rating_matrix(rng, n_users, n_items, fill=0.7, scale=(1.0, 5.0),
                         integer_votes=False):
    """A random sparse matrix for oracle comparisons."""
    matrix = RatingMatrix(n_users, n_items, scale)
    triples = []
    for user in range(n_users):
        for item in range(n_items):
            if rng.random() < fill:
                if integer_votes:
                    vote = float(rng.integers(int(scale[0]), int(scale[1]) + 1))
                else:
                    vote = float(rng.uniform(*scale))
                matrix.add(user, item, vote)
                triples.append((user, item, vote))
    return matrix, triples


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
