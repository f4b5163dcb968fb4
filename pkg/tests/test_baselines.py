import numpy as np
import pytest

from cflab import (
    BlendRecommender,
    DataError,
    ItemMeanRecommender,
    SimilarityMatrix,
    UserMeanRecommender,
    build_matrix,
    pearson_matrix,
    predict_blend,
    predict_correlation,
    predict_item_mean,
    predict_user_mean,
)
from conftest import random_rating_matrix


class TestItemMean:
    def test_plain_mean(self):
        matrix = build_matrix([(0, 0, 2), (1, 0, 4)], (1, 5))
        assert predict_item_mean(matrix, 0, 0) == 3.0

    def test_unrated_item_falls_back_to_global(self):
        matrix = build_matrix([(0, 0, 1), (1, 1, 5)], (1, 5), n_items=3)
        assert predict_item_mean(matrix, 0, 2) == 3.0

    def test_empty_matrix_midpoint(self):
        matrix = build_matrix([], (1, 5), n_users=2, n_items=2)
        assert predict_item_mean(matrix, 0, 1) == 3.0

    def test_user_independent(self, rng):
        matrix, _ = random_rating_matrix(rng, 6, 5, fill=0.5)
        model = ItemMeanRecommender().fit(matrix)
        for item in range(5):
            votes = model.predict(np.array([(u, item) for u in range(6)]))
            assert np.all(votes == votes[0])

    def test_batch_matches_scalar(self, rng):
        matrix, _ = random_rating_matrix(rng, 6, 5, fill=0.4)
        model = ItemMeanRecommender().fit(matrix)
        pairs = np.array([(u, i) for u in range(6) for i in range(5)])
        batch, fallback = model.predict_pairs(pairs)
        for row, (u, i) in enumerate(pairs):
            single = model.predict_pair(int(u), int(i))
            assert batch[row] == pytest.approx(single.value, abs=1e-12)
            assert fallback[row] == single.fallback


class TestUserMean:
    def test_symmetric_scale(self):
        matrix = build_matrix([(0, 0, -10), (0, 1, 10)], (-10, 10))
        assert predict_user_mean(matrix, 0, 0) == 0.0

    def test_user_without_votes_gets_global_mean(self):
        matrix = build_matrix([(0, 0, 1.0), (0, 1, 1.4)], (1, 5), n_users=2)
        assert predict_user_mean(matrix, 1, 0) == pytest.approx(1.2)

    def test_single_vote_identity(self):
        matrix = build_matrix([(0, 0, 7)], (-10, 10))
        assert predict_user_mean(matrix, 0, 0) == 7.0

    def test_batch_matches_scalar(self, rng):
        matrix, _ = random_rating_matrix(rng, 5, 6, fill=0.4)
        model = UserMeanRecommender().fit(matrix)
        pairs = np.array([(u, i) for u in range(5) for i in range(6)])
        batch, fallback = model.predict_pairs(pairs)
        for row, (u, i) in enumerate(pairs):
            single = model.predict_pair(int(u), int(i))
            assert batch[row] == pytest.approx(single.value, abs=1e-12)
            assert fallback[row] == single.fallback


class TestBlend:
    def make_instance(self, rng):
        matrix, _ = random_rating_matrix(rng, 8, 6, fill=0.7)
        similarity = SimilarityMatrix(pearson_matrix(matrix, n_c=3), "raw_pearson")
        return matrix, similarity

    def test_q_zero_is_item_mean(self, rng):
        matrix, similarity = self.make_instance(rng)
        for item in range(6):
            assert predict_blend(matrix, similarity, 0, item, q=0.0) == pytest.approx(
                predict_item_mean(matrix, 0, item), abs=1e-12)

    def test_q_one_is_raw_correlation(self, rng):
        matrix, similarity = self.make_instance(rng)
        for item in range(6):
            assert predict_blend(matrix, similarity, 1, item, q=1.0) == pytest.approx(
                predict_correlation(matrix, similarity, 1, item), abs=1e-12)

    def test_hand_blend(self):
        # one rater of the item with positive correlation: correlation part
        # is u's mean + rater's centered vote; craft votes to get v'=4, m=2
        matrix = build_matrix(
            [(0, 0, 1), (0, 1, 5), (0, 2, 3),
             (1, 0, 1), (1, 1, 5), (1, 2, 3), (1, 3, 2)],
            (1, 5))
        similarity = SimilarityMatrix(pearson_matrix(matrix, n_c=3), "raw_pearson")
        v_corr = predict_correlation(matrix, similarity, 0, 3)
        m_item = predict_item_mean(matrix, 0, 3)
        assert v_corr == pytest.approx(3.0 + (2 - 2.75), abs=1e-12)
        assert m_item == 2.0
        blended = predict_blend(matrix, similarity, 0, 3, q=0.5)
        assert blended == pytest.approx(0.5 * v_corr + 0.5 * m_item, abs=1e-12)

    def test_q_validation(self, rng):
        matrix, similarity = self.make_instance(rng)
        with pytest.raises(DataError):
            predict_blend(matrix, similarity, 0, 0, q=1.5)
        with pytest.raises(DataError):
            BlendRecommender(q=-0.1).fit(matrix)

    def test_estimator_fallback_flag_and_range(self, rng):
        matrix, _ = random_rating_matrix(rng, 8, 6, fill=0.3)
        model = BlendRecommender(q=0.5, n_c=3).fit(matrix)
        pairs = np.array([(u, i) for u in range(8) for i in range(6)])
        votes, _ = model.predict_pairs(pairs)
        assert np.all(votes >= 1.0) and np.all(votes <= 5.0)

    def test_batch_matches_scalar(self, rng):
        matrix, _ = random_rating_matrix(rng, 7, 5, fill=0.5)
        model = BlendRecommender(q=0.3).fit(matrix)
        pairs = np.array([(u, i) for u in range(7) for i in range(5)])
        batch, fallback = model.predict_pairs(pairs)
        for row, (u, i) in enumerate(pairs):
            single = model.predict_pair(int(u), int(i))
            assert batch[row] == pytest.approx(single.value, abs=1e-12)
            assert fallback[row] == single.fallback


class TestEstimatorApi:
    def test_get_params_round_trip(self):
        model = BlendRecommender(q=0.25, n_c=4)
        params = model.get_params()
        assert params == {"q": 0.25, "n_c": 4}
        clone = BlendRecommender(**params)
        assert clone.get_params() == params

    def test_outputs_within_scale(self, rng):
        matrix, _ = random_rating_matrix(rng, 6, 6, fill=0.4, scale=(-10, 10))
        pairs = np.array([(u, i) for u in range(6) for i in range(6)])
        for model in (ItemMeanRecommender(), UserMeanRecommender(),
                      BlendRecommender(q=0.5)):
            votes = model.fit(matrix).predict(pairs)
            assert np.all(votes >= -10.0) and np.all(votes <= 10.0)

    def test_unfitted_predict_raises(self):
        with pytest.raises(RuntimeError, match="fit"):
            ItemMeanRecommender().predict(np.array([[0, 0]]))
