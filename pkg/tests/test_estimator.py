"""Scikit-learn API conformance of PossessionOutcomeModel."""

import io
import math

import numpy as np
import pytest
from sklearn.base import clone

from courtvec import PossessionOutcomeModel
from courtvec.errors import ArgumentError


def toy_dataset(rng, n=400, n_players=16):
    X = np.empty((n, 10), dtype=np.int64)
    for i in range(n):
        X[i] = rng.choice(n_players, size=10, replace=False)
    # outcome leans on whether player 0 is on offense
    y = np.where(
        (X[:, :5] == 0).any(axis=1),
        rng.choice([17, 19], size=n),
        rng.choice(23, size=n),
    ).astype(np.int64)
    return X, y


class TestEstimatorApi:
    def test_get_set_params_round_trip(self):
        est = PossessionOutcomeModel(embedding_dim=4, epochs=2)
        params = est.get_params()
        assert params["embedding_dim"] == 4
        est2 = PossessionOutcomeModel().set_params(**params)
        assert est2.get_params() == params

    def test_clone_keeps_hyperparameters(self):
        est = PossessionOutcomeModel(hidden_dim=32, random_state=5)
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_fit_predict_proba_shapes(self):
        rng = np.random.default_rng(0)
        X, y = toy_dataset(rng)
        est = PossessionOutcomeModel(embedding_dim=4, hidden_dim=16, epochs=3,
                                     batch_size=64).fit(X, y)
        probs = est.predict_proba(X[:7])
        assert probs.shape == (7, 23)
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-9)
        assert est.predict(X[:7]).shape == (7,)
        assert len(est.loss_curve_) == 3

    def test_fit_beats_uniform_log_loss(self):
        rng = np.random.default_rng(1)
        X, y = toy_dataset(rng)
        est = PossessionOutcomeModel(embedding_dim=4, hidden_dim=16, epochs=10,
                                     batch_size=64, random_state=2).fit(X, y)
        probs = est.predict_proba(X)
        log_loss = -np.mean(np.log(probs[np.arange(len(y)), y]))
        assert log_loss < math.log(23)

    def test_deterministic_per_random_state(self):
        rng = np.random.default_rng(2)
        X, y = toy_dataset(rng, n=120)
        a = PossessionOutcomeModel(embedding_dim=3, hidden_dim=8, epochs=2,
                                   random_state=7).fit(X, y)
        b = PossessionOutcomeModel(embedding_dim=3, hidden_dim=8, epochs=2,
                                   random_state=7).fit(X, y)
        np.testing.assert_array_equal(a.model_.embeddings, b.model_.embeddings)

    def test_lineup_order_does_not_matter(self):
        rng = np.random.default_rng(3)
        X, y = toy_dataset(rng, n=100)
        est = PossessionOutcomeModel(embedding_dim=3, hidden_dim=8, epochs=2).fit(X, y)
        row = X[:1]
        shuffled = row.copy()
        shuffled[0, :5] = rng.permutation(shuffled[0, :5])
        shuffled[0, 5:] = rng.permutation(shuffled[0, 5:])
        np.testing.assert_array_equal(est.predict_proba(row), est.predict_proba(shuffled))

    def test_checkpoint_round_trip_through_estimator(self):
        rng = np.random.default_rng(4)
        X, y = toy_dataset(rng, n=100)
        est = PossessionOutcomeModel(embedding_dim=3, hidden_dim=8, epochs=2).fit(X, y)
        buf = io.BytesIO()
        est.save(buf)
        loaded = PossessionOutcomeModel.from_checkpoint(io.BytesIO(buf.getvalue()))
        np.testing.assert_array_equal(loaded.predict_proba(X[:5]), est.predict_proba(X[:5]))
        assert loaded.embeddings_.shape == est.embeddings_.shape

    def test_unfitted_raises(self):
        with pytest.raises(ArgumentError, match="not fitted"):
            PossessionOutcomeModel().predict_proba(np.zeros((1, 10), dtype=int))

    def test_mismatched_lengths_rejected(self):
        X = np.tile(np.arange(10), (4, 1))
        with pytest.raises(ArgumentError):
            PossessionOutcomeModel().fit(X, np.zeros(3, dtype=int))
