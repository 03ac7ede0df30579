"""Scikit-learn style estimator around the possession-outcome network.

X is an (n, 10) integer matrix of player ids, offense in columns 0-4 and
defense in columns 5-9 (order within a side is irrelevant); y is the
outcome class in [0, 22]. The estimator composes with sklearn tooling
(get_params/set_params/clone) while the numerics stay in-package.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .checkpoint import load_checkpoint, save_checkpoint
from .errors import ArgumentError
from .network import ModelConfig, forward_batch, init_model
from .outcomes import N_OUTCOMES
from .training import TrainConfig, train
from .validation import as_lineup_matrix


class PossessionOutcomeModel(ClassifierMixin, BaseEstimator):
    """Predicts the 23-class outcome distribution of a possession from
    the ten players on court.

    Parameters mirror TrainConfig plus the network dimensions. When
    n_players is None the vocabulary size is inferred from the training
    data as max id + 1.
    """

    def __init__(
        self,
        n_players=None,
        embedding_dim=8,
        hidden_dim=128,
        learning_rate=1e-3,
        batch_size=512,
        epochs=10,
        optimizer="adam",
        beta1=0.9,
        beta2=0.999,
        epsilon=1e-8,
        shuffle=True,
        random_state=0,
    ):
        self.n_players = n_players
        self.embedding_dim = embedding_dim
        self.hidden_dim = hidden_dim
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.optimizer = optimizer
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.shuffle = shuffle
        self.random_state = random_state

    def _train_config(self):
        return TrainConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            optimizer=self.optimizer,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
            seed=self.random_state,
            shuffle=self.shuffle,
        )

    def fit(self, X, y):
        X = as_lineup_matrix(X)
        y = np.asarray(y, dtype=np.int64).ravel()
        if y.shape[0] != X.shape[0]:
            raise ArgumentError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        if y.size and (y.min() < 0 or y.max() >= N_OUTCOMES):
            raise ArgumentError(f"outcome classes must lie in [0, {N_OUTCOMES - 1}]")
        n_players = self.n_players if self.n_players is not None else int(X.max()) + 1
        config = ModelConfig(
            n_players=n_players,
            embedding_dim=self.embedding_dim,
            hidden_dim=self.hidden_dim,
        )
        self.model_ = init_model(config, self.random_state)
        self.loss_curve_ = []
        sorted_X = np.empty_like(X)
        sorted_X[:, :5] = np.sort(X[:, :5], axis=1)
        sorted_X[:, 5:] = np.sort(X[:, 5:], axis=1)
        train(
            self.model_,
            (sorted_X, y),
            self._train_config(),
            report=lambda epoch, loss: self.loss_curve_.append(loss),
        )
        self.classes_ = np.arange(N_OUTCOMES)
        self.n_features_in_ = 10
        return self

    def predict_proba(self, X):
        self._check_fitted()
        return forward_batch(self.model_, X)

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)

    def score(self, X, y):
        """Mean accuracy of the argmax prediction."""
        y = np.asarray(y, dtype=np.int64).ravel()
        return float(np.mean(self.predict(X) == y))

    @property
    def embeddings_(self):
        """The learned (n_players, embedding_dim) embedding table."""
        self._check_fitted()
        return self.model_.embeddings

    def save(self, sink):
        self._check_fitted()
        save_checkpoint(self.model_, sink)

    @classmethod
    def from_checkpoint(cls, source):
        """Build a fitted estimator from a saved checkpoint."""
        model = load_checkpoint(source)
        est = cls(
            n_players=model.config.n_players,
            embedding_dim=model.config.embedding_dim,
            hidden_dim=model.config.hidden_dim,
        )
        est.model_ = model
        est.loss_curve_ = []
        est.classes_ = np.arange(N_OUTCOMES)
        est.n_features_in_ = 10
        return est

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise ArgumentError("estimator is not fitted; call fit() or from_checkpoint()")
