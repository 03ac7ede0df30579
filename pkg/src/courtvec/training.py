"""Mini-batch stochastic training for the possession-outcome network."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DivergenceError
from .network import PARAM_NAMES, EmbeddingModel, _loss_and_grads_arrays
from .plays import plays_to_arrays
from .validation import seed_key


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 512
    epochs: int = 10
    optimizer: str = "adam"   # "adam" or "sgd"
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ArgumentError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ArgumentError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ArgumentError(f"epochs must be >= 1, got {self.epochs}")
        if self.optimizer not in ("adam", "sgd"):
            raise ArgumentError(f"optimizer must be 'adam' or 'sgd', got {self.optimizer!r}")


class _SgdUpdater:
    def __init__(self, cfg, model):
        self.lr = cfg.learning_rate

    def step(self, model, grads, step_index):
        for name in PARAM_NAMES:
            getattr(model, name)[...] -= self.lr * getattr(grads, name)


class _AdamUpdater:
    def __init__(self, cfg, model):
        self.cfg = cfg
        self.m = {n: np.zeros_like(getattr(model, n)) for n in PARAM_NAMES}
        self.v = {n: np.zeros_like(getattr(model, n)) for n in PARAM_NAMES}

    def step(self, model, grads, step_index):
        c = self.cfg
        bc1 = 1.0 - c.beta1 ** step_index
        bc2 = 1.0 - c.beta2 ** step_index
        for name in PARAM_NAMES:
            g = getattr(grads, name)
            m = self.m[name]
            v = self.v[name]
            m *= c.beta1
            m += (1.0 - c.beta1) * g
            v *= c.beta2
            v += (1.0 - c.beta2) * np.square(g)
            getattr(model, name)[...] -= (
                c.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + c.epsilon)
            )


def train(model: EmbeddingModel, plays, cfg: TrainConfig | None = None, report=None) -> EmbeddingModel:
    """Train the model in place and return it.

    Runs epochs * ceil(n / batch_size) optimizer steps. Shuffling (when
    enabled) uses a generator seeded from cfg.seed, so results are
    bitwise reproducible. `report`, if given, is called with
    (epoch_index, mean_epoch_loss) after every epoch.

    Raises DivergenceError naming the step if the loss goes non-finite.
    """
    cfg = cfg or TrainConfig()
    if (
        isinstance(plays, tuple)
        and len(plays) == 2
        and isinstance(plays[0], np.ndarray)
    ):
        lineups, outcomes = plays  # pre-converted (lineups, outcomes) arrays
    else:
        lineups, outcomes = plays_to_arrays(plays)
    n = lineups.shape[0]
    if n == 0:
        raise ArgumentError("no training plays")
    if lineups.max() >= model.config.n_players:
        raise ArgumentError(
            f"play references player id {int(lineups.max())} outside the model vocabulary"
        )

    updater = (_AdamUpdater if cfg.optimizer == "adam" else _SgdUpdater)(cfg, model)
    rng = np.random.default_rng(seed_key(cfg.seed))
    step = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, grads = _loss_and_grads_arrays(model, lineups[idx], outcomes[idx])
            step += 1
            if not np.isfinite(loss):
                raise DivergenceError(step, loss)
            updater.step(model, grads, step)
            epoch_loss += loss
            n_batches += 1
        if report is not None:
            report(epoch, epoch_loss / n_batches)
    return model
