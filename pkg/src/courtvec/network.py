"""The possession-outcome network and its analytic gradients.

Architecture: a shared embedding table (one row per player, used for both
offensive and defensive roles), mean pooling over each side's five
embeddings, concatenation (offense first), one ReLU hidden layer, and a
softmax over the 23 outcome classes.

Pooling accumulates embedding rows in ascending player-id order and
divides by five once, so the output is *bitwise* invariant to the order
players are listed in. All gradients are exact analytic derivatives; no
autodiff framework is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .outcomes import N_OUTCOMES
from .validation import as_lineup_matrix, check_matchup, seed_key

PLAYERS_PER_SIDE = 5

PARAM_NAMES = ("embeddings", "w_hidden", "b_hidden", "w_out", "b_out")


@dataclass(frozen=True)
class ModelConfig:
    """Network dimensions. players_per_side and n_outcomes are fixed by
    the problem; they are carried so checkpoints are self-describing."""

    n_players: int
    embedding_dim: int = 8
    hidden_dim: int = 128
    players_per_side: int = PLAYERS_PER_SIDE
    n_outcomes: int = N_OUTCOMES

    def __post_init__(self):
        if self.players_per_side != PLAYERS_PER_SIDE:
            raise ArgumentError(f"players_per_side must be {PLAYERS_PER_SIDE}")
        if self.n_outcomes != N_OUTCOMES:
            raise ArgumentError(f"n_outcomes must be {N_OUTCOMES}")
        if self.n_players < 2 * self.players_per_side:
            raise ArgumentError(
                f"n_players must be >= {2 * self.players_per_side}, got {self.n_players}"
            )
        if self.embedding_dim < 1 or self.hidden_dim < 1:
            raise ArgumentError("embedding_dim and hidden_dim must be >= 1")


@dataclass
class EmbeddingModel:
    """All learnable parameters.

    embeddings: (n_players, embedding_dim)
    w_hidden:   (2 * embedding_dim, hidden_dim), b_hidden: (hidden_dim,)
    w_out:      (hidden_dim, n_outcomes),        b_out:    (n_outcomes,)
    """

    config: ModelConfig
    embeddings: np.ndarray
    w_hidden: np.ndarray
    b_hidden: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray

    def __post_init__(self):
        c = self.config
        expected = {
            "embeddings": (c.n_players, c.embedding_dim),
            "w_hidden": (2 * c.embedding_dim, c.hidden_dim),
            "b_hidden": (c.hidden_dim,),
            "w_out": (c.hidden_dim, c.n_outcomes),
            "b_out": (c.n_outcomes,),
        }
        for name, shape in expected.items():
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.shape != shape:
                raise ArgumentError(f"{name}: expected shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ArgumentError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, arr)

    def params(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def copy(self) -> "EmbeddingModel":
        return EmbeddingModel(self.config, *(getattr(self, n).copy() for n in PARAM_NAMES))

    def allclose(self, other: "EmbeddingModel", rtol=0.0, atol=0.0) -> bool:
        return self.config == other.config and all(
            np.allclose(getattr(self, n), getattr(other, n), rtol=rtol, atol=atol)
            for n in PARAM_NAMES
        )


@dataclass
class ModelGradients:
    """Partial derivatives of a scalar loss, same shapes as the model."""

    embeddings: np.ndarray
    w_hidden: np.ndarray
    b_hidden: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray

    def params(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}


def init_model(config: ModelConfig, seed: int) -> EmbeddingModel:
    """Uniform fan-in initialization: each weight matrix is drawn from
    U(-1/sqrt(fan_in), +1/sqrt(fan_in)); biases start at zero.

    Deterministic given the seed; draw order is embeddings, w_hidden,
    w_out.
    """
    if not isinstance(config, ModelConfig):
        raise ArgumentError("config must be a ModelConfig")
    rng = np.random.default_rng(seed_key(seed))
    c = config
    b_e = 1.0 / np.sqrt(c.embedding_dim)
    b_1 = 1.0 / np.sqrt(2 * c.embedding_dim)
    b_2 = 1.0 / np.sqrt(c.hidden_dim)
    return EmbeddingModel(
        config=c,
        embeddings=rng.uniform(-b_e, b_e, size=(c.n_players, c.embedding_dim)),
        w_hidden=rng.uniform(-b_1, b_1, size=(2 * c.embedding_dim, c.hidden_dim)),
        b_hidden=np.zeros(c.hidden_dim),
        w_out=rng.uniform(-b_2, b_2, size=(c.hidden_dim, c.n_outcomes)),
        b_out=np.zeros(c.n_outcomes),
    )


def _pool_sorted(emb_rows: np.ndarray) -> np.ndarray:
    # emb_rows: (B, 5, h) gathered in ascending player-id order.
    # Explicit sequential accumulation keeps the summation order pinned.
    s = emb_rows[:, 0] + emb_rows[:, 1]
    s = s + emb_rows[:, 2]
    s = s + emb_rows[:, 3]
    s = s + emb_rows[:, 4]
    return s / 5.0


def _forward_core(model: EmbeddingModel, lineups: np.ndarray, want_cache: bool):
    """lineups: (B, 10) with each side already sorted ascending."""
    off = lineups[:, :PLAYERS_PER_SIDE]
    deff = lineups[:, PLAYERS_PER_SIDE:]
    emb_off = model.embeddings[off]
    emb_def = model.embeddings[deff]
    x = np.concatenate([_pool_sorted(emb_off), _pool_sorted(emb_def)], axis=1)
    z1 = x @ model.w_hidden + model.b_hidden
    h1 = np.maximum(z1, 0.0)
    scores = h1 @ model.w_out + model.b_out
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    if want_cache:
        return probs, (off, deff, x, z1, h1)
    return probs, None


def _sorted_lineups(lineups: np.ndarray) -> np.ndarray:
    out = np.empty_like(lineups)
    out[:, :PLAYERS_PER_SIDE] = np.sort(lineups[:, :PLAYERS_PER_SIDE], axis=1)
    out[:, PLAYERS_PER_SIDE:] = np.sort(lineups[:, PLAYERS_PER_SIDE:], axis=1)
    return out


def forward(model: EmbeddingModel, offense, defense) -> np.ndarray:
    """Predicted outcome distribution for one matchup.

    Returns a length-23 probability vector (strictly positive entries,
    sums to 1 within 1e-9 for any finite parameters).
    """
    off, deff = check_matchup(offense, defense, n_players=model.config.n_players)
    row = np.array([off + deff], dtype=np.int64)
    probs, _ = _forward_core(model, row, want_cache=False)
    return probs[0]


def forward_batch(model: EmbeddingModel, lineups) -> np.ndarray:
    """Vectorized forward pass over an (n, 10) lineup matrix
    ([offense | defense] per row). Returns (n, 23) probabilities."""
    arr = as_lineup_matrix(lineups, n_players=model.config.n_players)
    probs, _ = _forward_core(model, _sorted_lineups(arr), want_cache=False)
    return probs


def _loss_and_grads_arrays(model: EmbeddingModel, lineups: np.ndarray, outcomes: np.ndarray):
    """Mean cross-entropy (natural log) and exact gradients.

    lineups must already have each side sorted ascending. The shared
    embedding gradient accumulates duplicate-player contributions in
    batch order (np.add.at iterates the index array in order).
    """
    n = lineups.shape[0]
    probs, (off, deff, x, z1, h1) = _forward_core(model, lineups, want_cache=True)
    rows = np.arange(n)
    picked = probs[rows, outcomes]
    with np.errstate(divide="ignore"):
        loss = float(-np.log(picked).mean())

    d_scores = probs.copy()
    d_scores[rows, outcomes] -= 1.0
    d_scores /= n

    g_w_out = h1.T @ d_scores
    g_b_out = d_scores.sum(axis=0)
    d_h1 = d_scores @ model.w_out.T
    d_z1 = d_h1 * (z1 > 0.0)
    g_w_hidden = x.T @ d_z1
    g_b_hidden = d_z1.sum(axis=0)
    d_x = d_z1 @ model.w_hidden.T

    h = model.config.embedding_dim
    g_emb = np.zeros_like(model.embeddings)
    np.add.at(g_emb, off, (d_x[:, :h] / 5.0)[:, None, :])
    np.add.at(g_emb, deff, (d_x[:, h:] / 5.0)[:, None, :])

    grads = ModelGradients(g_emb, g_w_hidden, g_b_hidden, g_w_out, g_b_out)
    return loss, grads


def loss_and_gradients(model: EmbeddingModel, batch):
    """Mean cross-entropy over a batch of plays plus exact analytic
    gradients for every parameter.

    Only the embedding rows of players appearing in the batch receive
    non-zero gradients.
    """
    from .plays import plays_to_arrays

    if hasattr(batch, "__len__") and len(batch) == 0:
        raise ArgumentError("empty batch")
    lineups, outcomes = plays_to_arrays(batch)
    if lineups.max() >= model.config.n_players:
        raise ArgumentError(
            f"play references player id {int(lineups.max())} outside the model vocabulary"
        )
    return _loss_and_grads_arrays(model, lineups, outcomes)
