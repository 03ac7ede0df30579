"""Planted-generator synthetic corpus.

A ground-truth instance of the production network generates plays, so
training, K-L validation and simulation claims can be tested without any
real play-by-play data. The generator and the trained model share one
forward implementation; they can never diverge in architecture.

Lineup sampling is uniform over distinct-10 draws by default. The "zipf"
mode mixes draws from a fixed pool of matchups with Zipf-distributed
frequencies (so some matchups repeat often enough to clear the
15-play validation filter) with fresh uniform draws (so training still
sees diverse contexts).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .network import EmbeddingModel, ModelConfig
from .network import _forward_core, _sorted_lineups
from .outcomes import MADE_FG_CLASSES, MADE_THREE_CLASSES, MISSED_SHOT_CLASSES, OUTCOME_POINTS
from .plays import Play
from .registry import POSITIONS, PlayerRecord, PlayerRegistry
from .validation import derived_rng

# substream tags, one per independent random draw family
_TAG_PARAMS = 0
_TAG_POOL = 1
_TAG_METRICS = 2
_TAG_PLAYS = 3

_MINUTES_PER_PLAY = 0.4


def random_matchups(n_players: int, count: int, rng) -> np.ndarray:
    """(count, 10) matrix of uniform distinct-10 draws, each side sorted."""
    if isinstance(rng, int):
        rng = derived_rng(rng)
    keys = rng.random((count, n_players))
    top = np.argpartition(keys, 10, axis=1)[:, :10]
    out = np.empty((count, 10), dtype=np.int64)
    out[:, :5] = np.sort(top[:, :5], axis=1)
    out[:, 5:] = np.sort(top[:, 5:], axis=1)
    return out


@dataclass(frozen=True)
class LineupSampler:
    """Draws (offense, defense) rows. mode "uniform" draws fresh every
    play; "zipf" draws from `pool` with probability (1 - uniform_mix),
    rank-weighted by 1/rank**exponent."""

    n_players: int
    mode: str = "uniform"
    pool: np.ndarray | None = None
    weights: np.ndarray | None = None
    uniform_mix: float = 0.5

    def draw(self, count: int, rng) -> np.ndarray:
        if self.mode == "uniform":
            return random_matchups(self.n_players, count, rng)
        rows = np.empty((count, 10), dtype=np.int64)
        from_pool = rng.random(count) >= self.uniform_mix
        pool_idx = rng.choice(self.pool.shape[0], size=count, p=self.weights)
        rows[from_pool] = self.pool[pool_idx[from_pool]]
        n_fresh = int((~from_pool).sum())
        if n_fresh:
            rows[~from_pool] = random_matchups(self.n_players, n_fresh, rng)
        return rows


@dataclass(frozen=True)
class PlantedGenerator:
    truth: EmbeddingModel
    roster: PlayerRegistry
    sampler: LineupSampler
    seed: int


def _craft_style_bias(params: dict[str, np.ndarray], config: ModelConfig, style_bias):
    """Give selected players exact additive offsets on selected outcome
    logits when they are on offense.

    Each biased class gets one reserved embedding dimension and one
    reserved hidden unit wired straight through the ReLU (a large
    positive bias keeps the unit in its linear region; the constant is
    cancelled in the output bias). A player's entry in the reserved
    dimension then adds verbatim to that class's logit.
    """
    classes = sorted({int(c) for offsets in style_bias.values() for c in offsets})
    h = config.embedding_dim
    i = config.hidden_dim
    if len(classes) > h - 1:
        raise ArgumentError(
            f"style bias touches {len(classes)} classes; needs embedding_dim > {len(classes)}"
        )
    if len(classes) > i - 1:
        raise ArgumentError(
            f"style bias touches {len(classes)} classes; needs hidden_dim > {len(classes)}"
        )
    anchor = 25.0  # keeps the reserved units active for any sane offsets
    for slot, outcome_class in enumerate(classes):
        dim = h - 1 - slot
        unit = i - 1 - slot
        params["embeddings"][:, dim] = 0.0
        params["w_hidden"][dim, :] = 0.0      # offense half: only the reserved unit
        params["w_hidden"][h + dim, :] = 0.0  # defense half: bias is offense-only
        params["w_hidden"][:, unit] = 0.0
        params["w_hidden"][dim, unit] = 5.0   # undo the mean-pool division
        params["b_hidden"][unit] = anchor
        params["w_out"][unit, :] = 0.0
        params["w_out"][unit, outcome_class] = 1.0
        params["b_out"][outcome_class] -= anchor
        for player, offsets in style_bias.items():
            if outcome_class in {int(c) for c in offsets}:
                params["embeddings"][int(player), dim] = float(offsets[outcome_class])


def plant_generator(
    n_players: int,
    embedding_dim: int = 8,
    hidden_dim: int = 32,
    seed: int = 0,
    style_bias: dict[int, dict[int, float]] | None = None,
    lineup_sampling: str = "uniform",
    pool_size: int = 150,
    zipf_exponent: float = 1.0,
    uniform_mix: float = 0.5,
    metrics_plays: int = 20000,
) -> PlantedGenerator:
    """Build a ground-truth generator with parameters drawn from a
    scaled normal (standard deviation 0.5).

    style_bias maps player id -> {outcome class -> logit offset}; the
    offset applies when that player is on offense. Synthetic box metrics
    are tallied from a sampled batch of plays so that per-minute
    correlations against the embeddings are meaningful.
    """
    if n_players < 10:
        raise ArgumentError(f"need at least 10 players, got {n_players}")
    if lineup_sampling not in ("uniform", "zipf"):
        raise ArgumentError(f"lineup_sampling must be 'uniform' or 'zipf', got {lineup_sampling!r}")
    config = ModelConfig(
        n_players=n_players, embedding_dim=embedding_dim, hidden_dim=hidden_dim
    )
    rng = derived_rng(seed, _TAG_PARAMS)
    std = 0.5
    params = {
        "embeddings": rng.normal(0.0, std, size=(n_players, embedding_dim)),
        "w_hidden": rng.normal(0.0, std, size=(2 * embedding_dim, hidden_dim)),
        "b_hidden": rng.normal(0.0, std, size=hidden_dim),
        "w_out": rng.normal(0.0, std, size=(hidden_dim, config.n_outcomes)),
        "b_out": rng.normal(0.0, std, size=config.n_outcomes),
    }
    if style_bias:
        for player in style_bias:
            if not 0 <= int(player) < n_players:
                raise ArgumentError(f"style bias names unknown player {player}")
        _craft_style_bias(params, config, style_bias)
    truth = EmbeddingModel(config, **params)

    if lineup_sampling == "zipf":
        if pool_size < 1:
            raise ArgumentError(f"pool_size must be >= 1, got {pool_size}")
        if not 0.0 <= uniform_mix <= 1.0:
            raise ArgumentError(f"uniform_mix must be in [0, 1], got {uniform_mix}")
        pool = random_matchups(n_players, pool_size, derived_rng(seed, _TAG_POOL))
        weights = 1.0 / np.arange(1, pool_size + 1) ** zipf_exponent
        weights /= weights.sum()
        sampler = LineupSampler(
            n_players=n_players, mode="zipf", pool=pool, weights=weights,
            uniform_mix=uniform_mix,
        )
    else:
        sampler = LineupSampler(n_players=n_players, mode="uniform")

    roster = _build_roster(truth, sampler, seed, metrics_plays)
    return PlantedGenerator(truth=truth, roster=roster, sampler=sampler, seed=seed)


def _sample_rows(truth: EmbeddingModel, rows: np.ndarray, rng) -> np.ndarray:
    """Outcome per row, sampled from the truth model's distribution."""
    probs, _ = _forward_core(truth, _sorted_lineups(rows), want_cache=False)
    cdf = np.cumsum(probs, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(rows.shape[0])
    return (cdf < u[:, None]).sum(axis=1)


def _build_roster(truth, sampler, seed, metrics_plays) -> PlayerRegistry:
    n_players = truth.config.n_players
    rng = derived_rng(seed, _TAG_METRICS)
    width = max(3, len(str(n_players - 1)))

    appearances = np.zeros(n_players, dtype=np.int64)
    fg = np.zeros(n_players, dtype=np.int64)
    threes = np.zeros(n_players, dtype=np.int64)
    assists = np.zeros(n_players, dtype=np.int64)
    rebounds = np.zeros(n_players, dtype=np.int64)
    plus_minus = np.zeros(n_players, dtype=np.int64)

    chunk = 8192
    remaining = metrics_plays
    points_of = np.asarray(OUTCOME_POINTS, dtype=np.int64)
    while remaining > 0:
        size = min(chunk, remaining)
        remaining -= size
        rows = sampler.draw(size, rng)
        outcomes = _sample_rows(truth, rows, rng)
        pts = points_of[outcomes]
        offense = rows[:, :5]
        defense = rows[:, 5:]
        np.add.at(appearances, offense, 1)
        np.add.at(appearances, defense, 1)
        np.add.at(plus_minus, offense, pts[:, None])
        np.add.at(plus_minus, defense, -pts[:, None])
        actor_col = rng.integers(5, size=size)
        actors = offense[np.arange(size), actor_col]
        made_fg = np.isin(outcomes, list(MADE_FG_CLASSES))
        np.add.at(fg, actors[made_fg], 1)
        made_three = np.isin(outcomes, list(MADE_THREE_CLASSES))
        np.add.at(threes, actors[made_three], 1)
        # assists: credit a different teammate on 60% of made field goals
        assisted = made_fg & (rng.random(size) < 0.6)
        helper_col = (actor_col + 1 + rng.integers(4, size=size)) % 5
        helpers = offense[np.arange(size), helper_col]
        np.add.at(assists, helpers[assisted], 1)
        # rebounds: missed shots grabbed by a defender (75%) or teammate
        missed = np.isin(outcomes, list(MISSED_SHOT_CLASSES))
        def_board = rng.random(size) < 0.75
        board_col = rng.integers(5, size=size)
        boarders = np.where(
            def_board,
            defense[np.arange(size), board_col],
            offense[np.arange(size), board_col],
        )
        np.add.at(rebounds, boarders[missed], 1)

    records = []
    for pid in range(n_players):
        records.append(
            PlayerRecord(
                player_id=pid,
                name=f"Player {pid:0{width}d}",
                position=POSITIONS[pid % len(POSITIONS)],
                minutes=_MINUTES_PER_PLAY * max(int(appearances[pid]), 1),
                fg_made=int(fg[pid]),
                threes_made=int(threes[pid]),
                assists=int(assists[pid]),
                rebounds=int(rebounds[pid]),
                plus_minus=int(plus_minus[pid]),
            )
        )
    return PlayerRegistry(records)


def generate_plays(gen: PlantedGenerator, count: int, games: int) -> list[Play]:
    """Sample `count` plays and spread them evenly over `games`
    sequential synthetic game ids (earlier games absorb any remainder).

    Deterministic given the generator: calling twice reproduces the same
    corpus.
    """
    if count < 1:
        raise ArgumentError(f"count must be >= 1, got {count}")
    if games < 1:
        raise ArgumentError(f"games must be >= 1, got {games}")
    rng = derived_rng(gen.seed, _TAG_PLAYS)
    per_game, extra = divmod(count, games)
    width = max(5, len(str(games - 1)))

    plays: list[Play] = []
    game_index = 0
    seq = 0
    game_quota = per_game + (1 if extra > 0 else 0)
    chunk = 8192
    produced = 0
    while produced < count:
        size = min(chunk, count - produced)
        rows = gen.sampler.draw(size, rng)
        outcomes = _sample_rows(gen.truth, rows, rng)
        for r in range(size):
            while seq >= game_quota:
                game_index += 1
                seq = 0
                game_quota = per_game + (1 if game_index < extra else 0)
            plays.append(
                Play(
                    game_id=f"synth-{game_index:0{width}d}",
                    seq=seq,
                    offense=tuple(int(p) for p in rows[r, :5]),
                    defense=tuple(int(p) for p in rows[r, 5:]),
                    outcome=int(outcomes[r]),
                )
            )
            seq += 1
        produced += size
    return plays
