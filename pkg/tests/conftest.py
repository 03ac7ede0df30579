import numpy as np
import pytest

import courtvec as cv


@pytest.fixture(scope="session")
def small_generator():
    """Planted generator shared by tests that only read from it."""
    return cv.plant_generator(
        30, embedding_dim=4, hidden_dim=8, seed=3,
        lineup_sampling="zipf", pool_size=12, uniform_mix=0.4, metrics_plays=4000,
    )


@pytest.fixture(scope="session")
def small_corpus(small_generator):
    return cv.generate_plays(small_generator, 4000, 40)


@pytest.fixture()
def toy_model():
    config = cv.ModelConfig(n_players=20, embedding_dim=3, hidden_dim=5)
    return cv.init_model(config, seed=42)


def make_play(offense, defense, outcome, game="g", seq=0):
    return cv.Play(game_id=game, seq=seq, offense=tuple(offense),
                   defense=tuple(defense), outcome=outcome)


def forced_outcome_model(n_players, outcome_class, strength=60.0, embedding_dim=3, hidden_dim=4):
    """Model whose output bias pins (numerically) all probability mass on
    one class, regardless of the lineups."""
    config = cv.ModelConfig(n_players=n_players, embedding_dim=embedding_dim,
                            hidden_dim=hidden_dim)
    b_out = np.zeros(23)
    b_out[outcome_class] = strength
    return cv.EmbeddingModel(
        config,
        embeddings=np.zeros((n_players, embedding_dim)),
        w_hidden=np.zeros((2 * embedding_dim, hidden_dim)),
        b_hidden=np.zeros(hidden_dim),
        w_out=np.zeros((hidden_dim, 23)),
        b_out=b_out,
    )


PLAYER_CSV_HEADER = (
    "player_id,name,position,minutes,fg_made,threes_made,assists,rebounds,plus_minus"
)


def player_csv(rows):
    return PLAYER_CSV_HEADER + "\n" + "\n".join(rows) + "\n"


def registry_of(n):
    rows = [f"{i},Player {i:03d},{'GFC'[i % 3]},{10 + i},5,2,3,4,{i - 2}" for i in range(n)]
    return cv.build_registry(player_csv(rows))
