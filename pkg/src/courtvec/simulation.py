"""Monte Carlo game and best-of-7 series simulation.

Each game gives both teams a fixed number of possessions; outcomes are
sampled from the model's predicted distribution for each direction of
the matchup and converted to points. Ties are broken by 10-possession
overtime blocks; a game that stays tied through 100 overtimes aborts
with DegenerateModelError (only doctored or pathological models get
there).

Reproducibility: every game draws from its own RNG substream keyed by
(seed, series index, game index), so parallel and sequential execution
produce identical aggregates.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError
from .network import EmbeddingModel, forward
from .outcomes import OUTCOME_POINTS, check_outcome
from .validation import check_matchup, check_positive_int, derived_rng

_POINTS = np.asarray(OUTCOME_POINTS, dtype=np.int64)

MAX_OVERTIMES = 100
OVERTIME_POSSESSIONS = 10


def outcome_points(outcome: int) -> int:
    """Points the offense scores for an outcome class."""
    return int(_POINTS[check_outcome(outcome)])


@dataclass(frozen=True)
class GameResult:
    points_a: int
    points_b: int
    possessions_per_team: int
    winner: str                      # "A" or "B"
    outcomes_a: np.ndarray | None = None
    outcomes_b: np.ndarray | None = None


@dataclass(frozen=True)
class SeriesResult:
    sims: int
    possessions: int
    team_a_series_win_fraction: float
    mean_series_score: tuple[float, float]
    mean_margin: float               # team A perspective, per played game
    margin_std: float
    game_win_fraction_a: float
    mean_games: float
    series_lengths: dict[int, int]

    def to_dict(self):
        return {
            "sims": self.sims,
            "possessions": self.possessions,
            "team_a_series_win_fraction": self.team_a_series_win_fraction,
            "mean_series_score": list(self.mean_series_score),
            "mean_margin": self.mean_margin,
            "margin_std": self.margin_std,
            "game_win_fraction_a": self.game_win_fraction_a,
            "mean_games": self.mean_games,
            "series_lengths": {str(k): v for k, v in sorted(self.series_lengths.items())},
            "margin_basis": "mean over played games",
        }


def _cdf(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(np.asarray(probs, dtype=np.float64))
    cdf[-1] = 1.0
    return cdf


def _sample_outcomes(cdf: np.ndarray, count: int, rng) -> np.ndarray:
    return np.searchsorted(cdf, rng.random(count), side="right")


def _play_game(cdf_a, cdf_b, possessions, rng, record=False) -> GameResult:
    """One game from precomputed outcome CDFs (A's offense, B's offense).
    Draw order is fixed: A's possessions then B's, per block."""
    outcomes_a = _sample_outcomes(cdf_a, possessions, rng)
    outcomes_b = _sample_outcomes(cdf_b, possessions, rng)
    points_a = int(_POINTS[outcomes_a].sum())
    points_b = int(_POINTS[outcomes_b].sum())
    played = possessions
    overtimes = 0
    while points_a == points_b:
        overtimes += 1
        if overtimes > MAX_OVERTIMES:
            raise DegenerateModelError(
                f"game still tied after {MAX_OVERTIMES} overtimes; the outcome "
                "distribution cannot separate the teams"
            )
        ot_a = _sample_outcomes(cdf_a, OVERTIME_POSSESSIONS, rng)
        ot_b = _sample_outcomes(cdf_b, OVERTIME_POSSESSIONS, rng)
        points_a += int(_POINTS[ot_a].sum())
        points_b += int(_POINTS[ot_b].sum())
        played += OVERTIME_POSSESSIONS
        if record:
            outcomes_a = np.concatenate([outcomes_a, ot_a])
            outcomes_b = np.concatenate([outcomes_b, ot_b])
    return GameResult(
        points_a=points_a,
        points_b=points_b,
        possessions_per_team=played,
        winner="A" if points_a > points_b else "B",
        outcomes_a=outcomes_a if record else None,
        outcomes_b=outcomes_b if record else None,
    )


def matchup_distributions(model: EmbeddingModel, lineup_a, lineup_b):
    """(q_a, q_b): outcome distributions for A-on-offense and B-on-offense."""
    a, b = check_matchup(lineup_a, lineup_b, n_players=model.config.n_players)
    return forward(model, a, b), forward(model, b, a)


def simulate_game(
    model: EmbeddingModel, lineup_a, lineup_b, possessions: int = 100,
    rng=None, record: bool = False,
) -> GameResult:
    """Simulate a single game. `rng` may be a Generator or an int seed."""
    check_positive_int(possessions, "possessions")
    q_a, q_b = matchup_distributions(model, lineup_a, lineup_b)
    if rng is None or isinstance(rng, int):
        rng = derived_rng(rng or 0)
    return _play_game(_cdf(q_a), _cdf(q_b), possessions, rng, record=record)


def simulate_series(
    model: EmbeddingModel, lineup_a, lineup_b,
    sims: int = 1000, possessions: int = 100, seed=0,
) -> SeriesResult:
    """Simulate best-of-7 series (first to 4 wins) and aggregate."""
    check_positive_int(sims, "sims")
    check_positive_int(possessions, "possessions")
    q_a, q_b = matchup_distributions(model, lineup_a, lineup_b)
    return _simulate_series_from_probs(q_a, q_b, sims, possessions, seed)


def _simulate_series_from_probs(q_a, q_b, sims, possessions, seed) -> SeriesResult:
    cdf_a, cdf_b = _cdf(q_a), _cdf(q_b)
    series_wins_a = 0
    total_wins_a = 0
    total_wins_b = 0
    games_won_a = 0
    games_played = 0
    margin_sum = 0.0
    margin_sq_sum = 0.0
    lengths: Counter[int] = Counter()
    for series in range(sims):
        wins_a = wins_b = 0
        game = 0
        while wins_a < 4 and wins_b < 4:
            rng = derived_rng(seed, series, game)
            result = _play_game(cdf_a, cdf_b, possessions, rng)
            if result.winner == "A":
                wins_a += 1
            else:
                wins_b += 1
            margin = result.points_a - result.points_b
            margin_sum += margin
            margin_sq_sum += margin * margin
            game += 1
        if wins_a == 4:
            series_wins_a += 1
        total_wins_a += wins_a
        total_wins_b += wins_b
        games_won_a += wins_a
        games_played += game
        lengths[game] += 1
    mean_margin = margin_sum / games_played
    if games_played > 1:
        var = (margin_sq_sum - games_played * mean_margin * mean_margin) / (games_played - 1)
        margin_std = float(np.sqrt(max(var, 0.0)))
    else:
        margin_std = 0.0
    return SeriesResult(
        sims=sims,
        possessions=possessions,
        team_a_series_win_fraction=series_wins_a / sims,
        mean_series_score=(total_wins_a / sims, total_wins_b / sims),
        mean_margin=mean_margin,
        margin_std=margin_std,
        game_win_fraction_a=games_won_a / games_played,
        mean_games=games_played / sims,
        series_lengths=dict(lengths),
    )


@dataclass(frozen=True)
class HeadToHeadRow:
    team_a: str
    team_b: str
    series: SeriesResult

    def to_dict(self):
        return {"team_a": self.team_a, "team_b": self.team_b, **self.series.to_dict()}

    def rendered(self) -> str:
        s = self.series
        wins_a, wins_b = s.mean_series_score
        bold_a = wins_a >= wins_b
        score = (
            f"{'*' if bold_a else ''}{wins_a:.2f}{'*' if bold_a else ''} vs. "
            f"{'' if bold_a else '*'}{wins_b:.2f}{'' if bold_a else '*'}"
        )
        return (
            f"{self.team_a} vs {self.team_b}: series {score}, "
            f"margin {s.mean_margin:+.2f}, {self.team_a} game win "
            f"{100.0 * s.game_win_fraction_a:.1f}%"
        )


def head_to_head_table(
    model: EmbeddingModel, matchups, sims: int = 1000, possessions: int = 100,
    seed=0, registry=None,
) -> list[HeadToHeadRow]:
    """One simulated series per (team A, team B) pair.

    `matchups` is a list of ((name_a, lineup_a), (name_b, lineup_b));
    lineup entries may be ids, or names when a registry is given. Each
    pair runs on its own substream derived from (seed, pair index).
    """
    rows = []
    for index, ((name_a, raw_a), (name_b, raw_b)) in enumerate(matchups):
        lineup_a = registry.resolve_all(raw_a) if registry is not None else raw_a
        lineup_b = registry.resolve_all(raw_b) if registry is not None else raw_b
        series = simulate_series(
            model, lineup_a, lineup_b, sims=sims, possessions=possessions,
            seed=(seed, index),
        )
        rows.append(HeadToHeadRow(team_a=str(name_a), team_b=str(name_b), series=series))
    return rows


def most_frequent_lineups(plays, count: int | None = None):
    """Five-player lineups ranked by how often they appear in the plays,
    offense and defense appearances combined. Returns (lineup, count)
    pairs, ties broken by the lineup tuple."""
    counter: Counter[tuple[int, ...]] = Counter()
    for play in plays:
        counter[tuple(sorted(play.offense))] += 1
        counter[tuple(sorted(play.defense))] += 1
    ranked = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:count] if count is not None else ranked


def most_frequent_players(plays, count: int | None = None):
    """Player ids ranked by on-court appearances (either side)."""
    counter: Counter[int] = Counter()
    for play in plays:
        for pid in play.offense + play.defense:
            counter[pid] += 1
    ranked = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
    ids = [pid for pid, _ in ranked]
    return ids[:count] if count is not None else ids
