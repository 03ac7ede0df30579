"""The 5th-man optimizer: fix four players and an opponent, rank every
candidate fifth player by simulated series results.

All candidates run on the same base seed, i.e. common random numbers:
candidates with identical embedding rows produce exactly identical rows,
and Monte Carlo noise largely cancels out of the comparison.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ArgumentError, LineupError
from .network import EmbeddingModel
from .simulation import SeriesResult, simulate_series
from .validation import check_lineup, check_positive_int


@dataclass(frozen=True)
class FifthManQuery:
    fixed_four: tuple[int, ...]
    opponent: tuple[int, ...]
    candidates: tuple[int, ...]
    sims: int = 1000
    possessions: int = 100
    seed: int = 0

    def __post_init__(self):
        fixed = tuple(int(p) for p in self.fixed_four)
        if len(fixed) != 4 or len(set(fixed)) != 4:
            raise LineupError(f"fixed_four must be 4 distinct ids, got {self.fixed_four!r}")
        opponent = check_lineup(self.opponent, side="opponent")
        placed = set(fixed) | set(opponent)
        candidates = tuple(int(c) for c in self.candidates)
        if not candidates:
            raise ArgumentError("candidate list is empty")
        if len(set(candidates)) != len(candidates):
            raise ArgumentError("duplicate ids in candidate list")
        overlap = sorted(set(candidates) & placed)
        if overlap:
            raise LineupError(f"candidates overlap placed players: {overlap}")
        check_positive_int(self.sims, "sims")
        check_positive_int(self.possessions, "possessions")
        object.__setattr__(self, "fixed_four", fixed)
        object.__setattr__(self, "opponent", opponent)
        object.__setattr__(self, "candidates", candidates)


@dataclass(frozen=True)
class CandidateRow:
    candidate: int
    win_pct: float           # game win percentage for the completed lineup
    mean_margin: float
    margin_std: float
    series: SeriesResult = field(repr=False)

    def to_dict(self):
        return {
            "candidate": self.candidate,
            "win_pct": self.win_pct,
            "mean_margin": self.mean_margin,
            "margin_std": self.margin_std,
            "series_win_fraction": self.series.team_a_series_win_fraction,
            "mean_series_score": list(self.series.mean_series_score),
        }


def rank_fifth_man(model: EmbeddingModel, query: FifthManQuery, threads: int = 1):
    """Rows sorted by game win % descending, ties by mean margin
    descending, then by candidate id.

    Every row is reproducible by simulate_series(model, fixed_four +
    [candidate], opponent, sims, possessions, seed=query.seed).
    """

    def run(candidate: int) -> CandidateRow:
        lineup = tuple(sorted(query.fixed_four + (candidate,)))
        series = simulate_series(
            model, lineup, query.opponent,
            sims=query.sims, possessions=query.possessions, seed=query.seed,
        )
        return CandidateRow(
            candidate=candidate,
            win_pct=100.0 * series.game_win_fraction_a,
            mean_margin=series.mean_margin,
            margin_std=series.margin_std,
            series=series,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, query.candidates))
    else:
        rows = [run(c) for c in query.candidates]
    rows.sort(key=lambda r: (-r.win_pct, -r.mean_margin, r.candidate))
    return rows
