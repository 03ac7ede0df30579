"""K-L divergence validation of predicted outcome distributions.

Per lineup-matchup, the empirical outcome distribution of held-out plays
is compared against the model prediction. Reported divergences use base
2 ("bits"); the training loss elsewhere stays in nats. Matchups with 15
or fewer plays are skipped by default: too few samples make the
empirical distribution meaningless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, SupportError
from .network import EmbeddingModel, forward_batch
from .outcomes import N_OUTCOMES
from .validation import seed_key


@dataclass(frozen=True)
class MatchupKey:
    """Unordered lineups, ordered roles: offense vs defense. The same ten
    players with roles swapped form a different key."""

    offense: tuple[int, ...]
    defense: tuple[int, ...]

    @classmethod
    def from_play(cls, play):
        return cls(tuple(sorted(play.offense)), tuple(sorted(play.defense)))

    def row(self) -> tuple[int, ...]:
        return self.offense + self.defense


@dataclass(frozen=True)
class EmpiricalDistribution:
    counts: np.ndarray   # (23,) non-negative ints
    total: int
    p: np.ndarray        # counts / total

    @classmethod
    def from_outcomes(cls, outcomes) -> "EmpiricalDistribution":
        outcomes = np.asarray(outcomes, dtype=np.int64)
        if outcomes.size == 0:
            raise ArgumentError("cannot build an empirical distribution from zero plays")
        if outcomes.min() < 0 or outcomes.max() >= N_OUTCOMES:
            raise ArgumentError("outcome class outside [0, 22]")
        counts = np.bincount(outcomes, minlength=N_OUTCOMES)
        total = int(counts.sum())
        return cls(counts=counts, total=total, p=counts / total)


def empirical_distribution(plays) -> EmpiricalDistribution:
    """Normalized outcome counts for a group of plays (one matchup)."""
    plays = list(plays)
    if not plays:
        raise ArgumentError("cannot build an empirical distribution from zero plays")
    return EmpiricalDistribution.from_outcomes([p.outcome for p in plays])


def _as_distribution(dist) -> np.ndarray:
    if isinstance(dist, EmpiricalDistribution):
        return dist.p
    return np.asarray(dist, dtype=np.float64)


def kl_divergence(p, q, base=2) -> float:
    """D(p || q) = sum over p's support of p * log_base(p / q).

    Terms where p is zero contribute nothing. Mass of p on a zero of q
    means the divergence is infinite, reported as SupportError rather
    than a float.
    """
    pv = _as_distribution(p)
    qv = _as_distribution(q)
    if pv.shape != qv.shape:
        raise ArgumentError(f"shape mismatch: {pv.shape} vs {qv.shape}")
    if base not in (2, math.e):
        raise ArgumentError("base must be 2 or math.e")
    support = pv > 0
    if np.any(qv[support] <= 0):
        bad = int(np.nonzero(support & (qv <= 0))[0][0])
        raise SupportError(f"p[{bad}] > 0 but q[{bad}] = 0: divergence is infinite")
    ratio = pv[support] / qv[support]
    log = np.log2(ratio) if base == 2 else np.log(ratio)
    return float(np.dot(pv[support], log))


def group_by_matchup(plays) -> dict[MatchupKey, np.ndarray]:
    """Outcome arrays per matchup, keys sorted for deterministic output
    regardless of play order."""
    groups: dict[MatchupKey, list[int]] = {}
    for play in plays:
        groups.setdefault(MatchupKey.from_play(play), []).append(play.outcome)
    return {
        key: np.asarray(groups[key], dtype=np.int64)
        for key in sorted(groups, key=lambda k: k.row())
    }


@dataclass(frozen=True)
class MatchupResult:
    key: MatchupKey
    plays: int
    kl_bits: float


@dataclass(frozen=True)
class ValidationReport:
    """Per-matchup divergences plus their mean and sample standard
    deviation. Empty when no matchup clears the play-count filter."""

    results: tuple[MatchupResult, ...]
    min_plays: int
    mean_kl: float | None
    std_kl: float | None

    @property
    def empty(self) -> bool:
        return not self.results

    def to_dict(self):
        return {
            "min_plays": self.min_plays,
            "qualifying_matchups": len(self.results),
            "mean_kl_bits": self.mean_kl,
            "std_kl_bits": self.std_kl,
            "matchups": [
                {
                    "offense": list(r.key.offense),
                    "defense": list(r.key.defense),
                    "plays": r.plays,
                    "kl_bits": r.kl_bits,
                }
                for r in self.results
            ],
        }


def validate_matchups(model: EmbeddingModel, plays, min_plays: int = 15) -> ValidationReport:
    """Base-2 K-L divergence of each qualifying matchup's empirical
    distribution from the model prediction.

    Qualifying means strictly more than `min_plays` plays. The report is
    invariant to the order of the input plays.
    """
    groups = group_by_matchup(plays)
    keys = [k for k, outcomes in groups.items() if outcomes.size > min_plays]
    if not keys:
        return ValidationReport(results=(), min_plays=min_plays, mean_kl=None, std_kl=None)
    rows = np.array([k.row() for k in keys], dtype=np.int64)
    predicted = forward_batch(model, rows)
    results = []
    for i, key in enumerate(keys):
        emp = EmpiricalDistribution.from_outcomes(groups[key])
        results.append(MatchupResult(key, emp.total, kl_divergence(emp, predicted[i], base=2)))
    values = np.array([r.kl_bits for r in results])
    std = float(values.std(ddof=1)) if values.size > 1 else None
    return ValidationReport(
        results=tuple(results),
        min_plays=min_plays,
        mean_kl=float(values.mean()),
        std_kl=std,
    )


def uniform_baseline(plays, min_plays: int = 15):
    """Mean K-L (bits) of the same qualifying groups against a uniform
    prediction; the reference point for "did the model learn anything"."""
    groups = group_by_matchup(plays)
    uniform = np.full(N_OUTCOMES, 1.0 / N_OUTCOMES)
    values = [
        kl_divergence(EmpiricalDistribution.from_outcomes(outcomes), uniform, base=2)
        for outcomes in groups.values()
        if outcomes.size > min_plays
    ]
    return float(np.mean(values)) if values else None


def kl_vs_plays_curve(model: EmbeddingModel, plays, max_n: int, trials: int, seed: int):
    """Mean K-L (bits) between an n-play empirical subsample and the
    model prediction, for n = 1..max_n.

    Each trial picks a qualifying matchup (one with at least max_n
    plays), draws a random permutation of its outcomes, and evaluates
    every prefix: the n-play subsample is therefore a uniform draw
    without replacement for every n, and the noise is shared across n,
    which keeps the averaged curve smooth.
    """
    if max_n < 1:
        raise ArgumentError(f"max_n must be >= 1, got {max_n}")
    if trials < 1:
        raise ArgumentError(f"trials must be >= 1, got {trials}")
    groups = group_by_matchup(plays)
    keys = [k for k, outcomes in groups.items() if outcomes.size >= max_n]
    if not keys:
        largest = max((o.size for o in groups.values()), default=0)
        raise ArgumentError(
            f"max_n {max_n} exceeds the largest matchup group ({largest} plays)"
        )
    rows = np.array([k.row() for k in keys], dtype=np.int64)
    predicted = forward_batch(model, rows)
    log_q = np.log2(predicted)

    rng = np.random.default_rng(seed_key(seed))
    sums = np.zeros(max_n)
    for _ in range(trials):
        gi = int(rng.integers(len(keys)))
        drawn = rng.permutation(groups[keys[gi]])[:max_n]
        counts = np.zeros(N_OUTCOMES)
        for n in range(1, max_n + 1):
            counts[drawn[n - 1]] += 1.0
            p = counts / n
            support = p > 0
            sums[n - 1] += float(
                np.dot(p[support], np.log2(p[support]) - log_q[gi, support])
            )
    means = sums / trials
    return [(n, float(means[n - 1])) for n in range(1, max_n + 1)]
