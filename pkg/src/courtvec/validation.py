"""Input validation helpers shared by the estimator, simulation and
service layers."""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError, LineupError, RegistryError

PLAYERS_PER_SIDE = 5


def check_lineup(ids, *, n_players=None, side="lineup"):
    """Validate one lineup and return it as a sorted 5-tuple of ints.

    Raises LineupError for wrong size or duplicates, RegistryError for
    ids outside [0, n_players) when n_players is given.
    """
    try:
        players = [int(p) for p in ids]
    except (TypeError, ValueError) as exc:
        raise LineupError(f"{side}: player ids must be integers: {ids!r}") from exc
    if len(players) != PLAYERS_PER_SIDE:
        raise LineupError(f"{side}: expected {PLAYERS_PER_SIDE} players, got {len(players)}")
    if len(set(players)) != PLAYERS_PER_SIDE:
        raise LineupError(f"{side}: duplicate player ids in {sorted(players)}")
    for p in players:
        if p < 0:
            raise RegistryError(f"{side}: negative player id {p}")
        if n_players is not None and p >= n_players:
            raise RegistryError(f"{side}: unknown player id {p} (registry size {n_players})")
    return tuple(sorted(players))


def check_matchup(offense, defense, *, n_players=None):
    """Validate an (offense, defense) pair: 5 + 5 distinct players."""
    off = check_lineup(offense, n_players=n_players, side="offense")
    deff = check_lineup(defense, n_players=n_players, side="defense")
    overlap = set(off) & set(deff)
    if overlap:
        raise LineupError(f"players on both sides: {sorted(overlap)}")
    return off, deff


def as_lineup_matrix(X, *, n_players=None):
    """Coerce X to an (n, 10) int array of [offense | defense] ids and
    validate every row."""
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] != 2 * PLAYERS_PER_SIDE:
        raise ArgumentError(f"expected an (n, 10) array of player ids, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.asarray(arr, dtype=np.int64)
        if arr.dtype.kind == "f" and not np.array_equal(rounded, arr):
            raise ArgumentError("player ids must be integers")
        arr = rounded
    arr = arr.astype(np.int64, copy=False)
    if arr.size:
        if arr.min() < 0:
            raise RegistryError("negative player id in lineup matrix")
        if n_players is not None and arr.max() >= n_players:
            raise RegistryError(
                f"unknown player id {int(arr.max())} (registry size {n_players})"
            )
        both = np.sort(arr, axis=1)
        if (both[:, 1:] == both[:, :-1]).any():
            bad = int(np.nonzero((both[:, 1:] == both[:, :-1]).any(axis=1))[0][0])
            raise LineupError(f"row {bad}: the 10 players are not distinct")
    return arr


def check_positive_int(value, name, minimum=1):
    try:
        v = int(value)
    except (TypeError, ValueError) as exc:
        raise ArgumentError(f"{name} must be an integer, got {value!r}") from exc
    if v < minimum:
        raise ArgumentError(f"{name} must be >= {minimum}, got {v}")
    return v


def seed_key(seed):
    """Normalize a (possibly negative) integer or tuple seed into a tuple
    of non-negative ints usable as SeedSequence entropy."""
    if isinstance(seed, (tuple, list)):
        parts = []
        for s in seed:
            parts.extend(seed_key(s))
        return tuple(parts)
    return (int(seed) & 0xFFFFFFFFFFFFFFFF,)


def derived_rng(seed, *stream):
    """Deterministic substream generator for (seed, *stream) keys."""
    return np.random.default_rng(seed_key(seed) + tuple(int(s) for s in stream))
