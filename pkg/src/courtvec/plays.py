"""Possession records and the play CSV format.

A play is one offensive possession: five offensive player ids, five
defensive player ids and a terminal outcome class. The normalized CSV
format is `game_id,seq,offense,defense,outcome` with lineups written as
five semicolon-joined ids.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

import numpy as np

from .errors import ArgumentError, LineupError, OutcomeError, ParseError, RegistryError
from .outcomes import N_OUTCOMES

_HEADER = ["game_id", "seq", "offense", "defense", "outcome"]


@dataclass(frozen=True, slots=True)
class Play:
    """One possession. Lineups keep their given order; consumers that
    need a canonical order sort for themselves (see MatchupKey)."""

    game_id: str
    seq: int
    offense: tuple[int, ...]
    defense: tuple[int, ...]
    outcome: int

    def __post_init__(self):
        if len(self.offense) != 5 or len(self.defense) != 5:
            raise LineupError(
                f"{self.game_id}#{self.seq}: need 5+5 players, got "
                f"{len(self.offense)}+{len(self.defense)}"
            )
        players = set(self.offense) | set(self.defense)
        if len(players) != 10:
            raise LineupError(f"{self.game_id}#{self.seq}: the 10 players are not distinct")
        if any(p < 0 for p in players):
            raise RegistryError(f"{self.game_id}#{self.seq}: negative player id")
        if not 0 <= self.outcome < N_OUTCOMES:
            raise OutcomeError(
                f"{self.game_id}#{self.seq}: outcome {self.outcome} outside [0, {N_OUTCOMES - 1}]"
            )
        if self.seq < 0:
            raise ParseError(f"{self.game_id}: negative seq {self.seq}")

    def normalized(self) -> "Play":
        """Copy with both lineups sorted ascending."""
        return replace(
            self,
            offense=tuple(sorted(self.offense)),
            defense=tuple(sorted(self.defense)),
        )


def _parse_lineup(field: str, lineno: int, side: str) -> tuple[int, ...]:
    parts = field.split(";")
    try:
        ids = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise ParseError(f"{side} lineup {field!r} is not semicolon-joined ids", line=lineno) from exc
    return ids


def parse_plays(source, registry=None) -> list[Play]:
    """Parse a normalized play CSV into a list of Play, in file order.

    When a registry is given, every player id must exist in it.
    """
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty play file") from None
    if [h.strip() for h in header] != _HEADER:
        raise ParseError(f"bad play header {header!r}, expected {_HEADER!r}", line=1)
    n_players = len(registry) if registry is not None else None
    plays = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 5:
            raise ParseError(f"expected 5 fields, got {len(row)}", line=lineno)
        game_id, seq_s, off_s, def_s, out_s = row
        try:
            seq = int(seq_s)
        except ValueError as exc:
            raise ParseError(f"seq {seq_s!r} is not an integer", line=lineno) from exc
        offense = _parse_lineup(off_s, lineno, "offense")
        defense = _parse_lineup(def_s, lineno, "defense")
        try:
            outcome = int(out_s)
        except ValueError as exc:
            raise ParseError(f"outcome {out_s!r} is not an integer", line=lineno) from exc
        try:
            play = Play(game_id, seq, offense, defense, outcome)
        except (LineupError, OutcomeError, RegistryError) as exc:
            raise type(exc)(f"line {lineno}: {exc}") from exc
        if n_players is not None:
            for p in play.offense + play.defense:
                if p >= n_players:
                    raise RegistryError(
                        f"line {lineno}: unknown player id {p} (registry size {n_players})"
                    )
        plays.append(play)
    return plays


def write_plays(plays, sink) -> None:
    """Serialize plays in the normalized CSV format (LF line endings)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_HEADER)
    for p in plays:
        writer.writerow(
            [p.game_id, p.seq, ";".join(map(str, p.offense)), ";".join(map(str, p.defense)), p.outcome]
        )
    _write_text(sink, buf.getvalue())


def normalize_plays(plays) -> list[Play]:
    """Sort each lineup ascending; the play order itself is preserved."""
    return [p.normalized() for p in plays]


def chronological_split(plays, holdout_games: int):
    """Split plays into (train, validation) by game.

    Validation receives every play from the final `holdout_games`
    distinct games, in the order games first appear in `plays`.
    """
    if holdout_games < 0:
        raise ArgumentError(f"holdout_games must be >= 0, got {holdout_games}")
    plays = list(plays)
    game_order = []
    seen = set()
    for p in plays:
        if p.game_id not in seen:
            seen.add(p.game_id)
            game_order.append(p.game_id)
    if holdout_games > len(game_order):
        raise ArgumentError(
            f"holdout_games {holdout_games} exceeds distinct game count {len(game_order)}"
        )
    if holdout_games == 0:
        return plays, []
    holdout = set(game_order[-holdout_games:])
    train = [p for p in plays if p.game_id not in holdout]
    validation = [p for p in plays if p.game_id in holdout]
    return train, validation


def plays_to_arrays(plays):
    """Convert plays to (lineups, outcomes) arrays for the model.

    lineups is (n, 10) int64 with offense in columns 0-4 and defense in
    columns 5-9, each side sorted ascending; outcomes is (n,) int64.
    """
    plays = list(plays)
    if not plays:
        raise ArgumentError("empty play sequence")
    lineups = np.empty((len(plays), 10), dtype=np.int64)
    outcomes = np.empty(len(plays), dtype=np.int64)
    for i, p in enumerate(plays):
        lineups[i, :5] = sorted(p.offense)
        lineups[i, 5:] = sorted(p.defense)
        outcomes[i] = p.outcome
    return lineups, outcomes


def _read_text(source) -> str:
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str) and "\n" in source:
        return source
    with open(source, "r", encoding="utf-8", newline="") as fh:
        return fh.read()


def _write_text(sink, text: str) -> None:
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
