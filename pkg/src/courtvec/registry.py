"""Player registry: id <-> name/position plus aggregate box metrics.

The registry is a dense table indexed by player id 0..n-1. Box metrics
(field goals, threes, assists, rebounds, plus-minus) and minutes feed the
per-minute correlation analysis; they play no role in model training.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .errors import ParseError, RegistryError, ResolutionError

POSITIONS = ("G", "F", "C", "G-F", "F-C")

_HEADER = [
    "player_id",
    "name",
    "position",
    "minutes",
    "fg_made",
    "threes_made",
    "assists",
    "rebounds",
    "plus_minus",
]

METRIC_FIELDS = ("fg_made", "threes_made", "assists", "rebounds", "plus_minus")


@dataclass(frozen=True, slots=True)
class PlayerRecord:
    player_id: int
    name: str
    position: str
    minutes: float
    fg_made: int
    threes_made: int
    assists: int
    rebounds: int
    plus_minus: int


class PlayerRegistry:
    """Dense id-indexed table of PlayerRecord entries."""

    def __init__(self, records):
        records = sorted(records, key=lambda r: r.player_id)
        ids = [r.player_id for r in records]
        seen = set()
        for pid in ids:
            if pid in seen:
                raise RegistryError(f"duplicate player id {pid}")
            seen.add(pid)
        if ids != list(range(len(ids))):
            raise RegistryError(
                f"player ids must be dense 0..{len(ids) - 1}, got {ids[:10]}..."
            )
        for r in records:
            if r.position not in POSITIONS:
                raise RegistryError(
                    f"player {r.player_id}: position {r.position!r} not one of {POSITIONS}"
                )
            if r.minutes < 0:
                raise RegistryError(f"player {r.player_id}: negative minutes {r.minutes}")
            for field in ("fg_made", "threes_made", "assists", "rebounds"):
                if getattr(r, field) < 0:
                    raise RegistryError(
                        f"player {r.player_id}: negative {field} {getattr(r, field)}"
                    )
        self._records = tuple(records)
        self._by_name = {}
        for r in records:
            self._by_name.setdefault(r.name, []).append(r.player_id)

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __getitem__(self, player_id):
        return self.get(player_id)

    @property
    def size(self):
        return len(self._records)

    def get(self, player_id):
        pid = int(player_id)
        if not 0 <= pid < len(self._records):
            raise RegistryError(f"unknown player id {pid} (registry size {len(self._records)})")
        return self._records[pid]

    def __contains__(self, player_id):
        return 0 <= int(player_id) < len(self._records)

    def resolve(self, name_or_id):
        """Resolve an id (int or digit string) or an exact name to an id."""
        if isinstance(name_or_id, int):
            return self.get(name_or_id).player_id
        text = str(name_or_id).strip()
        if text.lstrip("-").isdigit():
            return self.get(int(text)).player_id
        ids = self._by_name.get(text)
        if not ids:
            raise ResolutionError([text])
        if len(ids) > 1:
            raise ResolutionError([f"{text} (ambiguous: ids {ids})"])
        return ids[0]

    def resolve_all(self, names_or_ids):
        unknown, out = [], []
        for item in names_or_ids:
            try:
                out.append(self.resolve(item))
            except (ResolutionError, RegistryError):
                unknown.append(str(item))
        if unknown:
            raise ResolutionError(unknown)
        return out


def build_registry(source) -> PlayerRegistry:
    """Parse a player CSV (see module docs for the column list).

    `source` may be a path, a text/bytes file object, or a str/bytes blob.
    """
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty player file") from None
    if [h.strip() for h in header] != _HEADER:
        raise ParseError(f"bad player header {header!r}, expected {_HEADER!r}", line=1)
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(_HEADER):
            raise ParseError(f"expected {len(_HEADER)} fields, got {len(row)}", line=lineno)
        try:
            records.append(
                PlayerRecord(
                    player_id=int(row[0]),
                    name=row[1],
                    position=row[2].strip(),
                    minutes=float(row[3]),
                    fg_made=int(row[4]),
                    threes_made=int(row[5]),
                    assists=int(row[6]),
                    rebounds=int(row[7]),
                    plus_minus=int(row[8]),
                )
            )
        except ValueError as exc:
            raise ParseError(f"bad field value: {exc}", line=lineno) from exc
    return PlayerRegistry(records)


def write_registry(registry: PlayerRegistry, sink) -> None:
    """Write the registry in the canonical player CSV format."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_HEADER)
    for r in registry:
        minutes = format(r.minutes, "g")
        writer.writerow(
            [r.player_id, r.name, r.position, minutes, r.fg_made, r.threes_made,
             r.assists, r.rebounds, r.plus_minus]
        )
    _write_text(sink, buf.getvalue())


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
