"""Raw event -> outcome class mapping.

Raw play-by-play feeds describe plays in free text ("Driving Layup Shot",
"26' 3PT Jump Shot"). A rule set collapses those descriptions into the
23-class taxonomy. Rules are ordered and the first match wins; rows that
describe non-possession events (rebounds, blocks, substitutions, ...) are
matched by drop patterns, counted and discarded during ingest.

Rules file format, one rule per line:

    pattern|made_flag|ft_spec|class

pattern    substring matched case-insensitively ("*" matches anything)
made_flag  made | missed | -        (- means don't care)
ft_spec    - | none | MADE/ATTEMPTED e.g. 1/2
class      0..22, or `drop`

Blank lines and lines starting with `#` are ignored.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources

from .errors import RulesError, UnmappedEventError
from .outcomes import N_OUTCOMES


@dataclass(frozen=True, slots=True)
class RawEvent:
    """One raw play description plus its shot/free-throw context."""

    description: str
    made: bool | None = None
    ft_made: int = 0
    ft_attempted: int = 0


@dataclass(frozen=True, slots=True)
class Rule:
    pattern: str          # lowercase substring; "" matches anything
    made: bool | None     # None = don't care
    ft: tuple[int, int] | None  # None = don't care; (made, attempted) otherwise
    outcome: int

    def matches(self, event: RawEvent) -> bool:
        if self.pattern and self.pattern not in event.description.lower():
            return False
        if self.made is not None and event.made is not self.made:
            return False
        if self.ft is not None and self.ft != (event.ft_made, event.ft_attempted):
            return False
        return True


class OutcomeMapping:
    """Ordered mapping rules plus drop patterns for non-possession rows."""

    def __init__(self, rules, drop_patterns=()):
        rules = list(rules)
        if not rules:
            raise RulesError("empty rule set")
        for r in rules:
            if not 0 <= r.outcome < N_OUTCOMES:
                raise RulesError(f"rule target class {r.outcome} outside [0, {N_OUTCOMES - 1}]")
        self.rules = tuple(rules)
        self.drop_patterns = tuple(p.lower() for p in drop_patterns)

    def should_drop(self, event: RawEvent) -> bool:
        desc = event.description.lower()
        return any(p in desc for p in self.drop_patterns)

    def map(self, event: RawEvent) -> int:
        for rule in self.rules:
            if rule.matches(event):
                return rule.outcome
        raise UnmappedEventError(event.description)


def map_raw_outcome(event: RawEvent, mapping: OutcomeMapping) -> int:
    """Class of the first matching rule; UnmappedEventError otherwise."""
    return mapping.map(event)


def _parse_made(token: str, lineno: int) -> bool | None:
    token = token.strip().lower()
    if token in ("-", ""):
        return None
    if token == "made":
        return True
    if token == "missed":
        return False
    raise RulesError(f"line {lineno}: bad made flag {token!r}")


def _parse_ft(token: str, lineno: int):
    token = token.strip().lower()
    if token in ("-", ""):
        return None
    if token == "none":
        return (0, 0)
    try:
        made_s, att_s = token.split("/")
        made, att = int(made_s), int(att_s)
    except ValueError as exc:
        raise RulesError(f"line {lineno}: bad ft spec {token!r}") from exc
    if not 0 <= made <= att:
        raise RulesError(f"line {lineno}: impossible ft spec {token!r}")
    return (made, att)


def parse_rules(source) -> OutcomeMapping:
    """Parse a rules file (path, file object or text blob)."""
    text = _read_text(source)
    rules, drops = [], []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 4:
            raise RulesError(f"line {lineno}: expected 4 |-separated fields, got {len(parts)}")
        pattern = parts[0].strip().lower()
        if pattern == "*":
            pattern = ""
        made = _parse_made(parts[1], lineno)
        ft = _parse_ft(parts[2], lineno)
        target = parts[3].strip().lower()
        if target == "drop":
            drops.append(pattern)
            continue
        try:
            outcome = int(target)
        except ValueError as exc:
            raise RulesError(f"line {lineno}: bad class {target!r}") from exc
        if not 0 <= outcome < N_OUTCOMES:
            raise RulesError(f"line {lineno}: class {outcome} outside [0, {N_OUTCOMES - 1}]")
        rules.append(Rule(pattern, made, ft, outcome))
    if not rules:
        raise RulesError("rules file defines no mapping rules")
    return OutcomeMapping(rules, drops)


def default_mapping() -> OutcomeMapping:
    """The shipped rule set (data file `default_rules.txt`)."""
    text = resources.files("courtvec").joinpath("default_rules.txt").read_text("utf-8")
    return parse_rules(text)


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
