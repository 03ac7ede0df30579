"""The 23-class possession outcome taxonomy.

Every possession ends in exactly one of these classes. Classes 0-3 are
mid-range jumpers, 4-7 close-range shots, 8-16 free-throw-only endings,
17-20 three-pointers, 21 turnovers and 22 fouls.
"""

N_OUTCOMES = 23

OUTCOME_LABELS = (
    "Mid-range jump shot made",
    "Mid-range jump shot missed",
    "Mid-range jump shot made + 1 free throw made",
    "Mid-range jump shot made + 1 free throw missed",
    "Close-range shot made",
    "Close-range shot missed",
    "Close-range shot made + 1 free throw made",
    "Close-range shot made + 1 free throw missed",
    "0/1 free throws made",
    "1/1 free throws made",
    "0/2 free throws made",
    "1/2 free throws made",
    "2/2 free throws made",
    "0/3 free throws made",
    "1/3 free throws made",
    "2/3 free throws made",
    "3/3 free throws made",
    "3PT shot made",
    "3PT shot missed",
    "3PT shot made + 1 free throw made",
    "3PT shot made + 1 free throw missed",
    "Turnover",
    "Foul",
)

# Points scored by the offense for each class, forced by basketball
# scoring rules. Class 22 (foul) ends the possession scoreless.
OUTCOME_POINTS = (2, 0, 3, 2, 2, 0, 3, 2, 0, 1, 0, 1, 2, 0, 1, 2, 3, 3, 0, 4, 3, 0, 0)

# Section grouping used by plot/UI layers.
OUTCOME_SECTIONS = (
    ("Mid-range", (0, 1, 2, 3)),
    ("Close-range", (4, 5, 6, 7)),
    ("Free throws", (8, 9, 10, 11, 12, 13, 14, 15, 16)),
    ("Three-pointers", (17, 18, 19, 20)),
    ("Other", (21, 22)),
)

MADE_FG_CLASSES = frozenset({0, 2, 3, 4, 6, 7, 17, 19, 20})
MADE_THREE_CLASSES = frozenset({17, 19, 20})
MISSED_SHOT_CLASSES = frozenset({1, 5, 18})


def check_outcome(outcome):
    """Return `outcome` as an int, raising OutcomeError if out of range."""
    from .errors import OutcomeError

    value = int(outcome)
    if not 0 <= value < N_OUTCOMES:
        raise OutcomeError(f"outcome class {value} outside [0, {N_OUTCOMES - 1}]")
    return value
