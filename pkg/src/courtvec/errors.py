"""Exception hierarchy.

Everything raised on purpose derives from CourtVecError. The CLI maps
DataError (and ArgumentError) to exit code 2 and RuntimeFailure to exit
code 3; argparse usage problems exit 1 before any of these are reached.
"""


class CourtVecError(Exception):
    """Base class for all courtvec errors."""


class ArgumentError(CourtVecError):
    """A caller-supplied argument violates an operation's preconditions."""


class DataError(CourtVecError):
    """Input data (files, rows, ids) violates the documented contracts."""


class ParseError(DataError):
    """Malformed row or header in a CSV input."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class LineupError(DataError):
    """A lineup does not consist of 5 distinct valid players, or two
    lineups overlap."""


class RegistryError(DataError):
    """Player registry problem: unknown id, duplicate id, sparse ids,
    or an invalid field value."""


class OutcomeError(DataError):
    """Outcome class outside the 23-class taxonomy."""


class RulesError(DataError):
    """Malformed outcome-mapping rules file."""


class UnmappedEventError(DataError):
    """A raw event matched no mapping rule."""

    def __init__(self, description):
        super().__init__(f"no outcome rule matches event: {description!r}")
        self.description = description


class ResolutionError(DataError):
    """Player names that could not be resolved against the registry."""

    def __init__(self, names):
        super().__init__("unknown player name(s): " + ", ".join(repr(n) for n in names))
        self.names = list(names)


class CheckpointError(DataError):
    """Bad checkpoint file: magic, version, dimensions, size, or CRC."""


class DegenerateDimensionError(DataError):
    """A zero-variance embedding column cannot be standardized."""

    def __init__(self, column):
        super().__init__(f"embedding dimension {column} has zero variance")
        self.column = column


class RuntimeFailure(CourtVecError):
    """The computation itself failed (as opposed to bad inputs)."""


class DivergenceError(RuntimeFailure):
    """Training produced a non-finite loss."""

    def __init__(self, step, loss):
        super().__init__(f"non-finite loss ({loss!r}) at optimizer step {step}")
        self.step = step


class DegenerateModelError(RuntimeFailure):
    """A simulated game could not be decided within the overtime bound."""


class SupportError(RuntimeFailure):
    """K-L divergence is infinite: p puts mass where q has none."""
