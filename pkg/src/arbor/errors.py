"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: parse and usage problems exit 1,
capacity problems exit 2, internal-consistency failures exit 3.
"""

from __future__ import annotations


class ArborError(Exception):
    exit_code = 1


class ParseError(ArborError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class UndefinedGeneratorError(ParseError):
    pass


class InvalidInputError(ArborError):
    """Bad arguments: letters out of range, arity mismatch and similar."""


class CapacityError(ArborError):
    """A configured bound (depth, points, group order) would be exceeded."""

    exit_code = 2


class DepthError(CapacityError):
    """Something needed more depth than a portrait cap or the max depth allows."""


class NotTransitiveError(ArborError):
    def __init__(self, level: int, orbit: int, width: int):
        self.level = level
        self.orbit = orbit
        self.width = width
        super().__init__(
            f"action is not transitive on level {level}: orbit of the basepoint vertex "
            f"has {orbit} of {width} vertices"
        )


class ConsistencyError(ArborError):
    """An internal invariant failed. This is a bug signal, never user error."""

    exit_code = 3
