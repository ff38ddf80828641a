"""Exception hierarchy.

Every failure mode has its own class so callers (and the CLI) can tell
input errors apart from internal consistency failures.
"""

from __future__ import annotations


class TametoriError(Exception):
    """Base class for all errors raised by the package."""


class InputError(TametoriError):
    """The caller supplied data that cannot be processed (CLI exit code 2)."""


class CheckError(TametoriError):
    """An internal consistency check failed (CLI exit code 1)."""


# --- input errors -------------------------------------------------------


class InvalidCartan(InputError):
    pass


class InvalidLattice(InputError):
    pass


class TamenessViolation(InputError):
    pass


class IncompatibleTwists(InputError):
    pass


class UnsupportedTwist(InputError):
    pass


class UnsupportedType(InputError):
    pass


class UnsupportedConfiguration(InputError):
    pass


class GroupTooLarge(InputError):
    pass


class RankTooLarge(InputError):
    pass


class PreconditionFailed(InputError):
    pass


class NotDefinedOverK(InputError):
    """The twisted class is not stable under Frobenius composed with the norm map."""


class BadKernel(InputError):
    pass


class SpecError(InputError):
    """A group-spec document could not be parsed or validated."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


# --- algebraic failures -------------------------------------------------


class InfiniteCokernel(TametoriError):
    pass


class NonElliptic(TametoriError):
    pass


class IllDefinedEndo(TametoriError):
    pass


class NonTorsion(TametoriError):
    pass


class NotGaloisStable(TametoriError):
    pass


class NoSolution(CheckError):
    pass


# --- internal consistency failures -------------------------------------


class DecodingFailure(CheckError):
    pass


class NoMatch(CheckError):
    pass


class AmbiguousMatch(CheckError):
    def __init__(self, message: str, matches=()):
        self.matches = tuple(matches)
        super().__init__(message)


class NFNotFound(CheckError):
    pass


class CheckFailed(CheckError):
    pass
