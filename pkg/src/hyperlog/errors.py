"""Error taxonomy shared by every module.

Each error carries a stable ``kind`` string (the class name) so the service
layer and the CLI can map failures onto exit codes without string-matching
messages.  Degeneracy during *specialization* is deliberately not an
exception: it is returned as a value, because degenerate terms must be
detected and pair-cancelled, not aborted on.
"""

from __future__ import annotations


class HyperlogError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class DegenerateArgument(HyperlogError):
    """An argument hit a forbidden value (0, 1, coincident points, ...)."""


class DivergentTerm(HyperlogError):
    """An iterated integral violates the endpoint convergence condition."""


class BranchAmbiguity(HyperlogError):
    """Numeric evaluation was requested on the branch cut [1, oo)."""


class PathError(HyperlogError):
    """An integration path runs too close to a singularity."""


class InvalidDiscriminant(HyperlogError):
    """The integer is not a fundamental quadratic discriminant."""


class DegenerateWitness(HyperlogError):
    """A numeric witness value vanishes, so no reconstruction is possible."""


class ExprParseError(HyperlogError):
    """The expression text does not match the mini-grammar."""
