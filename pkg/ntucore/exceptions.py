# -*- coding: utf-8 -*-

"""
Error types raised by the ntucore package.

Every error derives from NtuError and from the closest builtin exception,
so callers may catch either.
"""


class NtuError(Exception):
    """Base class for ntucore errors.

    Arguments:
        message: Human readable message
        detail: Optional dict with structured diagnostic information
    """

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class EmptyCoalition(NtuError, ValueError):
    """A coalition must contain at least one player"""


class DimensionMismatch(NtuError, ValueError):
    """Vector or matrix dimensions are inconsistent"""


class InvalidGame(NtuError, ValueError):
    """Game data violates a model invariant"""


class TooManyPlayers(NtuError, ValueError):
    """An exhaustive procedure was asked to enumerate too many coalitions"""


class TooManyGoods(NtuError, ValueError):
    """A grid procedure was asked to sweep too many goods"""


class NumericalBreakdown(NtuError, ArithmeticError):
    """The LP engine lost numerical control (ill-conditioned basis)"""

    def __init__(self, message, detail=None, trajectory=None):
        super().__init__(message, detail=detail)
        self.trajectory = trajectory


class SingularBasis(NumericalBreakdown):
    """The basis matrix is singular"""


class PointNotInterior(NtuError, ValueError):
    """A point is not strictly interior to the set it must be interior to"""


class AllRaysInterior(NtuError, RuntimeError):
    """Every tableau ray stays inside the set: no intersection cut exists"""


class NonPositiveIncumbentUtility(NtuError, ValueError):
    """Multiplicative objections need strictly positive incumbent utilities"""


class TimeBudgetExceeded(NtuError, TimeoutError):
    """A search ran out of time; the best incumbent found is attached"""

    def __init__(self, message, incumbent=None, detail=None):
        super().__init__(message, detail=detail)
        self.incumbent = incumbent


class BadMoments(NtuError, ValueError):
    """Cyclic family moments must be strictly increasing and greater than one"""


class BadInstance(NtuError, ValueError):
    """A three-dimensional matching instance is malformed"""


class NegativeDistance(NtuError, ValueError):
    """Distances must be nonnegative"""


class EmptyScenario(NtuError, ValueError):
    """A transit scenario yields no rider with a nonzero valuation"""


class ParseError(NtuError, ValueError):
    """Serialized data could not be parsed

    Arguments:
        message: Human readable message
        field: Name of the offending field (if known)
        line: Line number of the offending record (if known)
    """

    def __init__(self, message, field=None, line=None, detail=None):
        super().__init__(message, detail=detail)
        self.field = field
        self.line = line
