# -*- coding: utf-8 -*-

"""
Polyhedra given by explicit rows and variable bounds.

A ConstraintSystem is the carrier for design spaces X(S), design-utility
spaces Z(S), lifted utility spaces U'(S) and the evolving relaxation P'.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ntucore.exceptions import DimensionMismatch

logger = logging.getLogger('ntucore')

SENSES = ('<=', '>=', '==')


@dataclass(frozen=True)
class VariableLayout:
    """Column layout of a design-utility vector (x, u[, w])"""

    goods: int
    players: int
    extra: int = 0

    @property
    def size(self):
        return self.goods + self.players + self.extra

    @property
    def u_offset(self):
        return self.goods

    @property
    def w_index(self):
        """Index of the first extra variable (the maximin epigraph variable)"""
        if self.extra == 0:
            return None
        return self.goods + self.players

    def xSlice(self):
        return slice(0, self.goods)

    def uSlice(self):
        return slice(self.goods, self.goods + self.players)

    def names(self):
        names = [f"x{j}" for j in range(self.goods)]
        names += [f"u{i}" for i in range(self.players)]
        names += ["w" if k == 0 else f"w{k}" for k in range(self.extra)]
        return names


class ConstraintSystem(object):
    """ A polyhedron {z : rows, lower <= z <= upper}

    Rows are stored as (coefficients, sense, rhs) with sense one of '<=', '>=', '=='.
    Instances are immutable: the with* methods return new systems.
    """

    def __init__(self, size, rows=(), lower=None, upper=None, names=None):
        """ Construct a ConstraintSystem.

        Args:
            size - number of variables
            rows - iterable of (coefficients, sense, rhs)
            lower - lower bounds (default: 0 for every variable)
            upper - upper bounds (default: +inf for every variable)
            names - optional variable names
        """

        self.size = int(size)

        self.lower = np.zeros(self.size) if lower is None else np.array(lower, dtype=float)
        self.upper = np.full(self.size, np.inf) if upper is None else np.array(upper, dtype=float)

        if self.lower.shape != (self.size,) or self.upper.shape != (self.size,):
            raise DimensionMismatch(f"Bounds must have length {self.size}")

        if np.any(self.lower > self.upper):
            bad = int(np.flatnonzero(self.lower > self.upper)[0])
            raise ValueError(f"Variable {bad} has lower bound {self.lower[bad]} above upper bound {self.upper[bad]}")

        checked = []

        for coefficients, sense, rhs in rows:
            coefficients = np.array(coefficients, dtype=float)

            if coefficients.shape != (self.size,):
                raise DimensionMismatch(f"Row has {coefficients.size} coefficients, expected {self.size}")

            if sense not in SENSES:
                raise ValueError(f"Unknown row sense '{sense}'")

            checked.append((coefficients, sense, float(rhs)))

        self.rows = tuple(checked)

        if names is None:
            names = [f"z{j}" for j in range(self.size)]

        self.names = list(names)

    @property
    def variableCount(self):
        return self.size

    @property
    def rowCount(self):
        return len(self.rows)

    def _copyArgs(self):
        return dict(
            size=self.size,
            rows=self.rows,
            lower=self.lower,
            upper=self.upper,
            names=self.names,
        )

    def withRow(self, coefficients, sense, rhs):
        """Return a new system with one more row"""
        return self.withRows([(coefficients, sense, rhs)])

    def withRows(self, rows):
        """Return a new system with additional rows"""

        args = self._copyArgs()
        args['rows'] = self.rows + tuple(rows)

        return self.__class__(**args)

    def withBounds(self, lower=None, upper=None):
        """Return a new system with replaced variable bounds"""

        args = self._copyArgs()

        if lower is not None:
            args['lower'] = lower

        if upper is not None:
            args['upper'] = upper

        return self.__class__(**args)

    def matrix(self):
        """Return the row coefficients as a dense (rows x size) array"""

        if not self.rows:
            return np.zeros((0, self.size))

        return np.vstack([row[0] for row in self.rows])

    def slacks(self, point):
        """Return the signed slack of every row at the given point.

        Nonnegative entries mean the row is satisfied; equality rows report
        minus the absolute residual.
        """

        point = np.asarray(point, dtype=float)

        if point.shape != (self.size,):
            raise DimensionMismatch(f"Point has length {point.size}, expected {self.size}")

        result = np.zeros(len(self.rows))

        for idx, (coefficients, sense, rhs) in enumerate(self.rows):
            value = float(coefficients @ point)

            if sense == '<=':
                result[idx] = rhs - value
            elif sense == '>=':
                result[idx] = value - rhs
            else:
                result[idx] = -abs(value - rhs)

        return result

    def contains(self, point, tol=1e-7):
        """Test whether the point satisfies every row and bound within tolerance"""

        point = np.asarray(point, dtype=float)

        if np.any(point < self.lower - tol) or np.any(point > self.upper + tol):
            return False

        slacks = self.slacks(point)

        return bool(np.all(slacks >= -tol))

    def __str__(self):
        return f"ConstraintSystem<{self.size} variables, {len(self.rows)} rows>"
