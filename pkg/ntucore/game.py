# -*- coding: utf-8 -*-

"""
NTU LP game data model and coalition-level geometry.

A game is given by a production matrix A (resources x goods), one
endowment vector b^i per player and one valuation vector v^i per player.
Game data is held as exact rationals; every derived polyhedron is a
floating point ConstraintSystem.
"""

import itertools
import logging
from fractions import Fraction

import numpy as np

from ntucore.base import MetadataMixin, NtuObject
from ntucore.exceptions import DimensionMismatch, EmptyCoalition, InvalidGame, TooManyPlayers
from ntucore.simplex import LinearProgram, Status, solve
from ntucore.system import ConstraintSystem, VariableLayout

logger = logging.getLogger('ntucore')


def parseRational(value):
    """ Convert a value to an exact Fraction.

    Accepts Fraction, int, "p/q" or decimal strings, and floats (taken at
    their shortest decimal representation).
    """

    if isinstance(value, bool):
        raise ValueError(f"Cannot interpret boolean '{value}' as a rational")

    if isinstance(value, Fraction):
        return value

    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))

    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"Cannot interpret non-finite value '{value}' as a rational")
        return Fraction(repr(float(value)))

    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ZeroDivisionError:
            raise ValueError(f"Rational '{value}' has a zero denominator")

    raise ValueError(f"Cannot interpret '{value}' as a rational")


def formatRational(value):
    """Format a Fraction as a 'p/q' string (or 'p' for integers)"""

    value = Fraction(value)

    if value.denominator == 1:
        return str(value.numerator)

    return f"{value.numerator}/{value.denominator}"


class Coalition(object):
    """ A nonempty set of players, stored as a sorted tuple of 0-based indices """

    def __init__(self, members):

        members = tuple(sorted(set(int(i) for i in members)))

        if len(members) == 0:
            raise EmptyCoalition("A coalition must contain at least one player")

        if members[0] < 0:
            raise ValueError(f"Player index {members[0]} is negative")

        self.members = members

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, player):
        return player in self.members

    def __eq__(self, other):
        if isinstance(other, Coalition):
            return self.members == other.members
        return NotImplemented

    def __hash__(self):
        return hash(self.members)

    def __lt__(self, other):
        return self.members < other.members

    def intersects(self, other):
        return bool(set(self.members) & set(other))

    def label(self):
        """1-based display label, e.g. '{1,3}'"""
        return '{' + ','.join(str(i + 1) for i in self.members) + '}'

    def __repr__(self):
        return f"Coalition{self.label()}"


def asCoalition(game, S):
    """Validate S against the game's player set and return it as a Coalition"""

    if not isinstance(S, Coalition):
        S = Coalition(S)

    if S.members[-1] >= game.players:
        raise ValueError(f"Player {S.members[-1]} is not part of a {game.players}-player game")

    return S


class Game(MetadataMixin, NtuObject):
    """ An NTU linear production game.

    Data entries:
        A - production matrix (resources x goods) of Fractions
        b - per-player endowment vectors (length = resources)
        v - per-player valuation vectors (length = goods)
        labels - optional per-player labels
        metadata - free-form provenance information
    """

    MODEL_TYPE = 'game'

    REQUIRED_FIELDS = ('A', 'b', 'v')

    def __init__(self, data, check=True):
        """ Construct a game from a data dict.

        Args:
            data - dict with entries A, b, v (and optionally labels, metadata)
            check - verify that every singleton design space is nonempty and bounded
        """

        for field in self.REQUIRED_FIELDS:
            if field not in data:
                raise InvalidGame(f"Game data is missing required field '{field}'", detail={'field': field})

        values = {
            'A': [[parseRational(a) for a in row] for row in data['A']],
            'b': [[parseRational(a) for a in row] for row in data['b']],
            'v': [[parseRational(a) for a in row] for row in data['v']],
            'labels': list(data.get('labels') or []),
            'metadata': dict(data.get('metadata') or {}),
        }

        super().__init__(values)

        self._validateDimensions()

        # Float views, computed once
        self._matrix = np.array([[float(a) for a in row] for row in self.A], dtype=float).reshape(self.resources, self.goods)
        self._endowments = np.array([[float(a) for a in row] for row in self.b], dtype=float).reshape(self.players, self.resources)
        self._valuations = np.array([[float(a) for a in row] for row in self.v], dtype=float).reshape(self.players, self.goods)

        self._utility_bounds = None

        if check:
            self._checkSingletonSpaces()

    @classmethod
    def create(cls, A, b, v, labels=None, metadata=None, check=True):
        """Create a new game from matrix / vector data"""

        data = {
            'A': A,
            'b': b,
            'v': v,
            'labels': labels,
            'metadata': metadata,
        }

        return cls(data, check=check)

    @classmethod
    def fromDict(cls, data):
        return cls(data, check=False)

    def _validateDimensions(self):

        if len(self.A) == 0:
            raise InvalidGame("Production matrix must have at least one resource row")

        goods = len(self.A[0])

        if goods == 0:
            raise InvalidGame("Production matrix must have at least one good column")

        for row in self.A:
            if len(row) != goods:
                raise DimensionMismatch("Production matrix rows have inconsistent lengths")

        if len(self.b) == 0:
            raise InvalidGame("A game must have at least one player")

        if len(self.b) != len(self.v):
            raise DimensionMismatch(f"Game has {len(self.b)} endowment vectors but {len(self.v)} valuation vectors")

        for i, row in enumerate(self.b):
            if len(row) != len(self.A):
                raise DimensionMismatch(f"Endowment of player {i} has length {len(row)}, expected {len(self.A)}")

        for i, row in enumerate(self.v):
            if len(row) != goods:
                raise DimensionMismatch(f"Valuation of player {i} has length {len(row)}, expected {goods}")

        if self.labels and len(self.labels) != len(self.b):
            raise DimensionMismatch(f"Game has {len(self.labels)} labels for {len(self.b)} players")

    def _checkSingletonSpaces(self):
        """Verify that X({i}) is nonempty and bounded for every player"""

        A = self._matrix

        # Nonnegative data: x = 0 is feasible and every good consumes some resource
        if np.all(A >= 0) and np.all(self._endowments >= 0):
            unbounded = np.flatnonzero(A.max(axis=0) <= 0)

            if unbounded.size > 0:
                raise InvalidGame(
                    f"Good {int(unbounded[0])} consumes no resource: design spaces are unbounded",
                    detail={'good': int(unbounded[0])},
                )

            return

        for i in range(self.players):
            space = design_space(self, [i])
            lp = LinearProgram.fromSystem(space, np.ones(self.goods), sense='max')
            result = solve(lp)

            if result.status == Status.INFEASIBLE:
                raise InvalidGame(f"Design space of player {i} is empty", detail={'player': i})

            if result.status == Status.UNBOUNDED:
                raise InvalidGame(f"Design space of player {i} is unbounded", detail={'player': i})

    @property
    def players(self):
        return len(self._data['b'])

    @property
    def resources(self):
        return len(self._data['A'])

    @property
    def goods(self):
        return len(self._data['A'][0])

    @property
    def matrix(self):
        """Production matrix as a float array (resources x goods)"""
        return self._matrix

    @property
    def endowments(self):
        """Endowments as a float array (players x resources)"""
        return self._endowments

    @property
    def valuations(self):
        """Valuations as a float array (players x goods)"""
        return self._valuations

    def layout(self, extra=0):
        return VariableLayout(self.goods, self.players, extra)

    def coalition(self, members):
        return asCoalition(self, members)

    def grandCoalition(self):
        return Coalition(range(self.players))

    def coalitions(self):
        """Iterate over all nonempty coalitions (by size, then lexicographically)"""

        for size in range(1, self.players + 1):
            for members in itertools.combinations(range(self.players), size):
                yield Coalition(members)

    def playerLabel(self, i):
        if self.labels:
            return str(self.labels[i])

        return str(i + 1)

    def __eq__(self, other):
        if not isinstance(other, Game):
            return NotImplemented

        return all(self._data[key] == other._data[key] for key in ('A', 'b', 'v', 'labels'))

    def __hash__(self):
        return id(self)

    def __str__(self):
        return f"Game<{self.players} players, {self.resources} resources, {self.goods} goods>"


def pooled_endowment(game, S):
    """Return b(S) = sum of b^i over i in S, as exact Fractions"""

    S = asCoalition(game, S)

    total = [Fraction(0)] * game.resources

    for i in S:
        total = [t + b for t, b in zip(total, game.b[i])]

    return tuple(total)


def check_plan(game, x, tol=1e-7):
    """Validate a DesignPlan: correct length and nonnegative within tolerance"""

    if len(x) != game.goods:
        raise DimensionMismatch(f"Design plan has length {len(x)}, expected {game.goods}")

    for j, value in enumerate(x):
        if value < -tol:
            raise ValueError(f"Design plan entry {j} is negative ({value})")

    return x


def evaluate_utility(game, i, x):
    """ Return (v^i)^T x.

    The result is an exact Fraction when x holds only rationals.
    """

    if len(x) != game.goods:
        raise DimensionMismatch(f"Design plan has length {len(x)}, expected {game.goods}")

    if all(isinstance(value, (int, Fraction)) for value in x):
        return sum((v * Fraction(value) for v, value in zip(game.v[i], x)), Fraction(0))

    return float(game.valuations[i] @ np.asarray(x, dtype=float))


def utilities(game, x):
    """Return the float utility vector of a plan"""
    return game.valuations @ np.asarray(x, dtype=float)


def _endowmentRows(game, b):
    return [(game.matrix[k], '<=', float(b[k])) for k in range(game.resources)]


def design_space(game, S):
    """ X(S) = {x >= 0 : A x <= b(S)} as a ConstraintSystem over the goods """

    b = pooled_endowment(game, S)

    return ConstraintSystem(
        game.goods,
        rows=_endowmentRows(game, b),
        lower=np.zeros(game.goods),
        names=game.layout().names()[:game.goods],
    )


def design_utility_space(game, S):
    """ Z(S) over (x, u): the rows of X(S) plus u_i - (v^i)^T x <= 0 for i in S.

    Coordinates u_i for players outside S are unconstrained.
    """

    S = asCoalition(game, S)
    layout = game.layout()
    b = pooled_endowment(game, S)

    rows = []

    for k in range(game.resources):
        coefficients = np.zeros(layout.size)
        coefficients[layout.xSlice()] = game.matrix[k]
        rows.append((coefficients, '<=', float(b[k])))

    for i in S:
        coefficients = np.zeros(layout.size)
        coefficients[layout.xSlice()] = -game.valuations[i]
        coefficients[layout.u_offset + i] = 1.0
        rows.append((coefficients, '<=', 0.0))

    lower = np.full(layout.size, -np.inf)
    lower[layout.xSlice()] = 0.0

    return ConstraintSystem(layout.size, rows=rows, lower=lower, names=layout.names())


def positive_endowment(game):
    """b+ = sum of max(b^i, 0): X(S) is contained in X(b+) for every coalition"""
    return np.maximum(game.endowments, 0.0).sum(axis=0)


def utility_bounds(game):
    """ Per-player (L, U): min and max of (v^i)^T x over X(b+).

    Every coalition's design space lies in X(b+), so these bound the
    utility any coalition can offer a player. Cached on the game.
    """

    if game._utility_bounds is not None:
        return game._utility_bounds

    space = ConstraintSystem(
        game.goods,
        rows=_endowmentRows(game, positive_endowment(game)),
        lower=np.zeros(game.goods),
    )

    lower = np.zeros(game.players)
    upper = np.zeros(game.players)

    for i in range(game.players):
        for sense, target in (('min', lower), ('max', upper)):
            result = solve(LinearProgram.fromSystem(space, game.valuations[i], sense=sense))

            if not result.optimal:
                raise InvalidGame(f"Utility of player {i} is unbounded over the pooled design space")

            target[i] = result.objective_value

    logger.debug(f"Utility bounds computed for {game}")

    game._utility_bounds = (lower, upper)

    return game._utility_bounds


def extended_utility_space(game, S, size=None, u_offset=None):
    """ U'(S) = {(z, x^S) : u in U(S)} lifted by an auxiliary plan x^S.

    Variables are the point coordinates (size of them, default goods + players)
    followed by goods auxiliary coordinates x^S >= 0. Rows are
    A x^S <= b(S) and u_i - (v^i)^T x^S <= 0 for i in S, where u_i sits at
    point coordinate u_offset + i. The set is cylindrical along every other
    point coordinate.
    """

    S = asCoalition(game, S)

    if size is None:
        size = game.goods + game.players

    if u_offset is None:
        u_offset = game.goods

    total = size + game.goods
    aux = slice(size, total)
    b = pooled_endowment(game, S)

    rows = []

    for k in range(game.resources):
        coefficients = np.zeros(total)
        coefficients[aux] = game.matrix[k]
        rows.append((coefficients, '<=', float(b[k])))

    for i in S:
        coefficients = np.zeros(total)
        coefficients[aux] = -game.valuations[i]
        coefficients[u_offset + i] = 1.0
        rows.append((coefficients, '<=', 0.0))

    lower = np.full(total, -np.inf)
    lower[aux] = 0.0

    names = [f"z{j}" for j in range(size)] + [f"xs{j}" for j in range(game.goods)]

    return ConstraintSystem(total, rows=rows, lower=lower, names=names)


class BalancednessVerdict(object):
    """ Outcome of a sufficient-condition check for a nonempty core.

    Attributes:
        status - GUARANTEED or INCONCLUSIVE
        witness - list of (player, coalition, violating direction) when inconclusive
        note - human readable explanation
    """

    GUARANTEED = 'GuaranteedNonEmpty'
    INCONCLUSIVE = 'Inconclusive'

    def __init__(self, status, witness=None, note=''):
        self.status = status
        self.witness = list(witness or [])
        self.note = note

    @property
    def guaranteed(self):
        return self.status == self.GUARANTEED

    def __str__(self):
        return f"BalancednessVerdict<{self.status}>"


BALANCED_MODES = ('nonneg', 'dual_cone_grand', 'dual_cone_all')

# dual_cone_all scans every coalition
DUAL_CONE_PLAYER_CAP = 20


def _dualConeWitness(game, S, i, tol=1e-9):
    """Return a plan x in X(S) with (v^i)^T x < 0, or None"""

    result = solve(LinearProgram.fromSystem(design_space(game, S), game.valuations[i], sense='min'))

    if result.optimal and result.objective_value < -tol:
        return result.x

    return None


def check_balanced_sufficient(game, mode='nonneg'):
    """ Check a sufficient condition for a nonempty core.

    Modes:
        nonneg - every valuation vector is elementwise nonnegative
        dual_cone_grand - every v^i lies in the dual cone of X(N); a full
                          certificate only when all endowments are nonnegative
        dual_cone_all - every v^i lies in the dual cone of every X(S)
    """

    if mode not in BALANCED_MODES:
        raise ValueError(f"Unknown balancedness mode '{mode}'")

    witness = []

    if mode == 'nonneg':
        for i in range(game.players):
            for j in range(game.goods):
                if game.v[i][j] < 0:
                    direction = np.zeros(game.goods)
                    direction[j] = 1.0
                    witness.append((i, None, direction))

        if witness:
            return BalancednessVerdict(BalancednessVerdict.INCONCLUSIVE, witness, "Some valuation has a negative entry")

        return BalancednessVerdict(BalancednessVerdict.GUARANTEED, note="All valuations are nonnegative")

    if mode == 'dual_cone_grand':
        grand = game.grandCoalition()

        for i in range(game.players):
            x = _dualConeWitness(game, grand, i)

            if x is not None:
                witness.append((i, grand, x))

        if witness:
            return BalancednessVerdict(BalancednessVerdict.INCONCLUSIVE, witness, "Some valuation leaves the dual cone of X(N)")

        if any(b < 0 for row in game.b for b in row):
            return BalancednessVerdict(
                BalancednessVerdict.INCONCLUSIVE,
                note="Negative endowments: the dual cone of X(N) need not lie in those of smaller coalitions",
            )

        return BalancednessVerdict(BalancednessVerdict.GUARANTEED, note="All valuations lie in the dual cone of X(N)")

    if game.players > DUAL_CONE_PLAYER_CAP:
        raise TooManyPlayers(f"dual_cone_all supports at most {DUAL_CONE_PLAYER_CAP} players (game has {game.players})")

    for S in game.coalitions():
        for i in range(game.players):
            x = _dualConeWitness(game, S, i)

            if x is not None:
                witness.append((i, S, x))

    if witness:
        return BalancednessVerdict(BalancednessVerdict.INCONCLUSIVE, witness, "Some valuation leaves a coalition's dual cone")

    return BalancednessVerdict(BalancednessVerdict.GUARANTEED, note="All valuations lie in every coalition's dual cone")
