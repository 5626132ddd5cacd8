# -*- coding: utf-8 -*-

"""
Brute-force ground truth for small games.

Every LP here is solved with scipy's HiGHS interface rather than the
package's own simplex engine, so the oracle checks the library
independently.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from ntucore.exceptions import TooManyGoods, TooManyPlayers
from ntucore.game import Coalition, pooled_endowment
from ntucore.membership import Objection, ObjectionMode

logger = logging.getLogger('ntucore')

# Strict improvement threshold
IMPROVEMENT_TOL = 1e-9

MAX_ORACLE_PLAYERS = 16
MAX_EVIDENCE_PLAYERS = 4
MAX_EVIDENCE_GOODS = 3
MAX_BALANCED_PLAYERS = 4


def _linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None):
    """Minimize c^T z with HiGHS; returns the scipy OptimizeResult"""

    return linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method='highs')


def coalition_gain(game, S, u_star):
    """ max over Z(S) of min_{i in S} (u_i - u*_i), by one LP.

    Returns:
        (value, plan), or (None, None) when X(S) is empty
    """

    J = game.goods
    b = np.array([float(v) for v in pooled_endowment(game, S)])

    # Variables (x, t): minimize -t
    c = np.zeros(J + 1)
    c[J] = -1.0

    A_ub = [np.append(game.matrix[k], 0.0) for k in range(game.resources)]
    b_ub = list(b)

    for i in S:
        A_ub.append(np.append(-game.valuations[i], 1.0))
        b_ub.append(-float(u_star[i]))

    bounds = [(0, None)] * J + [(None, None)]

    result = _linprog(c, A_ub=np.array(A_ub), b_ub=np.array(b_ub), bounds=bounds)

    if result.status != 0:
        return None, None

    return float(-result.fun), np.maximum(result.x[:J], 0.0)


class OracleVerdict(object):
    """ Result of an exhaustive blocking check.

    Attributes:
        blocked - some coalition strictly improves every member
        best - Objection of the maximizing coalition
        coalitions_checked - number of coalition LPs solved
    """

    def __init__(self, blocked, best, coalitions_checked):
        self.blocked = blocked
        self.best = best
        self.coalitions_checked = coalitions_checked

    @property
    def value(self):
        return self.best.epsilon if self.best is not None else None

    def asRecord(self):
        return {
            'blocked': self.blocked,
            'value': self.value,
            'coalition': self.best.coalition.label() if self.best is not None else '',
            'coalitions_checked': self.coalitions_checked,
        }

    def __str__(self):
        if self.blocked:
            return f"OracleVerdict<blocked by {self.best.coalition.label()}, {self.best.epsilon:.9g}>"

        return "OracleVerdict<not blocked>"


def is_blocked_exact(game, u_star, threads=1):
    """ Solve the least objection LP of every nonempty coalition.

    Returns:
        OracleVerdict (blocked when the best value exceeds 1e-9)
    """

    if game.players > MAX_ORACLE_PLAYERS:
        raise TooManyPlayers(f"The exhaustive oracle supports at most {MAX_ORACLE_PLAYERS} players (game has {game.players})")

    u_star = np.asarray(u_star, dtype=float)
    coalitions = list(game.coalitions())

    def evaluate(S):
        return coalition_gain(game, S, u_star)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(evaluate, coalitions))
    else:
        results = [evaluate(S) for S in coalitions]

    best = None
    mode = ObjectionMode.additive()

    # Deterministic merge: larger value first, then lexicographically smaller coalition
    for S, (value, plan) in zip(coalitions, results):
        if value is None:
            continue

        candidate = Objection(value, S, plan, [float(game.valuations[i] @ plan) for i in S], mode)

        if best is None or candidate.sortKey() < best.sortKey():
            best = candidate

    blocked = best is not None and best.epsilon > IMPROVEMENT_TOL

    return OracleVerdict(blocked, best, len(coalitions))


class CoreEvidence(object):
    """ Outcome of core_empty_evidence.

    Attributes:
        status - CORE_POINT_FOUND or NO_CORE_POINT_FOUND
        resolution - grid resolution used
        utilities, plan - the unblocked sample (when found)
        samples_checked - Pareto-undominated samples tested
    """

    CORE_POINT_FOUND = 'CorePointFound'
    NO_CORE_POINT_FOUND = 'NoCorePointFound'

    def __init__(self, status, resolution, utilities=None, plan=None, samples_checked=0):
        self.status = status
        self.resolution = resolution
        self.utilities = utilities
        self.plan = plan
        self.samples_checked = samples_checked

    @property
    def found(self):
        return self.status == self.CORE_POINT_FOUND

    def __str__(self):
        return f"CoreEvidence<{self.status}, resolution={self.resolution:g}>"


def _gridPlans(game, resolution):
    """Grid points of X(N) with per-good step resolution * max x_j, plus LP optimal plans"""

    J = game.goods
    A = game.matrix
    b = game.endowments.sum(axis=0)

    axes = []

    for j in range(J):
        c = np.zeros(J)
        c[j] = -1.0
        result = _linprog(c, A_ub=A, b_ub=b, bounds=[(0, None)] * J)
        top = float(-result.fun) if result.status == 0 else 0.0

        if top <= 0:
            axes.append(np.zeros(1))
        else:
            count = int(round(1.0 / resolution))
            axes.append(np.linspace(0.0, top, count + 1))

    grid = np.array(np.meshgrid(*axes, indexing='ij')).reshape(J, -1).T
    grid = grid[np.all(grid @ A.T <= b + 1e-9, axis=1)]

    # Per-player and total-utility optimal plans (vertices may fall between grid points)
    extra = []

    for objective in list(game.valuations) + [game.valuations.sum(axis=0)]:
        result = _linprog(-objective, A_ub=A, b_ub=b, bounds=[(0, None)] * J)

        if result.status == 0:
            extra.append(np.maximum(result.x, 0.0))

    if extra:
        grid = np.vstack([grid, np.array(extra)])

    return grid


def pareto_filter(points):
    """ Indices of points not weakly dominated by another point (one per duplicate).

    Points are scanned in lexicographically decreasing order, so each point
    can only be dominated by one already kept.
    """

    points = np.asarray(points, dtype=float)
    order = np.lexsort(points.T[::-1])[::-1]

    kept = []

    for idx in order:
        p = points[idx]

        if kept:
            frontier = points[kept]
            if np.any(np.all(frontier >= p, axis=1)):
                continue

        kept.append(int(idx))

    return kept


def core_empty_evidence(game, resolution=0.01, threads=1):
    """ Search a grid of grand-coalition plans for an unblocked allocation.

    Returns:
        CoreEvidence (CorePointFound with the first unblocked sample, or NoCorePointFound)
    """

    if game.players > MAX_EVIDENCE_PLAYERS:
        raise TooManyPlayers(f"Core evidence supports at most {MAX_EVIDENCE_PLAYERS} players (game has {game.players})")

    if game.goods > MAX_EVIDENCE_GOODS:
        raise TooManyGoods(f"Core evidence supports at most {MAX_EVIDENCE_GOODS} goods (game has {game.goods})")

    if not 0 < resolution <= 1:
        raise ValueError(f"Resolution must lie in (0, 1] (got {resolution})")

    plans = _gridPlans(game, resolution)
    utilities = plans @ game.valuations.T

    kept = pareto_filter(utilities)

    logger.info(f"Core evidence: {len(plans)} grid plans, {len(kept)} Pareto-undominated samples")

    checked = 0

    for idx in kept:
        checked += 1
        verdict = is_blocked_exact(game, utilities[idx], threads=threads)

        if not verdict.blocked:
            return CoreEvidence(CoreEvidence.CORE_POINT_FOUND, resolution, utilities[idx], plans[idx], checked)

    return CoreEvidence(CoreEvidence.NO_CORE_POINT_FOUND, resolution, samples_checked=checked)


def enumerate_balanced_collections(n):
    """ All minimal balanced collections on n players, with their weights.

    A collection is minimal balanced exactly when its incidence vectors are
    linearly independent and admit positive weights summing to one on every
    player; such weights are unique.

    Returns:
        list of (tuple of Coalitions, tuple of Fractions)
    """

    if n > MAX_BALANCED_PLAYERS:
        raise TooManyPlayers(f"Balanced collections are enumerated for at most {MAX_BALANCED_PLAYERS} players (got {n})")

    if n < 1:
        raise ValueError("At least one player is required")

    coalitions = []

    for size in range(1, n + 1):
        for members in itertools.combinations(range(n), size):
            coalitions.append(Coalition(members))

    incidence = {S: np.array([1.0 if i in S else 0.0 for i in range(n)]) for S in coalitions}

    found = []

    for k in range(1, n + 1):
        for collection in itertools.combinations(coalitions, k):
            M = np.column_stack([incidence[S] for S in collection])

            if np.linalg.matrix_rank(M) < k:
                continue

            result = _linprog(np.zeros(k), A_eq=M, b_eq=np.ones(n), bounds=[(0, None)] * k)

            if result.status != 0:
                continue

            weights = tuple(Fraction(w).limit_denominator(1000) for w in result.x)

            if any(w <= 0 for w in weights):
                continue

            # Exact check of the recovered rational weights
            exact = all(
                sum((w for S, w in zip(collection, weights) if i in S), Fraction(0)) == 1
                for i in range(n)
            )

            if exact:
                found.append((tuple(collection), weights))

    logger.debug(f"Found {len(found)} minimal balanced collections on {n} players")

    return found


def hull_vertices(points):
    """ Flags telling which points are vertices of their convex hull.

    A point is not a vertex when it is a convex combination of the others
    (one LP feasibility check per point).
    """

    points = np.asarray(points, dtype=float)
    count = points.shape[0]

    flags = []

    for k in range(count):
        others = np.delete(points, k, axis=0)

        if others.shape[0] == 0:
            flags.append(True)
            continue

        A_eq = np.vstack([others.T, np.ones(others.shape[0])])
        b_eq = np.append(points[k], 1.0)

        result = _linprog(np.zeros(others.shape[0]), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * others.shape[0])

        flags.append(result.status != 0)

    return flags


class SpotCheckResult(object):
    """ Containment samples for one balanced collection """

    def __init__(self, collection, samples, failures):
        self.collection = collection
        self.samples = samples
        self.failures = failures

    @property
    def passed(self):
        return len(self.failures) == 0


def _randomPlan(game, S, rng):
    """Random point of X(S): a convex combination of two LP vertices"""

    J = game.goods
    A = game.matrix
    b = np.array([float(v) for v in pooled_endowment(game, S)])

    vertices = []

    for _ in range(2):
        weights = rng.random(len(S))
        objective = sum(w * game.valuations[i] for w, i in zip(weights, S)) + rng.random(J) * 1e-3

        result = _linprog(-objective, A_ub=A, b_ub=b, bounds=[(0, None)] * J)

        if result.status == 0:
            vertices.append(np.maximum(result.x, 0.0))

    if not vertices:
        return None

    if len(vertices) == 1:
        return vertices[0]

    mix = rng.random()

    return mix * vertices[0] + (1.0 - mix) * vertices[1]


def in_grand_utility_set(game, u, tol=1e-7):
    """Whether some x in X(N) gives every player at least u_i"""

    J = game.goods

    A_ub = np.vstack([game.matrix, -game.valuations])
    b_ub = np.concatenate([game.endowments.sum(axis=0), -np.asarray(u, dtype=float) + tol])

    result = _linprog(np.zeros(J), A_ub=A_ub, b_ub=b_ub, bounds=[(0, None)] * J)

    return result.status == 0


def spot_check_balanced(game, collection, samples=20, seed=0):
    """ Sample u in the intersection of U(S) over a collection and test u in U(N).

    Args:
        game - the Game
        collection - sequence of Coalitions covering every player
        samples - number of random allocations
        seed - seed for numpy's default_rng

    Returns:
        SpotCheckResult with the failing allocations
    """

    rng = np.random.default_rng(seed)

    covered = set()

    for S in collection:
        covered.update(S)

    if covered != set(range(game.players)):
        raise ValueError("Collection must cover every player")

    failures = []

    for _ in range(samples):
        u = np.full(game.players, np.inf)
        plans = [_randomPlan(game, S, rng) for S in collection]

        # An empty U(S) leaves nothing to sample
        if any(plan is None for plan in plans):
            continue

        for S, plan in zip(collection, plans):
            for i in S:
                u[i] = min(u[i], float(game.valuations[i] @ plan))

        if not in_grand_utility_set(game, u):
            failures.append(u)

    return SpotCheckResult(tuple(collection), samples, failures)
