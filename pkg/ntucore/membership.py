# -*- coding: utf-8 -*-

"""
Least-objection membership testing.

The least objection of an incumbent allocation u* is the largest amount
(additive) or ratio (multiplicative) by which some coalition can improve
all of its members at once. It is found by best-first branch-and-bound
over binary coalition indicators y, with big-M linear relaxations at every
node. The search is exact above a margin over the baseline (the mode's
floor unless given); smaller objections come from the warm start only.
"""

import heapq
import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ntucore.exceptions import NonPositiveIncumbentUtility, TimeBudgetExceeded
from ntucore.game import Coalition, asCoalition, design_space, pooled_endowment, utility_bounds
from ntucore.simplex import LinearProgram, solve

logger = logging.getLogger('ntucore')


class ObjectionMode(object):
    """ Additive or multiplicative least objection.

    Args:
        kind - ObjectionMode.ADDITIVE or ObjectionMode.MULTIPLICATIVE
        floor - smallest objection accepted as a numerical improvement
    """

    ADDITIVE = 'Additive'
    MULTIPLICATIVE = 'Multiplicative'

    def __init__(self, kind=ADDITIVE, floor=1e-3):

        if kind not in (self.ADDITIVE, self.MULTIPLICATIVE):
            raise ValueError(f"Unknown objection mode '{kind}'")

        if floor < 0 or (kind == self.MULTIPLICATIVE and floor <= 0):
            raise ValueError(f"Invalid floor {floor} for {kind} objections")

        self.kind = kind
        self.floor = float(floor)

    @classmethod
    def additive(cls, floor=1e-3):
        return cls(cls.ADDITIVE, floor)

    @classmethod
    def multiplicative(cls, floor=1e-3):
        return cls(cls.MULTIPLICATIVE, floor)

    @property
    def multiplicative_mode(self):
        return self.kind == self.MULTIPLICATIVE

    @property
    def baseline(self):
        """Objection of the grand coalition keeping u* (always attainable)"""
        return 1.0 if self.multiplicative_mode else 0.0

    @property
    def threshold(self):
        """Objections at or below this value certify core membership"""
        return self.baseline + self.floor

    def isBlocking(self, epsilon):
        return epsilon > self.threshold

    def __eq__(self, other):
        if isinstance(other, ObjectionMode):
            return (self.kind, self.floor) == (other.kind, other.floor)
        return NotImplemented

    def __str__(self):
        return f"{self.kind}(floor={self.floor:g})"


class Objection(object):
    """ A blocking certificate (S, x^S, u^S) with its objection value.

    Attributes:
        epsilon - objection value
        coalition - the coalition S
        plan - design plan x^S in X(S)
        utilities - u^S for the members of S, in member order
        mode - the ObjectionMode it was computed under
        timed_out - True when epsilon is only a lower bound
        nodes - branch-and-bound nodes explored
        wall_time - seconds spent
        bound - proven upper bound on the least objection (epsilon unless a search says otherwise)
    """

    def __init__(self, epsilon, coalition, plan, utilities, mode, timed_out=False, nodes=0, wall_time=0.0, bound=None):
        self.epsilon = float(epsilon)
        self.coalition = coalition
        self.plan = np.asarray(plan, dtype=float)
        self.utilities = np.asarray(utilities, dtype=float)
        self.mode = mode
        self.timed_out = timed_out
        self.nodes = nodes
        self.wall_time = wall_time
        self.bound = self.epsilon if bound is None else float(bound)

    def sortKey(self):
        """Total order: larger epsilon first, then lexicographically smaller coalition"""
        return (-self.epsilon, self.coalition.members)

    @property
    def blocking(self):
        return self.mode.isBlocking(self.epsilon)

    def utility(self, player):
        return float(self.utilities[self.coalition.members.index(player)])

    def gains(self, u_star):
        """Per-member additive gains u^S_i - u*_i"""
        return np.array([u - u_star[i] for i, u in zip(self.coalition, self.utilities)])

    def margins(self, u_star):
        """Per-member objection terms: gains (additive) or ratios u^S_i / u*_i (multiplicative)"""
        return _margin(self.utilities, np.asarray(u_star, dtype=float)[list(self.coalition)], self.mode)

    def verify(self, game, u_star, tol=1e-7):
        """Check the certificate invariants against the game"""

        if not design_space(game, self.coalition).contains(self.plan, tol=tol):
            return False

        for i, u in zip(self.coalition, self.utilities):
            if u > float(game.valuations[i] @ self.plan) + tol:
                return False

        if self.mode.multiplicative_mode:
            bound = min(u / u_star[i] for i, u in zip(self.coalition, self.utilities))
        else:
            bound = min(u - u_star[i] for i, u in zip(self.coalition, self.utilities))

        return self.epsilon <= bound + tol

    def asRecord(self, timing=False):
        """Flat record for CSV output (wall time only when requested)"""

        record = {
            'epsilon': self.epsilon,
            'mode': self.mode.kind,
            'coalition': self.coalition.label(),
            'size': len(self.coalition),
            'bound': self.bound,
            'nodes': self.nodes,
            'timed_out': self.timed_out,
        }

        if timing:
            record['wall_time'] = self.wall_time

        return record

    def __str__(self):
        flag = ", timed out" if self.timed_out else ""
        return f"Objection<{self.epsilon:.9g}, {self.coalition.label()}{flag}>"


class CoalitionPool(object):
    """ Deduplicated coalitions that blocked some earlier incumbent """

    def __init__(self, coalitions=()):
        self.values = {}

        for coalition in coalitions:
            self.add(coalition)

    def add(self, coalition, epsilon=None):
        """Add a coalition (or refresh its last-seen objection)"""

        if not isinstance(coalition, Coalition):
            coalition = Coalition(coalition)

        self.values[coalition] = epsilon

    def candidates(self):
        """Coalitions in lexicographic order"""
        return sorted(self.values.keys())

    def __len__(self):
        return len(self.values)

    def __contains__(self, coalition):
        return coalition in self.values

    def __iter__(self):
        return iter(self.candidates())


def _checkIncumbent(u_star, mode):

    u_star = np.asarray(u_star, dtype=float)

    if mode.multiplicative_mode and np.any(u_star <= 0):
        bad = int(np.flatnonzero(u_star <= 0)[0])
        raise NonPositiveIncumbentUtility(
            f"Multiplicative objections need positive utilities (player {bad} has {u_star[bad]})",
            detail={'player': bad},
        )

    return u_star


def _margin(values, u_star, mode):
    """Objection terms of utilities against u*, in the mode's units"""

    if mode.multiplicative_mode:
        return values / u_star

    return values - u_star


def gain_caps(game, u_star, mode=None):
    """ Per player, the largest objection term any coalition can offer.

    A player whose cap is at most some value c can never belong to a
    coalition with an objection above c.
    """

    mode = mode or ObjectionMode()
    _, upper = utility_bounds(game)

    return _margin(upper, np.asarray(u_star, dtype=float), mode)


def coalition_objection(game, S, u_star, mode=None):
    """ Least objection of one fixed coalition, by a single LP.

    Maximizes eps over (x, eps) subject to x in X(S) and, for i in S,
    eps <= (v^i)^T x - u*_i (additive) or eps <= (v^i)^T x / u*_i
    (multiplicative, where every member must also gain at least the floor).

    Returns an Objection, or None when the coalition admits no plan.
    """

    mode = mode or ObjectionMode()
    S = asCoalition(game, S)
    u_star = _checkIncumbent(u_star, mode)

    J = game.goods
    size = J + 1

    b = pooled_endowment(game, S)

    rows = []

    for k in range(game.resources):
        coefficients = np.zeros(size)
        coefficients[:J] = game.matrix[k]
        rows.append((coefficients, '<=', float(b[k])))

    for i in S:
        coefficients = np.zeros(size)
        coefficients[J] = 1.0

        if mode.multiplicative_mode:
            coefficients[:J] = -game.valuations[i] / u_star[i]
            rows.append((coefficients, '<=', 0.0))

            floor = np.zeros(size)
            floor[:J] = game.valuations[i]
            rows.append((floor, '>=', u_star[i] + mode.floor))
        else:
            coefficients[:J] = -game.valuations[i]
            rows.append((coefficients, '<=', -u_star[i]))

    lower = np.zeros(size)
    lower[J] = -np.inf

    objective = np.zeros(size)
    objective[J] = 1.0

    lp = LinearProgram(size, objective=objective, sense='max', rows=rows, lower=lower)

    result = solve(lp)

    if not result.optimal:
        return None

    plan = np.maximum(result.x[:J], 0.0)
    utilities = [float(game.valuations[i] @ plan) for i in S]

    return Objection(result.objective_value, S, plan, utilities, mode)


def trivial_objection(game, u_star, mode=None):
    """ The grand coalition keeping u*: objection 0 (additive) or 1 (multiplicative) """

    mode = mode or ObjectionMode()

    N = game.grandCoalition()

    grand = coalition_objection(game, N, u_star, ObjectionMode.additive(mode.floor))

    if grand is None:
        plan = np.zeros(game.goods)
    else:
        plan = grand.plan

        if grand.epsilon < -1e-7:
            logger.warning(f"Incumbent utilities are not attainable by the grand coalition (gap {grand.epsilon:.3e})")

    return Objection(mode.baseline, N, plan, np.asarray(u_star, dtype=float), mode)


def singleton_lower_bounds(game):
    """ Per player, the stand-alone optimum max{(v^i)^T x : x in X({i})} """

    bounds = np.zeros(game.players)

    for i in range(game.players):
        lp = LinearProgram.fromSystem(design_space(game, [i]), game.valuations[i], sense='max')
        result = solve(lp)
        bounds[i] = result.objective_value if result.optimal else 0.0

    return bounds


def prefix_heuristic(game, u_star):
    """ Cheap candidate coalitions from dedicated-budget prefix scans.

    For every good j the players are sorted by decreasing v_j^i (ties by
    increasing u*_i, then index). Each prefix S spends its whole pooled
    endowment on good j; the prefix with the best additive least objection
    is kept when that objection is nonnegative.
    """

    u_star = np.asarray(u_star, dtype=float)
    A = game.matrix
    b = game.endowments

    found = []

    for j in range(game.goods):
        column = A[:, j]

        if not np.any(column > 0):
            continue

        order = sorted(range(game.players), key=lambda i: (-game.valuations[i, j], u_star[i], i))

        pooled = np.zeros(game.resources)
        best = None

        for k, player in enumerate(order):
            pooled += b[player]

            positive = column > 0
            t = float(np.min(pooled[positive] / column[positive]))

            # x = t e_j must satisfy the rows that do not limit good j
            if t < 0 or np.any(column[~positive] * t > pooled[~positive] + 1e-12):
                continue

            members = order[:k + 1]
            value = min(t * game.valuations[i, j] - u_star[i] for i in members)

            if best is None or value > best[0]:
                best = (value, Coalition(members))

        if best is not None and best[0] >= 0 and best[1] not in found:
            found.append(best[1])

    logger.debug(f"Prefix heuristic found {len(found)} candidate coalitions")

    return found


# Smallest objection increase accepted by the local search
IMPROVE_TOL = 1e-9


def _evaluateCandidates(game, coalitions, u_star, mode, threads=1):
    """Coalition objections for a list of candidates (None entries dropped)"""

    coalitions = list(coalitions)

    if threads > 1 and len(coalitions) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(lambda S: coalition_objection(game, S, u_star, mode), coalitions))
    else:
        results = [coalition_objection(game, S, u_star, mode) for S in coalitions]

    return [result for result in results if result is not None]


def greedy_coalitions(game, u_star, mode=None):
    """ Candidate coalitions grown one player at a time on dedicated budgets.

    For every good j, players are added one at a time, each time picking the
    player that keeps the least objection term highest when the whole pooled
    endowment is spent on good j (ties by lowest index). The best coalition
    along each path is kept when its term is above the mode's baseline.
    """

    mode = mode or ObjectionMode()
    u_star = _checkIncumbent(u_star, mode)

    A = game.matrix
    b = game.endowments
    V = game.valuations

    found = []

    for j in range(game.goods):
        column = A[:, j]
        positive = column > 0

        if not np.any(positive):
            continue

        pooled = np.zeros(game.resources)
        members = []
        remaining = list(range(game.players))
        best = None

        while remaining:
            candidates = np.array(remaining)

            totals = pooled[:, None] + b[candidates].T
            t = np.min(totals[positive] / column[positive][:, None], axis=0)

            # x = t e_j must satisfy the rows that do not limit good j
            feasible = (t >= 0) & np.all(column[:, None] * t[None, :] <= totals + 1e-12, axis=0)

            values = _margin(V[candidates, j] * t, u_star[candidates], mode)

            if members:
                held = np.array(members)
                terms = _margin(np.outer(V[held, j], t), u_star[held][:, None], mode)
                values = np.minimum(values, terms.min(axis=0))

            values = np.where(feasible, values, -np.inf)
            k = int(np.argmax(values))

            if not np.isfinite(values[k]):
                break

            pooled = totals[:, k].copy()
            members.append(remaining.pop(k))

            if best is None or values[k] > best[0]:
                best = (float(values[k]), Coalition(members))

        if best is not None and best[0] > mode.baseline and best[1] not in found:
            found.append(best[1])

    logger.debug(f"Greedy growth found {len(found)} candidate coalitions")

    return found


def improve_coalition(game, objection, u_star, deadline=None, threads=1):
    """ Local search from a certificate.

    Each round tries adding one outside player (whose gain cap can beat the
    current objection) and dropping each member whose objection term is
    tight, and moves to the best neighbour while the objection strictly
    grows. Stops at the deadline (a time.monotonic() value) if given.
    """

    mode = objection.mode
    u_star = _checkIncumbent(u_star, mode)
    caps = gain_caps(game, u_star, mode)

    current = objection
    rounds = 0

    while deadline is None or time.monotonic() < deadline:
        members = current.coalition.members

        moves = [
            Coalition(members + (p,))
            for p in range(game.players)
            if p not in current.coalition and caps[p] > current.epsilon + IMPROVE_TOL
        ]

        if len(members) > 1:
            tight = current.margins(u_star) <= current.epsilon + 1e-7
            moves += [Coalition([i for i in members if i != q]) for q, flag in zip(members, tight) if flag]

        evaluated = _evaluateCandidates(game, moves, u_star, mode, threads=threads)

        if not evaluated:
            break

        best = min(evaluated, key=lambda o: o.sortKey())

        if best.epsilon <= current.epsilon + IMPROVE_TOL:
            break

        current = best
        rounds += 1

    if rounds:
        logger.debug(f"Local search improved {objection} to {current} in {rounds} rounds")

    return current


class MembershipSearch(object):
    """ Best-first branch-and-bound over coalition indicators for one incumbent.

    Node LP variables are (x, u^S, eps, y). Indicators fixed to one enforce
    the objection row directly; indicators fixed to zero drop the player's
    rows. Unfixed players whose gain cap cannot beat the current cutoff are
    dropped at every node, and each node's big-M values follow from that
    node's own ceiling on eps. Open nodes are explored by largest bound,
    deeper nodes first on ties.
    """

    INTEGRALITY_TOL = 1e-6

    # Node bounds within this of the cutoff are pruned
    PRUNE_TOL = 1e-9

    def __init__(self, game, u_star, mode=None, budget=300.0, strict=False, threads=1, margin=None):

        self.game = game
        self.mode = mode or ObjectionMode()
        self.u_star = _checkIncumbent(u_star, self.mode)
        self.budget = budget
        self.strict = strict
        self.threads = max(1, int(threads))
        self.margin = self.mode.floor if margin is None else float(margin)

        if self.margin < 0:
            raise ValueError(f"Search margin must be nonnegative (got {self.margin})")

        self.nodes = 0
        self.timed_out = False
        self.bound = None

        J = game.goods
        N = game.players

        self.x_index = slice(0, J)
        self.u_offset = J
        self.eps_index = J + N
        self.y_offset = J + N + 1
        self.size = J + 2 * N + 1

        self.L, self.U = utility_bounds(game)
        self.caps = gain_caps(game, self.u_star, self.mode)

        # Lowest objection term a player can be held to
        self.lows = _margin(self.L, self.u_star, self.mode)
        self.eps_lo = min(float(np.min(self.lows)), self.mode.baseline) - 1.0

    @property
    def screen(self):
        """Objections at or below this value are left to the warm start"""
        return self.mode.baseline + self.margin

    def cutoff(self, incumbent):
        """Nodes must beat this value to be worth exploring"""
        return max(incumbent.epsilon, self.screen)

    def excluded(self, fixed, cutoff):
        """Unfixed players that cannot belong to a coalition beating the cutoff"""

        if cutoff is None:
            return []

        return [
            i for i in range(self.game.players)
            if i not in fixed and self.caps[i] <= cutoff + self.PRUNE_TOL
        ]

    def ceiling(self, fixed, cutoff=None):
        """Upper bound on eps over every coalition of a node"""

        members = [i for i, value in fixed.items() if value == 1]

        if members:
            return float(np.min(self.caps[members]))

        skip = set(self.excluded(fixed, cutoff))
        candidates = [i for i in range(self.game.players) if i not in fixed and i not in skip]

        if not candidates:
            return -np.inf

        return float(np.max(self.caps[candidates]))

    def bigM(self, ceiling):
        """ Per-player deactivation constants for a node with eps <= ceiling.

        With y_i = 0 the objection row must hold for every eps up to the
        ceiling and every u_i down to its lower bound L_i.
        """

        return np.maximum(0.0, ceiling - self.lows if self.mode.multiplicative_mode else ceiling - self.L)

    def _objectionRow(self, i, fixed, M):
        """Objection row of player i, or None when y_i is fixed to zero"""

        value = fixed.get(i, None)

        if value == 0:
            return None

        coefficients = np.zeros(self.size)
        coefficients[self.eps_index] = 1.0

        u_star = self.u_star[i]

        if self.mode.multiplicative_mode:
            coefficients[self.u_offset + i] = -1.0 / u_star

            if value == 1:
                return (coefficients, '<=', 0.0)

            coefficients[self.y_offset + i] = M[i]

            return (coefficients, '<=', M[i])

        coefficients[self.u_offset + i] = -1.0

        if value == 1:
            return (coefficients, '<=', -u_star)

        coefficients[self.y_offset + i] = u_star + M[i]

        return (coefficients, '<=', M[i])

    def nodeProgram(self, fixed, cutoff=None):
        """ Build the LP relaxation for a node.

        Args:
            fixed - dict mapping player index to a fixed indicator value (0 or 1)
            cutoff - when given, unfixed players that cannot beat it are fixed to zero
        """

        game = self.game
        J = game.goods
        N = game.players

        fixed = dict(fixed)

        for i in self.excluded(fixed, cutoff):
            fixed[i] = 0

        ceiling = self.ceiling(fixed)

        if not np.isfinite(ceiling):
            ceiling = self.eps_lo

        M = self.bigM(ceiling)

        active = [i for i in range(N) if fixed.get(i, None) != 0]

        rows = []

        coefficients = np.zeros(self.size)
        coefficients[self.y_offset:] = 1.0
        rows.append((coefficients, '>=', 1.0))

        for k in range(game.resources):
            coefficients = np.zeros(self.size)
            coefficients[:J] = game.matrix[k]
            coefficients[self.y_offset:] = -game.endowments[:, k]
            rows.append((coefficients, '<=', 0.0))

        for i in active:
            coefficients = np.zeros(self.size)
            coefficients[self.u_offset + i] = 1.0
            coefficients[:J] = -game.valuations[i]
            rows.append((coefficients, '<=', 0.0))

        for i in active:
            rows.append(self._objectionRow(i, fixed, M))

        if self.mode.multiplicative_mode:
            # Members must gain at least the floor additively
            for i in active:
                coefficients = np.zeros(self.size)
                coefficients[self.u_offset + i] = -1.0
                coefficients[self.y_offset + i] = self.u_star[i] + self.mode.floor - self.L[i]
                rows.append((coefficients, '<=', -self.L[i]))

        lower = np.zeros(self.size)
        upper = np.full(self.size, np.inf)

        lower[self.u_offset:self.u_offset + N] = self.L
        upper[self.u_offset:self.u_offset + N] = self.U

        lower[self.eps_index] = min(self.eps_lo, ceiling)
        upper[self.eps_index] = ceiling

        upper[self.y_offset:] = 1.0

        for i, value in fixed.items():
            lower[self.y_offset + i] = value
            upper[self.y_offset + i] = value

        objective = np.zeros(self.size)
        objective[self.eps_index] = 1.0

        return LinearProgram(self.size, objective=objective, sense='max', rows=rows, lower=lower, upper=upper)

    def _branchPlayer(self, y):
        """Fractional indicator with the largest value (ties by lowest index)"""

        best = None

        for i, value in enumerate(y):
            if min(value, 1.0 - value) <= self.INTEGRALITY_TOL:
                continue

            if best is None or value > y[best]:
                best = i

        return best

    def _leaf(self, members, incumbent, deadline):
        """Certify an integral node and polish it by local search"""

        candidate = coalition_objection(self.game, members, self.u_star, self.mode)

        if candidate is None or not candidate.sortKey() < incumbent.sortKey():
            return incumbent

        candidate = improve_coalition(self.game, candidate, self.u_star, deadline=deadline, threads=self.threads)

        logger.debug(f"New incumbent {candidate} after {self.nodes} nodes")

        return candidate

    def _solveBatch(self, executor, programs):

        if executor is not None and len(programs) > 1:
            return list(executor.map(solve, programs))

        return [solve(lp) for lp in programs]

    def run(self, incumbent):
        """ Best-first search from a seed incumbent; returns the best Objection.

        Up to `threads` open nodes are solved at once; their results are
        merged in the order they left the queue.
        """

        started = time.monotonic()
        deadline = None if self.budget is None else started + self.budget

        counter = itertools.count()
        heap = []

        def push(fixed, bound, depth):
            heapq.heappush(heap, (-bound, -depth, next(counter), fixed))

        push({}, self.ceiling({}, self.cutoff(incumbent)), 0)

        executor = ThreadPoolExecutor(max_workers=self.threads) if self.threads > 1 else None

        try:
            while heap:
                cutoff = self.cutoff(incumbent)

                # The best open bound cannot beat the cutoff: search complete
                if -heap[0][0] <= cutoff + self.PRUNE_TOL:
                    heap = []
                    break

                if deadline is not None and time.monotonic() >= deadline:
                    self.timed_out = True
                    logger.warning(f"Membership search hit its {self.budget:g}s budget after {self.nodes} nodes")
                    break

                batch = []

                while heap and len(batch) < self.threads and -heap[0][0] > cutoff + self.PRUNE_TOL:
                    _, depth, _, fixed = heapq.heappop(heap)
                    batch.append((fixed, -depth))

                results = self._solveBatch(executor, [self.nodeProgram(fixed, cutoff) for fixed, _ in batch])

                for (fixed, depth), result in zip(batch, results):
                    self.nodes += 1

                    if not result.optimal:
                        continue

                    cutoff = self.cutoff(incumbent)

                    if result.objective_value <= cutoff + self.PRUNE_TOL:
                        continue

                    y = result.x[self.y_offset:]
                    player = self._branchPlayer(y)

                    if player is None:
                        members = [i for i, value in enumerate(y) if value > 0.5]
                        incumbent = self._leaf(members, incumbent, deadline)
                        continue

                    for value in (1, 0):
                        child = dict(fixed)
                        child[player] = value

                        bound = min(result.objective_value, self.ceiling(child, cutoff))

                        if bound > cutoff + self.PRUNE_TOL:
                            push(child, bound, depth + 1)
        finally:
            if executor is not None:
                executor.shutdown()

        self.bound = self.cutoff(incumbent)

        if heap:
            self.bound = max(self.bound, -heap[0][0])

        logger.debug(f"Search explored {self.nodes} nodes, bound {self.bound:.9g}")

        return incumbent


def least_objection(game, u_star, mode=None, pool=None, budget=300.0, strict=False, threads=1, heuristic=True, margin=None):
    """ Compute the least objection of u* (exact above the margin, or a flagged lower bound on timeout).

    Args:
        game - the Game
        u_star - incumbent utility vector (assumed attainable by the grand coalition)
        mode - ObjectionMode (default additive, floor 1e-3)
        pool - optional CoalitionPool of warm-start candidates
        budget - time limit in seconds for the whole call (None for no limit)
        strict - raise TimeBudgetExceeded instead of returning a flagged incumbent
        threads - worker threads for candidate evaluation and node LPs
        heuristic - include prefix and greedy candidates and the local search
        margin - objections within this of the baseline are neither searched
                 for nor pooled (default: the mode's floor; 0 makes the search exact)

    Returns:
        Objection, whose bound is a proven upper bound on the least objection
    """

    started = time.monotonic()
    deadline = None if budget is None else started + budget

    mode = mode or ObjectionMode()
    u_star = _checkIncumbent(u_star, mode)

    incumbent = trivial_objection(game, u_star, mode)

    candidates = [game.grandCoalition()]

    if pool is not None:
        candidates += [S for S in pool.candidates() if S not in candidates]

    if heuristic:
        for S in prefix_heuristic(game, u_star) + greedy_coalitions(game, u_star, mode):
            if S not in candidates:
                candidates.append(S)

    for candidate in _evaluateCandidates(game, candidates, u_star, mode, threads=threads):
        if candidate.sortKey() < incumbent.sortKey():
            incumbent = candidate

    if heuristic:
        incumbent = improve_coalition(game, incumbent, u_star, deadline=deadline, threads=threads)

    logger.debug(f"Warm start incumbent: {incumbent} from {len(candidates)} candidates")

    remaining = None if budget is None else max(0.0, budget - (time.monotonic() - started))

    search = MembershipSearch(game, u_star, mode, budget=remaining, strict=strict, threads=threads, margin=margin)

    best = search.run(incumbent)

    result = Objection(
        best.epsilon,
        best.coalition,
        best.plan,
        best.utilities,
        mode,
        timed_out=search.timed_out,
        nodes=search.nodes,
        wall_time=time.monotonic() - started,
        bound=search.bound,
    )

    if pool is not None and result.epsilon > search.screen:
        pool.add(result.coalition, result.epsilon)

    logger.info(f"Least objection {result.epsilon:.9g} ({mode.kind}) by {result.coalition.label()} after {result.nodes} nodes")

    if result.timed_out and strict:
        raise TimeBudgetExceeded(f"Membership search exceeded its {budget:g}s budget", incumbent=result)

    return result
