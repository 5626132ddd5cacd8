# -*- coding: utf-8 -*-

"""
Intersection cuts against the utility set of a blocking coalition.

Given an optimal vertex of the relaxation lying strictly inside U'(S), each
tableau ray is followed until it leaves U'(S). With step lengths lambda_r
the inequality sum_r f_r / lambda_r >= 1 (f_r the nonbasic variables, 1/inf
taken as 0) cuts the vertex off while keeping every point outside int U'(S).
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ntucore.exceptions import AllRaysInterior, PointNotInterior
from ntucore.game import extended_utility_space
from ntucore.simplex import LinearProgram, Status, extract_rays, solve

logger = logging.getLogger('ntucore')

# Strict interiority threshold
INTERIOR_TOL = 1e-9

# Filter thresholds
MAX_COEFFICIENT = 1e6
MIN_COEFFICIENT = 1e-6
MAX_RANGE = 1e6
MIN_DEPTH = 1e-7

# Relative size below which a coefficient is dropped from an assembled cut
NEGLIGIBLE = 1e-12


class CutRecord(object):
    """ An intersection cut coefficients^T z >= rhs with its provenance.

    Attributes:
        coefficients - vector over the relaxation's variables
        rhs - right-hand side
        sense - always '>='
        source - Coalition whose utility set generated the cut
        depth - violation at the generating vertex divided by the coefficient norm
        violation - rhs minus the left-hand side at the generating vertex
        replay - True for cuts regenerated from the coalition pool
    """

    sense = '>='

    def __init__(self, coefficients, rhs, source=None, depth=0.0, violation=0.0, replay=False):
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.rhs = float(rhs)
        self.source = source
        self.depth = float(depth)
        self.violation = float(violation)
        self.replay = replay

    @property
    def stats(self):
        """(min nonzero |coef|, max |coef|, range ratio)"""

        magnitudes = np.abs(self.coefficients)
        nonzero = magnitudes[magnitudes > 0]

        if nonzero.size == 0:
            return (0.0, 0.0, 0.0)

        return (float(nonzero.min()), float(nonzero.max()), float(nonzero.max() / nonzero.min()))

    def row(self):
        return (self.coefficients, self.sense, self.rhs)

    def violationAt(self, point):
        """Amount by which a point violates the cut (negative when satisfied)"""
        return self.rhs - float(self.coefficients @ np.asarray(point, dtype=float))

    def isSatisfied(self, point, tol=1e-6):
        return self.violationAt(point) <= tol

    def asRecord(self):
        smallest, largest, ratio = self.stats

        return {
            'source': self.source.label() if self.source is not None else '',
            'size': len(self.source) if self.source is not None else 0,
            'depth': self.depth,
            'violation': self.violation,
            'min_coef': smallest,
            'max_coef': largest,
            'range': ratio,
            'replay': self.replay,
        }

    def __str__(self):
        source = self.source.label() if self.source is not None else '?'
        return f"CutRecord<{source}, depth={self.depth:.3e}>"


class CutDecision(object):
    """Outcome of filter_cut: accepted, or rejected with a reason"""

    def __init__(self, accepted, reason=''):
        self.accepted = accepted
        self.reason = reason

    def __bool__(self):
        return self.accepted

    def __str__(self):
        return "accept" if self.accepted else f"reject({self.reason})"


def _splitPoint(point, system):

    point = np.asarray(point, dtype=float)
    size = point.size

    A = system.matrix()

    return point, size, A[:, :size], A[:, size:]


def interior_margin(point, system):
    """ Largest uniform slack of a point in a (possibly lifted) system.

    The first len(point) coordinates of the system are the point; any
    further coordinates are auxiliary and chosen freely. Rows that touch
    the point must hold with the common slack, rows on auxiliary
    coordinates alone only need to hold. Finite bounds on point coordinates
    count as rows. The result is capped at 1.
    """

    point, size, P, Q = _splitPoint(point, system)

    margin = 1.0

    for j in range(size):
        if np.isfinite(system.lower[j]):
            margin = min(margin, point[j] - system.lower[j])
        if np.isfinite(system.upper[j]):
            margin = min(margin, system.upper[j] - point[j])

    aux = system.size - size

    if aux == 0:
        slacks = system.slacks(point)

        if slacks.size:
            margin = min(margin, float(slacks.min()))

        return float(margin)

    # LP over (auxiliary coordinates, t): maximize t
    rows = []

    for k, (coefficients, sense, rhs) in enumerate(system.rows):
        touches = bool(np.any(P[k] != 0))
        fixed = float(P[k] @ point)

        row = np.zeros(aux + 1)
        row[:aux] = Q[k]

        if sense == '<=':
            row[aux] = 1.0 if touches else 0.0
            rows.append((row, '<=', rhs - fixed))
        elif sense == '>=':
            row[aux] = -1.0 if touches else 0.0
            rows.append((row, '>=', rhs - fixed))
        else:
            rows.append((row, '==', rhs - fixed))

    lower = np.append(system.lower[size:], -np.inf)
    upper = np.append(system.upper[size:], margin)

    objective = np.zeros(aux + 1)
    objective[aux] = 1.0

    result = solve(LinearProgram(aux + 1, objective=objective, sense='max', rows=rows, lower=lower, upper=upper))

    if not result.optimal:
        return -np.inf

    return float(result.objective_value)


def compute_lambda(point, ray, system, tol=INTERIOR_TOL):
    """ Step length max{lambda >= 0 : point + lambda * ray in the system}.

    Explicit systems use a ratio test over rows and bounds; lifted systems
    (with auxiliary coordinates) solve a small LP. Returns numpy.inf when
    the ray never leaves the set.
    """

    point, size, P, Q = _splitPoint(point, system)
    ray = np.asarray(ray, dtype=float)

    aux = system.size - size

    if aux == 0:
        step = np.inf

        for j in range(size):
            for bound, sign in ((system.lower[j], -1.0), (system.upper[j], 1.0)):
                if not np.isfinite(bound):
                    continue

                slack = sign * (bound - point[j])
                rate = sign * ray[j]

                if slack < -tol:
                    raise PointNotInterior(f"Point violates the bound of coordinate {j} by {-slack:.3e}")

                if rate > 0:
                    step = min(step, max(slack, 0.0) / rate)

        for k, (coefficients, sense, rhs) in enumerate(system.rows):
            value = float(coefficients @ point)
            rate = float(coefficients @ ray)

            if sense == '>=':
                value, rate, rhs = -value, -rate, -rhs

            slack = rhs - value

            if sense == '==':
                if abs(slack) > tol:
                    raise PointNotInterior(f"Point violates equality row {k} by {abs(slack):.3e}")
                if rate != 0:
                    step = 0.0
                continue

            if slack < -tol:
                raise PointNotInterior(f"Point violates row {k} by {-slack:.3e}")

            if rate > 0:
                step = min(step, max(slack, 0.0) / rate)

        return float(step)

    # LP over (lambda, auxiliary coordinates)
    rows = []

    for k, (coefficients, sense, rhs) in enumerate(system.rows):
        row = np.zeros(aux + 1)
        row[0] = float(P[k] @ ray)
        row[1:] = Q[k]
        rows.append((row, sense, rhs - float(P[k] @ point)))

    lower = np.append([0.0], system.lower[size:])
    upper = np.append([np.inf], system.upper[size:])

    # Bounds on point coordinates limit lambda directly
    for j in range(size):
        unit = np.zeros(aux + 1)
        unit[0] = ray[j]

        if np.isfinite(system.lower[j]) and ray[j] != 0:
            rows.append((unit, '>=', system.lower[j] - point[j]))
        if np.isfinite(system.upper[j]) and ray[j] != 0:
            rows.append((unit, '<=', system.upper[j] - point[j]))

    objective = np.zeros(aux + 1)
    objective[0] = 1.0

    result = solve(LinearProgram(aux + 1, objective=objective, sense='max', rows=rows, lower=lower, upper=upper))

    if result.status == Status.UNBOUNDED:
        return np.inf

    if result.status == Status.INFEASIBLE:
        raise PointNotInterior("Point does not belong to the lifted set")

    return float(result.objective_value)


def build_intersection_cut(solution, rays, lambdas, source=None, lp=None):
    """ Assemble sum_r f_r / lambda_r >= 1 in original coordinates.

    Args:
        solution - optimal BasicSolution (the generating vertex)
        rays - TableauRays at that vertex
        lambdas - step length per ray (numpy.inf allowed)
        source - Coalition the cut is generated from
        lp - program the vertex belongs to; when given, negligible
             coefficients are dropped using its variable bounds

    Returns:
        CutRecord
    """

    vertex = np.asarray(solution.x, dtype=float)

    coefficients = np.zeros(vertex.size)
    rhs = 1.0
    finite = 0

    for ray, step in zip(rays, lambdas):
        if not np.isfinite(step):
            continue

        if step <= INTERIOR_TOL:
            raise PointNotInterior(f"Ray {ray.index} leaves the set immediately (lambda = {step:.3e})")

        if ray.gradient is None:
            raise ValueError(f"Nonbasic column {ray.index} has no affine expression (free variable)")

        coefficients += ray.gradient / step
        rhs -= ray.constant / step
        finite += 1

    if finite == 0:
        raise AllRaysInterior("No tableau ray leaves the set: the cone lies inside it")

    if lp is not None:
        largest = float(np.max(np.abs(coefficients)))

        for j in np.flatnonzero((np.abs(coefficients) < NEGLIGIBLE * largest) & (coefficients != 0)):
            reach = max(abs(lp.lower[j]), abs(lp.upper[j]))

            if np.isfinite(reach):
                rhs -= abs(coefficients[j]) * reach
                coefficients[j] = 0.0

    violation = rhs - float(coefficients @ vertex)
    norm = float(np.linalg.norm(coefficients))

    depth = violation / norm if norm > 0 else 0.0

    return CutRecord(coefficients, rhs, source=source, depth=depth, violation=violation)


def filter_cut(cut, incumbent_coalition=None, check_coefficients=True, min_depth=MIN_DEPTH):
    """ Accept or reject a cut.

    Rejects cuts whose largest coefficient exceeds 1e6, whose smallest
    nonzero coefficient is below 1e-6 or whose coefficient range exceeds 1e6,
    pool-replay cuts whose coalition intersects the incumbent blocking
    coalition, and cuts shallower than min_depth.
    """

    if check_coefficients:
        smallest, largest, ratio = cut.stats

        if largest > MAX_COEFFICIENT:
            return CutDecision(False, 'large coefficient')

        if 0 < smallest < MIN_COEFFICIENT:
            return CutDecision(False, 'small coefficient')

        if ratio > MAX_RANGE:
            return CutDecision(False, 'coefficient range')

    if cut.replay and incumbent_coalition is not None and cut.source is not None:
        if cut.source.intersects(incumbent_coalition):
            return CutDecision(False, 'overlap')

    if cut.depth < min_depth:
        return CutDecision(False, 'shallow')

    return CutDecision(True)


def generate_cut(game, coalition, lp, solution, layout, rays=None, replay=False, threads=1):
    """ Intersection cut at an optimal vertex of lp against U'(coalition).

    Args:
        game - the Game
        coalition - blocking coalition S
        lp - relaxation over (x, u[, w]) described by layout
        solution - optimal BasicSolution of lp
        layout - VariableLayout of lp's variables
        rays - TableauRays at the vertex (extracted when omitted)
        replay - mark the cut as regenerated from the pool
        threads - worker threads for the step lengths

    Returns:
        CutRecord
    """

    if layout.goods != game.goods or layout.players != game.players or layout.size != lp.size:
        raise ValueError("Cuts are only generated in the full design-utility space")

    system = extended_utility_space(game, coalition, size=layout.size, u_offset=layout.u_offset)

    vertex = np.asarray(solution.x, dtype=float)

    margin = interior_margin(vertex, system)

    if margin <= INTERIOR_TOL:
        raise PointNotInterior(
            f"Vertex is not interior to the utility set of {coalition.label()} (margin {margin:.3e})",
            detail={'margin': margin},
        )

    if rays is None:
        rays = extract_rays(solution, lp)

    def step(ray):
        return compute_lambda(vertex, ray.direction, system)

    if threads > 1 and len(rays) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            lambdas = list(executor.map(step, rays))
    else:
        lambdas = [step(ray) for ray in rays]

    cut = build_intersection_cut(solution, rays, lambdas, source=coalition, lp=lp)
    cut.replay = replay

    logger.debug(f"Generated {cut} with violation {cut.violation:.3e}")

    return cut
