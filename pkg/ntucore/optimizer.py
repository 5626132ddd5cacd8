# -*- coding: utf-8 -*-

"""
Cutting plane optimization over the core.

The master relaxation starts as the grand coalition's design-utility space
with individual rationality bounds, and is strengthened in rounds by
intersection cuts against the utility sets of blocking coalitions until
no coalition can improve on the master optimum by more than delta.
"""

import logging
import time

import numpy as np
import pandas as pd

from ntucore.cuts import filter_cut, generate_cut
from ntucore.exceptions import AllRaysInterior, NumericalBreakdown, PointNotInterior
from ntucore.game import design_utility_space, utility_bounds
from ntucore.membership import CoalitionPool, ObjectionMode, coalition_objection, least_objection, singleton_lower_bounds
from ntucore.simplex import LinearProgram, resolve_with_row, solve
from ntucore.system import ConstraintSystem

logger = logging.getLogger('ntucore')


class Objective(object):
    """ Social welfare objective of a run.

    Args:
        kind - Objective.UTILITARIAN, Objective.MAXIMIN or Objective.CUSTOM
        secondary_weight - weight of total utility added to the maximin objective
        coefficients - objective over (x, u) for custom objectives
    """

    UTILITARIAN = 'utilitarian'
    MAXIMIN = 'maximin'
    CUSTOM = 'custom'

    def __init__(self, kind=UTILITARIAN, secondary_weight=1e-4, coefficients=None):

        if kind not in (self.UTILITARIAN, self.MAXIMIN, self.CUSTOM):
            raise ValueError(f"Unknown objective '{kind}'")

        if kind == self.MAXIMIN and secondary_weight <= 0:
            raise ValueError("Maximin secondary weight must be positive")

        if kind == self.CUSTOM and coefficients is None:
            raise ValueError("Custom objectives need coefficients")

        self.kind = kind
        self.secondary_weight = float(secondary_weight)
        self.coefficients = None if coefficients is None else np.asarray(coefficients, dtype=float)

    @classmethod
    def utilitarian(cls):
        return cls(cls.UTILITARIAN)

    @classmethod
    def maximin(cls, secondary_weight=1e-4):
        return cls(cls.MAXIMIN, secondary_weight=secondary_weight)

    @classmethod
    def custom(cls, coefficients):
        return cls(cls.CUSTOM, coefficients=coefficients)

    @property
    def extended(self):
        """Maximin objectives need the epigraph variable w"""
        return self.kind == self.MAXIMIN

    def __str__(self):
        return self.kind


class RunConfig(object):
    """ Parameters of a cutting plane run.

    Args:
        objective - Objective
        delta - objection tolerance (>= 0)
        max_iterations - number of master solves allowed
        membership_budget - seconds per least objection search
        mode - ObjectionMode
        threads - worker threads for candidate evaluation and step lengths
        replay - regenerate cuts for pool coalitions that still block
    """

    def __init__(self, objective=None, delta=1e-3, max_iterations=100, membership_budget=300.0, mode=None, threads=1, replay=True):

        if delta < 0:
            raise ValueError(f"Objection tolerance must be nonnegative (got {delta})")

        if max_iterations < 1:
            raise ValueError(f"At least one iteration is required (got {max_iterations})")

        self.objective = objective or Objective.utilitarian()
        self.delta = float(delta)
        self.max_iterations = int(max_iterations)
        self.membership_budget = membership_budget
        self.mode = mode or ObjectionMode()
        self.threads = int(threads)
        self.replay = replay

    def accepts(self, epsilon):
        """Objections at or below the tolerance end the run"""
        return epsilon <= self.mode.baseline + self.delta

    def asDict(self):
        return {
            'objective': self.objective.kind,
            'secondary_weight': self.objective.secondary_weight,
            'delta': self.delta,
            'max_iterations': self.max_iterations,
            'membership_budget': self.membership_budget,
            'mode': self.mode.kind,
            'floor': self.mode.floor,
            'threads': self.threads,
            'replay': self.replay,
        }


class RunStatus:
    """Final status of a cutting plane run"""

    CONVERGED = 'Converged'
    ITERATION_CAP = 'IterationCap'
    RELAXATION_INFEASIBLE = 'RelaxationInfeasible'
    STALLED = 'Stalled'


class Trajectory(object):
    """ Per-iteration telemetry of a run """

    COLUMNS = (
        'iteration',
        'objective',
        'utilitarian',
        'maximin',
        'epsilon',
        'coalition_size',
        'cuts_added',
        'condition',
    )

    def __init__(self):
        self.records = []

    def append(self, **values):
        if self.records and values['iteration'] <= self.records[-1]['iteration']:
            raise ValueError("Trajectory iterations must be strictly increasing")

        self.records.append(values)

    def update(self, **values):
        """Update the most recent record"""
        self.records[-1].update(values)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def column(self, name):
        return [record[name] for record in self.records]

    def toFrame(self, timing=False):
        """Trajectory as a pandas DataFrame (wall time only when requested)"""

        columns = list(self.COLUMNS)

        if timing:
            columns.append('wall_time')

        return pd.DataFrame([{c: record.get(c) for c in columns} for record in self.records], columns=columns)


class CoreSolution(object):
    """ Result of solve_over_core.

    Attributes:
        plan - final design plan x*
        utilities - final utilities u*
        trajectory - Trajectory
        status - RunStatus value
        cuts - cut log (one dict per generated cut)
        objection - last least objection computed
        lp - final master program
    """

    def __init__(self, plan, utilities, trajectory, status, cuts, objection, lp):
        self.plan = plan
        self.utilities = utilities
        self.trajectory = trajectory
        self.status = status
        self.cuts = cuts
        self.objection = objection
        self.lp = lp

    @property
    def converged(self):
        return self.status == RunStatus.CONVERGED

    def welfare(self, kind):
        return welfare(self.utilities, kind)

    def cutFrame(self):
        columns = ['iteration', 'source', 'size', 'depth', 'violation', 'min_coef', 'max_coef', 'range', 'replay', 'accepted', 'reason']
        return pd.DataFrame(self.cuts, columns=columns)

    def __str__(self):
        return f"CoreSolution<{self.status}, {len(self.trajectory)} iterations>"


def welfare(u, kind):
    """Utilitarian (sum) or maximin (minimum) welfare of a utility vector"""

    u = np.asarray(u, dtype=float)

    if kind == Objective.UTILITARIAN:
        return float(np.sum(u))

    if kind == Objective.MAXIMIN:
        return float(np.min(u))

    raise ValueError(f"Unknown welfare kind '{kind}'")


def maximin_extension(game, secondary_weight=1e-4, lower=None, upper=None):
    """ Z(N) extended by w with rows w - u_i <= 0.

    Args:
        game - the Game
        secondary_weight - weight of total utility in the objective
        lower, upper - optional bounds on the utilities u

    Returns:
        (ConstraintSystem over (x, u, w), objective vector max w + weight * sum u)
    """

    layout = game.layout(extra=1)
    base = design_utility_space(game, game.grandCoalition())

    rows = []

    for coefficients, sense, rhs in base.rows:
        rows.append((np.append(coefficients, 0.0), sense, rhs))

    for i in range(game.players):
        coefficients = np.zeros(layout.size)
        coefficients[layout.w_index] = 1.0
        coefficients[layout.u_offset + i] = -1.0
        rows.append((coefficients, '<=', 0.0))

    low = np.append(base.lower, -np.inf)
    high = np.append(base.upper, np.inf)

    if lower is not None:
        low[layout.uSlice()] = lower
        low[layout.w_index] = float(np.min(lower))

    if upper is not None:
        high[layout.uSlice()] = upper
        high[layout.w_index] = float(np.max(upper))

    objective = np.zeros(layout.size)
    objective[layout.w_index] = 1.0
    objective[layout.uSlice()] = secondary_weight

    system = ConstraintSystem(layout.size, rows=rows, lower=low, upper=high, names=layout.names())

    return system, objective


def master_program(game, objective=None):
    """ Initial relaxation: Z(N) with individual rationality and utility upper bounds.

    Returns:
        (LinearProgram, VariableLayout)
    """

    objective = objective or Objective.utilitarian()

    rationality = singleton_lower_bounds(game)
    _, upper = utility_bounds(game)

    # Rounding must not make the box empty
    upper = np.maximum(upper, rationality)

    if objective.extended:
        system, coefficients = maximin_extension(game, objective.secondary_weight, lower=rationality, upper=upper)
        layout = game.layout(extra=1)

        return LinearProgram.fromSystem(system, coefficients, sense='max'), layout

    layout = game.layout()
    system = design_utility_space(game, game.grandCoalition())

    lower = system.lower.copy()
    high = system.upper.copy()

    lower[layout.uSlice()] = rationality
    high[layout.uSlice()] = upper

    if objective.kind == Objective.UTILITARIAN:
        coefficients = np.zeros(layout.size)
        coefficients[layout.uSlice()] = 1.0
    else:
        coefficients = objective.coefficients

        if coefficients.size != layout.size:
            raise ValueError(f"Custom objective has {coefficients.size} coefficients, expected {layout.size}")

    lp = LinearProgram(layout.size, objective=coefficients, sense='max', rows=system.rows, lower=lower, upper=high, names=layout.names())

    return lp, layout


def grand_optimum(game, objective=None):
    """ Optimum of the objective over Z(N) with individual rationality, ignoring coalitions.

    Returns:
        (plan, utilities), or None when infeasible
    """

    lp, layout = master_program(game, objective)
    solution = solve(lp)

    if not solution.optimal:
        return None

    return solution.x[layout.xSlice()], solution.x[layout.uSlice()]


class CuttingPlaneRun(object):
    """ State of one cutting plane run (sequential driver loop) """

    def __init__(self, game, config):
        self.game = game
        self.config = config
        self.pool = CoalitionPool()
        self.trajectory = Trajectory()
        self.cuts = []
        self.started = time.monotonic()

    def _logCut(self, iteration, cut, decision):
        record = cut.asRecord()
        record['iteration'] = iteration
        record['accepted'] = decision.accepted
        record['reason'] = decision.reason

        self.cuts.append(record)

        if not decision.accepted:
            logger.warning(f"Iteration {iteration}: rejected cut from {record['source']} ({decision.reason})")

    def _cutRound(self, iteration, lp, solution, layout, objection, u):
        """ Generate the incumbent cut plus replayed pool cuts.

        Returns the list of accepted cuts.
        """

        game = self.game
        accepted = []

        # Every member of a blocking coalition strictly gains, so u is interior to U(S)
        try:
            cut = generate_cut(game, objection.coalition, lp, solution, layout, threads=self.config.threads)
        except PointNotInterior as e:
            logger.warning(f"Iteration {iteration}: no incumbent cut ({e})")
        else:
            decision = filter_cut(cut, check_coefficients=False)
            self._logCut(iteration, cut, decision)

            if decision:
                accepted.append(cut)

        if not self.config.replay:
            return accepted

        for S in self.pool.candidates():
            if S == objection.coalition:
                continue

            replayed = coalition_objection(game, S, u, self.config.mode)

            if replayed is None or self.config.accepts(replayed.epsilon):
                continue

            try:
                cut = generate_cut(game, S, lp, solution, layout, replay=True, threads=self.config.threads)
            except PointNotInterior:
                continue

            decision = filter_cut(cut, incumbent_coalition=objection.coalition)
            self._logCut(iteration, cut, decision)

            if decision:
                accepted.append(cut)

        return accepted

    def run(self):

        game = self.game
        config = self.config

        lp, layout = master_program(game, config.objective)
        solution = solve(lp)

        objection = None
        status = RunStatus.ITERATION_CAP

        # Objections below both the floor and delta are never worth a search
        margin = min(config.mode.floor, config.delta)

        for iteration in range(config.max_iterations):

            if not solution.optimal:
                logger.error(f"Iteration {iteration}: relaxation is {solution.status}")
                status = RunStatus.RELAXATION_INFEASIBLE
                break

            x = solution.x[layout.xSlice()]
            u = solution.x[layout.uSlice()]

            objection = least_objection(
                game,
                u,
                mode=config.mode,
                pool=self.pool,
                budget=config.membership_budget,
                threads=config.threads,
                margin=margin,
            )

            self.trajectory.append(
                iteration=iteration,
                objective=solution.objective_value,
                utilitarian=welfare(u, Objective.UTILITARIAN),
                maximin=welfare(u, Objective.MAXIMIN),
                epsilon=objection.epsilon,
                coalition_size=len(objection.coalition),
                cuts_added=0,
                condition=solution.condition_estimate,
                wall_time=time.monotonic() - self.started,
            )

            logger.info(
                f"Iteration {iteration}: objective {solution.objective_value:.9g}, "
                f"epsilon {objection.epsilon:.6g}, coalition size {len(objection.coalition)}"
            )

            if config.accepts(objection.epsilon):
                if objection.timed_out and not config.accepts(objection.bound):
                    logger.warning(
                        f"Iteration {iteration}: membership search timed out without a blocking coalition "
                        f"(open bound {objection.bound:.6g})"
                    )
                    status = RunStatus.STALLED
                    break

                # Independent re-check before declaring convergence
                check = least_objection(game, u, mode=config.mode, budget=config.membership_budget, threads=config.threads, margin=margin)

                if config.accepts(check.epsilon):
                    if check.timed_out and not config.accepts(check.bound):
                        logger.warning(f"Iteration {iteration}: re-check timed out (open bound {check.bound:.6g})")
                        status = RunStatus.STALLED
                    else:
                        status = RunStatus.CONVERGED
                    break

                logger.warning(f"Iteration {iteration}: re-check found objection {check.epsilon:.6g}")
                objection = check
                self.pool.add(check.coalition, check.epsilon)

            if iteration == config.max_iterations - 1:
                status = RunStatus.ITERATION_CAP
                break

            try:
                accepted = self._cutRound(iteration, lp, solution, layout, objection, u)
            except AllRaysInterior as e:
                logger.error(f"Iteration {iteration}: {e}")
                status = RunStatus.RELAXATION_INFEASIBLE
                break

            if not accepted:
                logger.warning(f"Iteration {iteration}: every cut was rejected")
                status = RunStatus.STALLED
                break

            for cut in accepted:
                lp, solution = resolve_with_row(solution, lp, cut.row())

                if not solution.optimal:
                    break

            self.trajectory.update(cuts_added=len(accepted))

        if objection is None or not solution.optimal:
            plan = None
            utilities = None
        else:
            plan = solution.x[layout.xSlice()]
            utilities = solution.x[layout.uSlice()]

        logger.info(f"Run finished with status {status} after {len(self.trajectory)} iterations")

        return CoreSolution(plan, utilities, self.trajectory, status, self.cuts, objection, lp)


def solve_over_core(game, config=None):
    """ Optimize a linear welfare objective over the core by intersection cuts.

    Args:
        game - the Game
        config - RunConfig (default: utilitarian, delta 1e-3, 100 iterations)

    Returns:
        CoreSolution
    """

    config = config or RunConfig()

    run = CuttingPlaneRun(game, config)

    try:
        return run.run()
    except NumericalBreakdown as e:
        logger.critical(f"Numerical breakdown after {len(run.trajectory)} iterations: {e}")
        e.trajectory = run.trajectory
        raise
