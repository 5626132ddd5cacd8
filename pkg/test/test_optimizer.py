# -*- coding: utf-8 -*-

"""
Unit tests for the cutting plane optimizer
"""

import os
import sys
from unittest import mock

import numpy as np

sys.path.append(os.path.abspath(os.path.dirname(__file__)))

from test_base import NtuTestCase, slow  # noqa: E402

from ntucore import instances, transit  # noqa: E402
from ntucore.exceptions import NumericalBreakdown  # noqa: E402
from ntucore.game import Game, check_balanced_sufficient  # noqa: E402
from ntucore.membership import Objection, ObjectionMode, least_objection, singleton_lower_bounds  # noqa: E402
from ntucore.optimizer import (Objective, RunConfig, RunStatus, Trajectory, grand_optimum,  # noqa: E402
                               master_program, maximin_extension, solve_over_core, welfare)
from ntucore.oracle import is_blocked_exact  # noqa: E402
from ntucore.simplex import LinearProgram, solve  # noqa: E402


class ObjectiveTest(NtuTestCase):

    def test_objective(self):

        self.assertEqual(str(Objective.utilitarian()), 'utilitarian')
        self.assertFalse(Objective.utilitarian().extended)
        self.assertTrue(Objective.maximin().extended)
        self.assertAlmostEqual(Objective.maximin().secondary_weight, 1e-4)

        with self.assertRaises(ValueError):
            Objective('egalitarian')

        with self.assertRaises(ValueError):
            Objective.maximin(secondary_weight=0)

        with self.assertRaises(ValueError):
            Objective(Objective.CUSTOM)

    def test_config(self):

        config = RunConfig()

        self.assertEqual(config.objective.kind, Objective.UTILITARIAN)
        self.assertTrue(config.accepts(1e-3))
        self.assertFalse(config.accepts(2e-3))

        multiplicative = RunConfig(mode=ObjectionMode.multiplicative(), delta=0.01)

        self.assertTrue(multiplicative.accepts(1.005))
        self.assertFalse(multiplicative.accepts(1.02))

        record = multiplicative.asDict()

        self.assertEqual(record['mode'], ObjectionMode.MULTIPLICATIVE)
        self.assertEqual(record['max_iterations'], 100)

        with self.assertRaises(ValueError):
            RunConfig(delta=-1)

        with self.assertRaises(ValueError):
            RunConfig(max_iterations=0)

    def test_welfare(self):

        self.assertAlmostEqual(welfare([1, 2, 3], Objective.UTILITARIAN), 6)
        self.assertAlmostEqual(welfare([1, 2, 3], Objective.MAXIMIN), 1)

        with self.assertRaises(ValueError):
            welfare([1], 'nash')


class TrajectoryTest(NtuTestCase):

    def record(self, iteration):
        values = {column: 0.0 for column in Trajectory.COLUMNS}
        values.update(iteration=iteration, wall_time=1.0)

        return values

    def test_append(self):

        trajectory = Trajectory()

        trajectory.append(**self.record(0))
        trajectory.append(**self.record(1))
        trajectory.update(cuts_added=3)

        self.assertEqual(len(trajectory), 2)
        self.assertEqual(trajectory.column('cuts_added'), [0.0, 3])

        with self.assertRaises(ValueError):
            trajectory.append(**self.record(1))

    def test_frame(self):

        trajectory = Trajectory()
        trajectory.append(**self.record(0))

        frame = trajectory.toFrame()

        self.assertEqual(list(frame.columns), list(Trajectory.COLUMNS))
        self.assertIn('wall_time', trajectory.toFrame(timing=True).columns)


class MasterProgramTest(NtuTestCase):

    def test_bounds(self):

        game = self.dilemmaGame()

        lp, layout = master_program(game)

        self.assertEqual(lp.size, 5)
        self.assertVectorAlmostEqual(lp.lower[layout.uSlice()], [1 / 6, 0.5, 0.5])
        self.assertVectorAlmostEqual(lp.upper[layout.uSlice()], [0.5, 1.5, 1.5])

        lp, layout = master_program(game, Objective.maximin())

        self.assertEqual(lp.size, 6)
        self.assertEqual(layout.w_index, 5)
        self.assertAlmostEqual(lp.objective[layout.w_index], 1.0)

    def test_custom(self):

        game = self.dilemmaGame()

        lp, _ = master_program(game, Objective.custom([0, 0, 1, 0, 0]))

        self.assertVectorAlmostEqual(lp.objective, [0, 0, 1, 0, 0])

        with self.assertRaises(ValueError):
            master_program(game, Objective.custom([1, 0]))

    def test_grand_optimum(self):

        x, u = grand_optimum(self.dilemmaGame())

        self.assertVectorAlmostEqual(u, [1 / 6, 7 / 6, 7 / 6])
        self.assertAlmostEqual(float(np.sum(u)), 2.5)

        _, u = grand_optimum(self.dilemmaGame(), Objective.maximin())

        self.assertVectorAlmostEqual(u, [0.5, 0.5, 0.5])


class MaximinExtensionTest(NtuTestCase):

    def maxMin(self, game, lower=None, upper=None, secondary_weight=0.0):
        system, objective = maximin_extension(game, secondary_weight, lower=lower, upper=upper)
        return solve(LinearProgram.fromSystem(system, objective, sense='max'))

    def test_rows(self):
        """One epigraph row w - u_i <= 0 per player after the Z(N) rows"""

        game = self.dilemmaGame()
        layout = game.layout(extra=1)

        system, objective = maximin_extension(game)

        rows = system.rows[-game.players:]

        self.assertEqual(len(system.rows), len(master_program(game)[0].rows) + game.players)

        for i, (coefficients, sense, rhs) in enumerate(rows):
            expected = np.zeros(layout.size)
            expected[layout.w_index] = 1.0
            expected[layout.u_offset + i] = -1.0

            self.assertVectorAlmostEqual(coefficients, expected)
            self.assertEqual(sense, '<=')
            self.assertEqual(rhs, 0.0)

        # Base rows never involve w
        for coefficients, _, _ in system.rows[:-game.players]:
            self.assertEqual(coefficients[layout.w_index], 0.0)

        self.assertAlmostEqual(objective[layout.w_index], 1.0)
        self.assertVectorAlmostEqual(objective[layout.uSlice()], [1e-4] * 3)
        self.assertVectorAlmostEqual(objective[layout.xSlice()], [0, 0])

    def test_bounds(self):

        game = self.dilemmaGame()
        layout = game.layout(extra=1)

        system, _ = maximin_extension(game)

        self.assertEqual(system.lower[layout.w_index], -np.inf)
        self.assertEqual(system.upper[layout.w_index], np.inf)

        system, _ = maximin_extension(game, lower=[1 / 6, 0.5, 0.5], upper=[0.5, 1.5, 1.5])

        self.assertAlmostEqual(system.lower[layout.w_index], 1 / 6)
        self.assertAlmostEqual(system.upper[layout.w_index], 1.5)
        self.assertVectorAlmostEqual(system.lower[layout.uSlice()], [1 / 6, 0.5, 0.5])
        self.assertVectorAlmostEqual(system.upper[layout.uSlice()], [0.5, 1.5, 1.5])

    def test_symmetric_players(self):
        """Two identical players: w is their common utility"""

        game = Game.create([[1]], [[1], [1]], [[1], [1]])
        layout = game.layout(extra=1)

        result = self.maxMin(game)

        self.assertTrue(result.optimal)
        self.assertAlmostEqual(result.objective_value, 2.0)
        self.assertAlmostEqual(result.x[layout.w_index], 2.0)
        self.assertVectorAlmostEqual(result.x[layout.uSlice()], [2, 2])

    def test_empty_core_max_min(self):
        """The grand coalition alone maximizes the minimum at x = (0, 3)"""

        game = self.emptyCoreGame()
        layout = game.layout(extra=1)

        result = self.maxMin(game)

        self.assertAlmostEqual(result.objective_value, 1.0)
        self.assertVectorAlmostEqual(result.x[layout.xSlice()], [0, 3])

        # Individual rationality does not bind, and the secondary weight only adds total utility
        lower = singleton_lower_bounds(game)

        self.assertAlmostEqual(self.maxMin(game, lower=lower).objective_value, 1.0)

        weighted = self.maxMin(game, secondary_weight=1e-4)

        self.assertAlmostEqual(weighted.objective_value, 1.0 + 3e-4)
        self.assertAlmostEqual(weighted.x[layout.w_index], 1.0)


class SolveOverCoreTest(NtuTestCase):

    def test_utilitarian_dilemma(self):
        """The utilitarian optimum is already in the core"""

        solution = solve_over_core(self.dilemmaGame())

        self.assertEqual(solution.status, RunStatus.CONVERGED)
        self.assertTrue(solution.converged)
        self.assertEqual(len(solution.trajectory), 1)
        self.assertEqual(solution.cuts, [])
        self.assertVectorAlmostEqual(solution.utilities, [1 / 6, 7 / 6, 7 / 6], tol=1e-6)
        self.assertAlmostEqual(solution.welfare(Objective.UTILITARIAN), 2.5)
        self.assertIn('Converged', str(solution))

    def test_maximin_dilemma(self):
        """The maximin run must give up rider 1's share to riders 2 and 3"""

        config = RunConfig(objective=Objective.maximin(), max_iterations=50)

        solution = solve_over_core(self.dilemmaGame(), config)

        self.assertEqual(solution.status, RunStatus.CONVERGED)
        self.assertLessEqual(len(solution.trajectory), 5)

        # The first iterate is the unconstrained maximin allocation
        first = solution.trajectory.records[0]

        self.assertAlmostEqual(first['maximin'], 0.5)
        self.assertAlmostEqual(first['epsilon'], 0.5)
        self.assertEqual(first['coalition_size'], 2)
        self.assertGreater(first['cuts_added'], 0)

        self.assertLessEqual(solution.welfare(Objective.MAXIMIN), 0.5 + 1e-9)
        self.assertGreater(len(solution.cuts), 0)

        frame = solution.cutFrame()

        self.assertEqual(frame['source'].iloc[0], "{2,3}")

        u = solution.utilities

        self.assertGreaterEqual(max(u[1], u[2]), 1.0 - 1e-3 - 1e-6)
        self.assertLessEqual(min(u), 0.25 + 1e-3)
        self.assertLessEqual(least_objection(self.dilemmaGame(), u).epsilon, config.delta + 1e-6)
        self.assertLessEqual(is_blocked_exact(self.dilemmaGame(), u).value, config.delta + 1e-6)

    def test_empty_core(self):

        config = RunConfig(max_iterations=10)

        solution = solve_over_core(self.emptyCoreGame(), config)

        self.assertNotEqual(solution.status, RunStatus.CONVERGED)
        self.assertGreaterEqual(len(solution.trajectory), 1)

        if solution.status != RunStatus.RELAXATION_INFEASIBLE:
            self.assertGreater(solution.trajectory.records[-1]['epsilon'], config.delta)

    def checkBalancedGame(self, game, config):
        """Nonnegative valuations guarantee a core point, which the run must reach"""

        self.assertTrue(check_balanced_sufficient(game).guaranteed)

        solution = solve_over_core(game, config)

        self.assertEqual(solution.status, RunStatus.CONVERGED, f"{game.getMetadata()}")

        # Individual rationality holds at the final iterate
        self.assertTrue(np.all(solution.utilities >= singleton_lower_bounds(game) - 1e-6))

        verdict = is_blocked_exact(game, solution.utilities)
        self.assertLessEqual(verdict.value, config.delta + 1e-6)

    def test_random_games(self):

        for seed in range(3):
            self.checkBalancedGame(instances.gen_random_game(3, 2, seed=seed), RunConfig(max_iterations=100, threads=2))

    @slow
    def test_random_games_full(self):
        """100 balanced games with up to 8 players"""

        for seed in range(100):
            game = instances.gen_random_game(2 + seed % 7, 2 + seed % 3, resources=1 + (seed // 7) % 2, seed=seed)

            self.checkBalancedGame(game, RunConfig(max_iterations=100, membership_budget=60))

    def test_search_margin(self):
        """Searches skip objections below both the floor and delta"""

        config = RunConfig(delta=1e-4)

        with mock.patch('ntucore.optimizer.least_objection', wraps=least_objection) as search:
            solution = solve_over_core(self.dilemmaGame(), config)

        self.assertTrue(solution.converged)

        # The run search plus the independent re-check
        self.assertEqual(search.call_count, 2)

        for call in search.call_args_list:
            self.assertEqual(call.kwargs['margin'], 1e-4)

        with mock.patch('ntucore.optimizer.least_objection', wraps=least_objection) as search:
            solve_over_core(self.dilemmaGame(), RunConfig(delta=0.1))

        self.assertEqual(search.call_args_list[0].kwargs['margin'], 1e-3)

    def timedOut(self, game, bound):
        """A search result that found nothing but could not close its tree"""

        def search(game, u_star, **kwargs):
            return Objection(0.0, game.grandCoalition(), np.zeros(game.goods), u_star, ObjectionMode(), timed_out=True, bound=bound)

        return search

    def test_timeout_open_bound(self):
        """A timed-out search only ends the run when its bound is acceptable"""

        game = self.dilemmaGame()

        with mock.patch('ntucore.optimizer.least_objection', side_effect=self.timedOut(game, 0.5)):
            solution = solve_over_core(game)

        self.assertEqual(solution.status, RunStatus.STALLED)
        self.assertEqual(len(solution.trajectory), 1)

        with mock.patch('ntucore.optimizer.least_objection', side_effect=self.timedOut(game, 5e-4)):
            solution = solve_over_core(game)

        self.assertEqual(solution.status, RunStatus.CONVERGED)

    def test_deterministic(self):

        config = RunConfig(objective=Objective.maximin(), max_iterations=5)

        first = solve_over_core(self.dilemmaGame(), config).trajectory.toFrame()
        second = solve_over_core(self.dilemmaGame(), config).trajectory.toFrame()

        self.assertTrue(first.equals(second))

    def test_breakdown(self):
        """A numerical breakdown carries the partial trajectory"""

        with mock.patch('ntucore.optimizer.least_objection', side_effect=NumericalBreakdown("Basis lost")):
            with self.assertRaises(NumericalBreakdown) as error:
                solve_over_core(self.dilemmaGame())

        self.assertIsInstance(error.exception.trajectory, Trajectory)
        self.assertEqual(len(error.exception.trajectory), 0)


class DeskStudyTest(NtuTestCase):
    """Cooperation can only cost the planner's objective on a grid city"""

    def unconstrainedMaxMin(self, game):
        """Largest minimum utility over Z(N) with individual rationality, no secondary term"""

        lower = singleton_lower_bounds(game)
        system, objective = maximin_extension(game, secondary_weight=0.0, lower=lower)

        result = solve(LinearProgram.fromSystem(system, objective, sense='max'))

        self.assertTrue(result.optimal)

        return result.objective_value

    def checkStudy(self, game, budget, iterations):

        maximin = solve_over_core(game, RunConfig(objective=Objective.maximin(), max_iterations=iterations, membership_budget=budget))
        utilitarian = solve_over_core(game, RunConfig(max_iterations=iterations, membership_budget=budget))

        for solution in (maximin, utilitarian):
            self.assertIsNotNone(solution.utilities)
            self.assertNotEqual(solution.status, RunStatus.RELAXATION_INFEASIBLE)
            self.assertGreater(len(solution.trajectory), 0)
            self.assertTrue(np.all(np.isfinite(solution.trajectory.column('epsilon'))))

        self.assertLessEqual(maximin.welfare(Objective.MAXIMIN), self.unconstrainedMaxMin(game) + 1e-7)

        _, best = grand_optimum(game)

        self.assertLessEqual(utilitarian.welfare(Objective.UTILITARIAN), float(np.sum(best)) + 1e-7)

        return maximin, utilitarian

    def test_small_city(self):

        game = transit.gen_transit_game(transit.gen_grid_city(seed=0, lines=4, riders=12))

        self.checkStudy(game, budget=30, iterations=15)

    @slow
    def test_grid_city(self):
        """About 60 riders on 12 lines within the desk-study budget"""

        game = transit.gen_transit_game(transit.gen_grid_city(seed=0))

        for solution in self.checkStudy(game, budget=10, iterations=20):
            epsilon = solution.trajectory.column('epsilon')

            self.assertLessEqual(epsilon[-1], epsilon[0] + 1e-9)
