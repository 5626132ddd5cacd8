# -*- coding: utf-8 -*-

"""
Unit tests for the game model and coalition geometry
"""

import os
import sys
from fractions import Fraction

import numpy as np

sys.path.append(os.path.abspath(os.path.dirname(__file__)))

from test_base import NtuTestCase  # noqa: E402

from ntucore import instances  # noqa: E402
from ntucore.exceptions import DimensionMismatch, EmptyCoalition, InvalidGame  # noqa: E402
from ntucore.game import (BalancednessVerdict, Coalition, Game, check_balanced_sufficient,  # noqa: E402
                          check_plan, design_space, design_utility_space, evaluate_utility,
                          extended_utility_space, formatRational, parseRational, pooled_endowment,
                          utilities, utility_bounds)


class RationalTest(NtuTestCase):

    def test_parse(self):

        self.assertEqual(parseRational("1/3"), Fraction(1, 3))
        self.assertEqual(parseRational(" -2/4 "), Fraction(-1, 2))
        self.assertEqual(parseRational(0.1), Fraction(1, 10))
        self.assertEqual(parseRational(np.int64(7)), Fraction(7))
        self.assertEqual(parseRational("0.25"), Fraction(1, 4))

        for value in ["1/0", "abc", True, None, float('nan')]:
            with self.assertRaises(ValueError):
                parseRational(value)

    def test_format(self):

        self.assertEqual(formatRational(Fraction(2, 6)), "1/3")
        self.assertEqual(formatRational(Fraction(4, 2)), "2")
        self.assertEqual(formatRational(-3), "-3")


class CoalitionTest(NtuTestCase):

    def test_coalition(self):

        S = Coalition([2, 0, 2])

        self.assertEqual(S.members, (0, 2))
        self.assertEqual(len(S), 2)
        self.assertIn(2, S)
        self.assertNotIn(1, S)
        self.assertEqual(S.label(), "{1,3}")
        self.assertEqual(S, Coalition((0, 2)))
        self.assertTrue(S.intersects([2, 5]))
        self.assertFalse(S.intersects(Coalition([1])))

        with self.assertRaises(EmptyCoalition):
            Coalition([])

        with self.assertRaises(ValueError):
            Coalition([-1])

    def test_order(self):

        coalitions = sorted([Coalition([1, 2]), Coalition([0, 2]), Coalition([2]), Coalition([0, 1, 2])])

        self.assertEqual([S.label() for S in coalitions], ["{1,2,3}", "{1,3}", "{2,3}", "{3}"])

    def test_game_coalitions(self):

        game = self.emptyCoreGame()

        coalitions = list(game.coalitions())

        self.assertEqual(len(coalitions), 7)
        self.assertEqual(coalitions[0], Coalition([0]))
        self.assertEqual(coalitions[3], Coalition([0, 1]))
        self.assertEqual(coalitions[-1], game.grandCoalition())

        with self.assertRaises(ValueError):
            game.coalition([0, 3])


class GameTest(NtuTestCase):

    def test_create(self):

        game = self.emptyCoreGame()

        self.assertEqual(game.players, 3)
        self.assertEqual(game.resources, 1)
        self.assertEqual(game.goods, 2)
        self.assertEqual(game.v[2][0], Fraction(-2, 3))
        self.assertEqual(game.valuations.shape, (3, 2))
        self.assertAlmostEqual(game.valuations[0, 0], 2 / 3)
        self.assertEqual(str(game), "Game<3 players, 1 resources, 2 goods>")
        self.assertEqual(game.playerLabel(0), "1")

        dilemma = self.dilemmaGame()

        self.assertEqual(dilemma.labels, ["r1", "r2", "r3"])
        self.assertEqual(dilemma.playerLabel(2), "r3")

    def test_dimensions(self):

        with self.assertRaises(DimensionMismatch):
            Game.create([[1, 1]], [[1], [1]], [[1, 1]])

        with self.assertRaises(DimensionMismatch):
            Game.create([[1, 1]], [[1]], [[1, 1, 1]])

        with self.assertRaises(DimensionMismatch):
            Game.create([[1, 1]], [[1, 2]], [[1, 1]])

        with self.assertRaises(DimensionMismatch):
            Game.create([[1, 1]], [[1]], [[1, 1]], labels=['a', 'b'])

        with self.assertRaises(InvalidGame):
            Game.create([], [[1]], [[1]])

        with self.assertRaises(InvalidGame):
            Game({'A': [[1]], 'b': [[1]]})

    def test_singleton_spaces(self):

        # Good 2 consumes nothing
        with self.assertRaises(InvalidGame):
            Game.create([[1, 0]], [[1]], [[1, 1]])

        # x1 - x2 <= 1 is unbounded
        with self.assertRaises(InvalidGame):
            Game.create([[1, -1]], [[1]], [[1, 1]])

        # x >= 0 and x <= -1
        with self.assertRaises(InvalidGame):
            Game.create([[1]], [[-1]], [[1]])

        # Negative data which is still fine
        game = Game.create([[1, -1], [0, 1]], [[1, 1]], [[1, 1]])
        self.assertEqual(game.players, 1)

        # Unchecked construction skips the LPs
        Game.create([[1, 0]], [[1]], [[1, 1]], check=False)

    def test_roundtrip(self):

        game = self.dilemmaGame()
        copy = Game.fromDict(game.toDict())

        self.assertEqual(copy, game)
        self.assertEqual(copy.getMetadata(), game.getMetadata())


class GeometryTest(NtuTestCase):

    def test_pooled_endowment(self):

        game = Game.create([[1, 1], [1, 0]], [[1, 2], [Fraction(1, 2), 0], [3, 1]], [[1, 1]] * 3)

        self.assertEqual(pooled_endowment(game, [0, 1]), (Fraction(3, 2), Fraction(2)))
        self.assertEqual(pooled_endowment(game, Coalition([2])), (Fraction(3), Fraction(1)))

    def test_utility(self):

        game = self.emptyCoreGame()

        # Exact for rational plans
        self.assertEqual(evaluate_utility(game, 0, [1, 2]), Fraction(4, 3))
        self.assertEqual(evaluate_utility(game, 2, [Fraction(1, 2), 0]), Fraction(-1, 3))

        self.assertAlmostEqual(evaluate_utility(game, 1, [0.5, 0.5]), 0.5)
        self.assertVectorAlmostEqual(utilities(game, [0, 3]), [1, 1, 1])

        with self.assertRaises(DimensionMismatch):
            evaluate_utility(game, 0, [1])

    def test_check_plan(self):

        game = self.emptyCoreGame()

        check_plan(game, [0, 1])
        check_plan(game, [-1e-9, 1])

        with self.assertRaises(ValueError):
            check_plan(game, [-1, 1])

        with self.assertRaises(DimensionMismatch):
            check_plan(game, [1, 1, 1])

    def test_design_space(self):

        game = self.emptyCoreGame()

        X = design_space(game, [0, 1])

        self.assertTrue(X.contains([1, 1]))
        self.assertFalse(X.contains([2, 1]))

        Z = design_utility_space(game, [2])

        # (x1, x2, u1, u2, u3): only u3 is tied to the plan
        self.assertTrue(Z.contains([0, 1, 100, -100, 1 / 3]))
        self.assertFalse(Z.contains([0, 1, 0, 0, 0.5]))
        self.assertTrue(np.isinf(Z.lower[3]))

    def test_utility_bounds(self):

        game = self.emptyCoreGame()

        lower, upper = utility_bounds(game)

        self.assertVectorAlmostEqual(lower, [0, 0, -2])
        self.assertVectorAlmostEqual(upper, [2, 2, 1])

        # Cached
        self.assertIs(utility_bounds(game), game._utility_bounds)

    def test_extended_space(self):

        game = self.emptyCoreGame()

        system = extended_utility_space(game, [2])

        self.assertEqual(system.size, 7)
        self.assertEqual(system.rowCount, 2)
        self.assertEqual(system.names[-1], "xs1")

        # u3 = 1/3 is reached by x^S = (0, 1); any other coordinate is free
        self.assertTrue(system.contains([5, 5, 9, -9, 1 / 3, 0, 1]))
        self.assertFalse(system.contains([0, 0, 0, 0, 1 / 3, 1, 0]))

        # With the maximin coordinate appended
        lifted = extended_utility_space(game, [0, 2], size=6, u_offset=2)

        self.assertEqual(lifted.size, 8)
        self.assertEqual(lifted.rowCount, 3)


class BalancednessTest(NtuTestCase):

    def test_nonnegative(self):

        verdict = check_balanced_sufficient(self.dilemmaGame())

        self.assertTrue(verdict.guaranteed)
        self.assertEqual(verdict.status, BalancednessVerdict.GUARANTEED)

        verdict = check_balanced_sufficient(self.emptyCoreGame())

        self.assertFalse(verdict.guaranteed)
        self.assertEqual(verdict.witness[0][0], 2)

    def test_dual_cone(self):

        verdict = check_balanced_sufficient(self.emptyCoreGame(), mode='dual_cone_grand')

        self.assertFalse(verdict.guaranteed)
        self.assertEqual([w[0] for w in verdict.witness], [2])

        verdict = check_balanced_sufficient(self.dilemmaGame(), mode='dual_cone_all')

        self.assertTrue(verdict.guaranteed)

        with self.assertRaises(ValueError):
            check_balanced_sufficient(self.dilemmaGame(), mode='other')

    def test_random_games(self):

        for seed in range(5):
            game = instances.gen_random_game(3, 2, seed=seed)

            self.assertTrue(check_balanced_sufficient(game).guaranteed)
