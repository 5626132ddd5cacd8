# -*- coding: utf-8 -*-

"""
Unit tests for reading and writing games and scenarios
"""

import json
import os
import sys

sys.path.append(os.path.abspath(os.path.dirname(__file__)))

from test_base import NtuTestCase  # noqa: E402

from ntucore import storage, transit  # noqa: E402
from ntucore.exceptions import ParseError  # noqa: E402


class GameFileTest(NtuTestCase):

    def writeJson(self, data, name='game.json'):

        path = os.path.join(self.tempDir(), name)

        with open(path, 'w') as f:
            if isinstance(data, str):
                f.write(data)
            else:
                json.dump(data, f)

        return path

    def test_roundtrip(self):

        game = self.dilemmaGame()
        path = os.path.join(self.tempDir(), 'game.json')

        storage.save_game(game, path)

        with open(path) as f:
            data = json.load(f)

        self.assertEqual(data['players'], 3)
        self.assertEqual(data['A'], [["6", "2"]])
        self.assertEqual(data['labels'], ['r1', 'r2', 'r3'])

        loaded = storage.load_game(path)

        self.assertEqual(loaded, game)
        self.assertEqual(loaded.labels, game.labels)
        self.assertEqual(loaded.getMetadata(), game.getMetadata())

    def test_rationals(self):

        data = storage.gameToDict(self.emptyCoreGame())

        self.assertEqual(data['v'][2], ["-2/3", "1/3"])
        self.assertNotIn('labels', data)

        game = storage.gameFromDict(data)

        self.assertEqual(game, self.emptyCoreGame())

    def test_missing_field(self):

        data = storage.gameToDict(self.emptyCoreGame())
        del data['v']

        with self.assertRaises(ParseError) as error:
            storage.load_game(self.writeJson(data))

        self.assertEqual(error.exception.field, 'v')

    def test_bad_shape(self):

        data = storage.gameToDict(self.emptyCoreGame())
        data['b'] = [["1"], ["1"]]

        with self.assertRaises(ParseError) as error:
            storage.gameFromDict(data)

        self.assertEqual(error.exception.field, 'b')

        data = storage.gameToDict(self.emptyCoreGame())
        data['A'] = [["1"]]

        with self.assertRaises(ParseError):
            storage.gameFromDict(data)

        data = storage.gameToDict(self.emptyCoreGame())
        data['labels'] = ['a']

        with self.assertRaises(ParseError) as error:
            storage.gameFromDict(data)

        self.assertEqual(error.exception.field, 'labels')

    def test_bad_rational(self):

        data = storage.gameToDict(self.emptyCoreGame())
        data['v'][0][1] = "1/0"

        with self.assertRaises(ParseError) as error:
            storage.gameFromDict(data)

        self.assertEqual(error.exception.field, 'v')

        data['players'] = 'three'

        with self.assertRaises(ParseError):
            storage.gameFromDict(data)

        with self.assertRaises(ParseError):
            storage.gameFromDict([1, 2, 3])

    def test_bad_json(self):

        path = self.writeJson('{\n  "players": 3,\n  "A": [\n}')

        with self.assertRaises(ParseError) as error:
            storage.load_game(path)

        self.assertEqual(error.exception.line, 4)

        # ParseError is a ValueError too
        with self.assertRaises(ValueError):
            storage.load_game(path)

    def test_missing_file(self):

        with self.assertRaises(FileNotFoundError):
            storage.load_game(os.path.join(self.tempDir(), 'missing.json'))


class ScenarioFileTest(NtuTestCase):

    def test_roundtrip(self):

        scenario = transit.gen_grid_city(seed=2, lines=3, riders=10)
        directory = self.tempDir()

        storage.save_scenario(scenario, directory)

        for filename in ('nodes.csv', 'lines.csv', 'riders.csv'):
            self.assertTrue(os.path.exists(os.path.join(directory, filename)))

        loaded = storage.load_scenario(directory)

        self.assertEqual(loaded.nodes, scenario.nodes)
        self.assertEqual(loaded.riders, scenario.riders)
        self.assertEqual([line['stops'] for line in loaded.lines], [line['stops'] for line in scenario.lines])

        for a, b in zip(loaded.lines, scenario.lines):
            self.assertAlmostEqual(a['length'], b['length'])

        self.assertEqual(transit.gen_transit_game(loaded), transit.gen_transit_game(scenario))

    def test_missing_file(self):

        directory = self.tempDir()

        storage.save_scenario(transit.gen_dilemma_scenario(), directory)
        os.remove(os.path.join(directory, 'riders.csv'))

        with self.assertRaises(FileNotFoundError):
            storage.load_scenario(directory)

    def test_bad_values(self):

        directory = self.tempDir()

        storage.save_scenario(transit.gen_dilemma_scenario(), directory)

        path = os.path.join(directory, 'riders.csv')

        with open(path, 'w') as f:
            f.write("rider,origin,destination,fare\n0,2,0,1\n1,zero,1,1\n")

        with self.assertRaises(ParseError) as error:
            storage.load_scenario(directory)

        self.assertEqual(error.exception.field, 'origin')
        self.assertEqual(error.exception.line, 3)

        with open(path, 'w') as f:
            f.write("rider,origin,fare\n0,2,1\n")

        with self.assertRaises(ParseError) as error:
            storage.load_scenario(directory)

        self.assertEqual(error.exception.field, 'destination')
