# -*- coding: utf-8 -*-

"""
Shared test case class, plus unit tests for the model base classes
"""

import os
import shutil
import sys
import tempfile
import unittest
from fractions import Fraction
from importlib import util

import numpy as np

sys.path.append(os.path.abspath(os.path.dirname(__file__)))

from ntucore import instances, transit  # noqa: E402
from ntucore.base import NtuObject  # noqa: E402
from ntucore.game import Game  # noqa: E402

# Acceptance-scale tests run only with NTUCORE_SLOW set (invoke test --slow)
slow = unittest.skipUnless(os.environ.get('NTUCORE_SLOW'), "acceptance-scale test (set NTUCORE_SLOW=1)")


class NtuTestCase(unittest.TestCase):
    """Base class for ntucore unit tests (helpers only, no tests of its own)"""

    def emptyCoreGame(self):
        return instances.gen_empty_core_example()

    def dilemmaGame(self):
        """Riders (1, 2, 3) on lines (A, B): v = (1, 0), (1, 1), (1, 1); A = (6, 2); unit fares"""
        return transit.gen_transit_game(transit.gen_dilemma_scenario())

    def tempDir(self):
        """Create a temporary directory which is removed after the test"""

        path = tempfile.mkdtemp(prefix='ntucore-test-')
        self.addCleanup(shutil.rmtree, path, True)

        return path

    def assertVectorAlmostEqual(self, first, second, tol=1e-7):
        first = np.asarray(first, dtype=float)
        second = np.asarray(second, dtype=float)

        self.assertEqual(first.shape, second.shape)

        if first.size:
            self.assertLessEqual(float(np.max(np.abs(first - second))), tol, f"{first} != {second}")


class BaseModelTests(NtuTestCase):
    """Simple unit tests for the NtuObject class"""

    def test_create(self):
        """Model objects must be created from a dict"""

        with self.assertRaises(TypeError):
            NtuObject('data')

        obj = NtuObject()
        self.assertEqual(len(obj.keys()), 0)

    def test_data_access(self):
        """Test data access functionality"""

        obj = NtuObject(
            data={
                "name": "My name",
                "size": 3,
            }
        )

        # Test __getattr__ access
        self.assertEqual(obj.name, "My name")
        self.assertEqual(obj.size, 3)

        with self.assertRaises(AttributeError):
            print(obj.doesNotExist)

        # Test __getitem__ access
        self.assertEqual(obj['name'], 'My name')

        for k in ['fake', 'data', 'values']:
            with self.assertRaises(KeyError):
                print(obj[k])

        self.assertIn('size', obj)
        self.assertNotIn('fake', obj)

    def test_immutable(self):
        """Model data cannot be overwritten"""

        obj = NtuObject(data={'name': 'x'})

        with self.assertRaises(AttributeError):
            obj.name = 'y'

        with self.assertRaises(TypeError):
            obj['name'] = 'y'

        # toDict returns a copy
        data = obj.toDict()
        data['name'] = 'z'
        self.assertEqual(obj.name, 'x')

    def test_valid(self):

        class Thing(NtuObject):
            REQUIRED_FIELDS = ('a', 'b')

        self.assertTrue(Thing({'a': 1, 'b': 2}).is_valid())
        self.assertFalse(Thing({'a': 1}).is_valid())
        self.assertEqual(Thing.getModelType(), 'thing')
        self.assertEqual(Game.getModelType(), 'game')

    def test_metadata(self):
        """Test metadata functionality for the Game model"""

        game = self.emptyCoreGame()

        self.assertEqual(game.getMetadata(), {'family': 'empty-core'})

        # Metadata is merged by default
        tagged = game.withMetadata({'note': 'first'})
        self.assertEqual(tagged.getMetadata(), {'family': 'empty-core', 'note': 'first'})

        # ... or replaced
        tagged = tagged.withMetadata({'note': 'second'}, overwrite=True)
        self.assertEqual(tagged.getMetadata(), {'note': 'second'})

        # The original object is untouched
        self.assertEqual(game.getMetadata(), {'family': 'empty-core'})
        self.assertEqual(tagged, game)
        self.assertEqual(tagged.v[2][0], Fraction(-2, 3))

        with self.assertRaises(TypeError):
            game.withMetadata('note')


class ReleaseCheckTests(NtuTestCase):
    """The release tag check used by 'invoke check-version'"""

    def loadScript(self):
        path = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'ci', 'check_version_number.py')

        spec = util.spec_from_file_location('check_version_number', path)
        module = util.module_from_spec(spec)
        spec.loader.exec_module(module)

        return module

    def test_version_file(self):

        from ntucore.base import NTUCORE_VERSION

        script = self.loadScript()

        self.assertEqual(script.read_version(), NTUCORE_VERSION)

    def test_tags(self):

        script = self.loadScript()
        version = script.read_version()

        self.assertEqual(script.main([version]), 0)
        self.assertEqual(script.main(['v' + version]), 0)
        self.assertEqual(script.main(['v' + version + '.1']), 1)

        self.assertTrue(script.tag_matches('v1.2.3', '1.2.3'))
        self.assertFalse(script.tag_matches('1.2', '1.2.3'))

        # Ambiguous version files are rejected
        path = os.path.join(self.tempDir(), 'base.py')

        with open(path, 'w') as f:
            f.write('NTUCORE_VERSION = "1.0"\nNTUCORE_VERSION = "1.1"\n')

        self.assertIsNone(script.read_version(path))
