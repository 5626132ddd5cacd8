# -*- coding: utf-8 -*-

"""
Unit tests for settings resolution
"""

import json
import logging
import os
import sys
from unittest import mock

sys.path.append(os.path.abspath(os.path.dirname(__file__)))

from test_base import NtuTestCase  # noqa: E402

from ntucore.config import Settings, loadConfigFile  # noqa: E402
from ntucore.exceptions import ParseError  # noqa: E402


class SettingsTest(NtuTestCase):

    def configFile(self, data):

        path = os.path.join(self.tempDir(), 'config.json')

        with open(path, 'w') as f:
            if isinstance(data, str):
                f.write(data)
            else:
                json.dump(data, f)

        return path

    @mock.patch.dict(os.environ, {}, clear=True)
    def test_defaults(self):

        settings = Settings()

        self.assertEqual(settings.threads, 1)
        self.assertEqual(settings.time_budget, 300.0)
        self.assertEqual(settings.log_level, 'WARNING')
        self.assertEqual(settings.seed, 0)
        self.assertEqual(settings.logLevel(), logging.WARNING)

    def test_precedence(self):

        path = self.configFile({'threads': 3, 'seed': 9})

        with mock.patch.dict(os.environ, {'NTUCORE_THREADS': '2', 'NTUCORE_SEED': '5', 'NTUCORE_LOG_LEVEL': 'info'}):

            # Environment over defaults
            settings = Settings()
            self.assertEqual(settings.threads, 2)
            self.assertEqual(settings.logLevel(), logging.INFO)

            # Config file over environment
            settings = Settings(config_file=path)
            self.assertEqual(settings.threads, 3)
            self.assertEqual(settings.seed, 9)

            # Keyword arguments over everything
            settings = Settings(config_file=path, threads=4, seed=None)
            self.assertEqual(settings.threads, 4)
            self.assertEqual(settings.seed, 9)

    @mock.patch.dict(os.environ, {}, clear=True)
    def test_extra_values(self):

        path = self.configFile({'mode': 'multiplicative', 'secondary-weight': 0.01})

        settings = Settings(config_file=path, delta=0.1, floor=None)

        self.assertEqual(settings.get('mode'), 'multiplicative')
        self.assertEqual(settings.get('secondary_weight'), 0.01)
        self.assertEqual(settings.get('delta'), 0.1)
        self.assertIsNone(settings.get('floor'))
        self.assertEqual(settings.get('missing', 7), 7)
        self.assertEqual(settings.get('threads'), 1)

        data = settings.asDict()

        self.assertEqual(data['delta'], 0.1)
        self.assertEqual(data['mode'], 'multiplicative')
        self.assertEqual(data['threads'], 1)
        self.assertNotIn('floor', data)
        self.assertEqual(list(data.keys()), sorted(data.keys()))

    @mock.patch.dict(os.environ, {}, clear=True)
    def test_manifest_config(self):
        """A run manifest can be fed back as a config file"""

        path = self.configFile({'argv': ['solve'], 'config': {'threads': 2, 'objective': 'maximin'}})

        settings = Settings(config_file=path)

        self.assertEqual(settings.threads, 2)
        self.assertEqual(settings.get('objective'), 'maximin')

    def test_invalid(self):

        with self.assertRaises(ValueError):
            Settings(threads=0)

        with self.assertRaises(ValueError):
            Settings(time_budget=-1)

        settings = Settings(log_level='chatty')

        with self.assertLogs('ntucore', level='WARNING'):
            self.assertEqual(settings.logLevel(), logging.WARNING)

    def test_bad_files(self):

        with self.assertRaises(FileNotFoundError):
            loadConfigFile(os.path.join(self.tempDir(), 'missing.json'))

        with self.assertRaises(ParseError) as error:
            loadConfigFile(self.configFile('{\n  "threads": \n}'))

        self.assertEqual(error.exception.line, 3)

        with self.assertRaises(ParseError):
            loadConfigFile(self.configFile('[1, 2]'))
