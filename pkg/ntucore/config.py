# -*- coding: utf-8 -*-

"""
The config module resolves run settings from keyword arguments,
a JSON config file and environment variables (in that order of precedence).
"""

import json
import logging
import os

from ntucore.exceptions import ParseError

logger = logging.getLogger('ntucore')


def loadConfigFile(path):
    """Load a JSON config file.

    Keys may be written with dashes (as on the command line) or underscores.

    Returns:
        dict mapping setting names (underscored) to values
    """

    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file '{path}' does not exist")

    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.decoder.JSONDecodeError as e:
            raise ParseError(f"Error decoding config file '{path}': {e.msg}", line=e.lineno)

    if type(data) is not dict:
        raise ParseError(f"Config file '{path}' must contain a JSON object")

    # A run manifest stores the resolved settings under 'config'
    if 'config' in data and type(data['config']) is dict:
        data = data['config']

    return {str(k).replace('-', '_'): v for k, v in data.items()}


class Settings(object):
    """
    Resolved settings for a library or command-line run.
    """

    DEFAULTS = {
        'threads': 1,
        'time_budget': 300.0,
        'log_level': 'WARNING',
        'seed': 0,
    }

    ENVIRONMENT = {
        'threads': 'NTUCORE_THREADS',
        'time_budget': 'NTUCORE_TIME_BUDGET',
        'log_level': 'NTUCORE_LOG_LEVEL',
        'seed': 'NTUCORE_SEED',
    }

    def __init__(self, config_file=None, **kwargs):
        """ Initialize settings

        Args:
            config_file - Optional JSON file with the same keys as the command line flags

        kwargs:
            threads - Worker threads for parallel coalition evaluation (default = 1)
            time_budget - Membership search budget, in seconds (default = 300)
            log_level - Logging level name (default = WARNING)
            seed - Random seed for instance generators (default = 0)

        Settings can also be specified using environment variables:
            NTUCORE_THREADS - Worker thread count
            NTUCORE_TIME_BUDGET - Membership search budget
            NTUCORE_LOG_LEVEL - Logging level name
            NTUCORE_SEED - Random seed
        """

        self.file_values = loadConfigFile(config_file) if config_file else {}
        self.extra = {}

        for key, value in kwargs.items():
            if value is not None and key not in self.DEFAULTS:
                self.extra[key] = value

        self.threads = int(self._resolve('threads', kwargs))
        self.time_budget = float(self._resolve('time_budget', kwargs))
        self.log_level = str(self._resolve('log_level', kwargs)).upper()
        self.seed = int(self._resolve('seed', kwargs))

        if self.threads < 1:
            raise ValueError(f"Thread count must be positive (got {self.threads})")

        if self.time_budget <= 0:
            raise ValueError(f"Time budget must be positive (got {self.time_budget})")

    def _resolve(self, name, kwargs):
        """Resolve a single setting: kwargs, then config file, then environment, then default"""

        value = kwargs.get(name, None)

        if value is None:
            value = self.file_values.get(name, None)

        if value is None:
            value = os.environ.get(self.ENVIRONMENT[name], None)

        if value is None:
            value = self.DEFAULTS[name]

        return value

    def get(self, name, default=None):
        """Return a named value: a core setting, or a flag value recorded from the command line / config file"""

        if name in self.DEFAULTS:
            return getattr(self, name)

        if name in self.extra:
            return self.extra[name]

        return self.file_values.get(name, default)

    def asDict(self):
        """Return the resolved settings (suitable for a run manifest)"""

        data = dict(self.file_values)
        data.update(self.extra)

        for name in self.DEFAULTS:
            data[name] = getattr(self, name)

        return dict(sorted(data.items()))

    def logLevel(self):
        """Return the numeric logging level"""

        level = logging.getLevelName(self.log_level)

        if type(level) is not int:
            logger.warning(f"Unknown log level '{self.log_level}' - using WARNING")
            return logging.WARNING

        return level
