# -*- coding: utf-8 -*-

"""
Run outputs: CSV tables, run manifests, solution JSON and SVG charts.

CSV tables never contain wall-clock columns, so identical runs produce
identical files; timings are recorded in the manifest instead.
"""

import json
import logging
import os
import platform

import matplotlib
import numpy as np
import pandas as pd
import scipy

from ntucore.base import NTUCORE_VERSION

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger('ntucore')

# Reproducible SVG output: fixed element ids, no creation date
SVG_PARAMS = {
    'svg.hashsalt': 'ntucore',
    'svg.fonttype': 'none',
    'figure.figsize': (6.4, 4.0),
    'axes.grid': True,
    'grid.alpha': 0.3,
    'font.size': 10,
}

FLOAT_FORMAT = '%.12g'


def write_csv(frame, path):
    """Write a DataFrame with a fixed float format and no index"""

    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)

    logger.info(f"Wrote {len(frame)} rows to '{path}'")

    return path


def read_trajectory(path):
    """Read a trajectory CSV written by write_csv"""

    if not os.path.exists(path):
        raise FileNotFoundError(f"Trajectory file '{path}' does not exist")

    frame = pd.read_csv(path)

    for column in ('iteration', 'utilitarian', 'maximin', 'epsilon'):
        if column not in frame.columns:
            raise ValueError(f"Trajectory file '{path}' is missing column '{column}'")

    return frame


def library_versions():
    """Versions of the package, its numerical stack and the interpreter"""

    return {
        'ntucore': NTUCORE_VERSION,
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'pandas': pd.__version__,
        'matplotlib': matplotlib.__version__,
        'python': platform.python_version(),
    }


def write_manifest(directory, argv, config, wall_time, outputs=()):
    """ Write manifest.json describing a run.

    Args:
        directory - output directory
        argv - command line arguments of the run
        config - resolved settings (re-usable as a --config file)
        wall_time - seconds the run took
        outputs - file names written by the run
    """

    manifest = {
        'argv': list(argv),
        'config': config,
        'seed': config.get('seed', None),
        'versions': library_versions(),
        'wall_time': wall_time,
        'outputs': sorted(outputs),
    }

    path = os.path.join(directory, 'manifest.json')

    with open(path, 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2, sort_keys=True, default=str)
        f.write('\n')

    return path


def write_json(data, path):

    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True, default=str)
        f.write('\n')

    return path


def solution_record(solution, game):
    """JSON-ready summary of a CoreSolution"""

    record = {
        'status': solution.status,
        'iterations': len(solution.trajectory),
        'plan': None if solution.plan is None else [float(a) for a in solution.plan],
        'utilities': None if solution.utilities is None else [float(a) for a in solution.utilities],
        'labels': [game.playerLabel(i) for i in range(game.players)],
    }

    if solution.objection is not None:
        record['objection'] = solution.objection.asRecord()

    return record


def _saveFigure(fig, path):

    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)

    logger.info(f"Wrote chart '{path}'")

    return path


def plot_trajectory(frame, directory, prefix=''):
    """ Welfare and objection charts of a trajectory.

    Returns:
        list of the SVG paths written
    """

    paths = []

    with plt.rc_context(SVG_PARAMS):
        fig, ax = plt.subplots()

        ax.plot(frame['iteration'], frame['utilitarian'], '-', lw=1.2, label='utilitarian')
        ax.set_xlabel('iteration')
        ax.set_ylabel('utilitarian welfare')

        twin = ax.twinx()
        twin.plot(frame['iteration'], frame['maximin'], '--', lw=1.2, color='tab:orange', label='maximin')
        twin.set_ylabel('maximin welfare')

        lines = ax.get_lines() + twin.get_lines()
        ax.legend(lines, [line.get_label() for line in lines], loc='best')

        paths.append(_saveFigure(fig, os.path.join(directory, f"{prefix}welfare.svg")))

        fig, ax = plt.subplots()

        ax.plot(frame['iteration'], frame['epsilon'], '-', lw=1.2, marker='.')
        ax.set_xlabel('iteration')
        ax.set_ylabel('least objection')

        paths.append(_saveFigure(fig, os.path.join(directory, f"{prefix}epsilon.svg")))

    return paths


def plot_utility_quantiles(utilities, path):
    """ Utility quantile curves.

    Args:
        utilities - dict mapping a series label to a utility vector
        path - SVG file to write
    """

    with plt.rc_context(SVG_PARAMS):
        fig, ax = plt.subplots()

        for label, values in utilities.items():
            values = np.sort(np.asarray(values, dtype=float))
            quantiles = np.linspace(0.0, 1.0, values.size)
            ax.plot(quantiles, values, '-', lw=1.2, label=label)

        ax.set_xlabel('quantile')
        ax.set_ylabel('utility')
        ax.set_xlim(0.0, 1.0)
        ax.legend(loc='best')

        return _saveFigure(fig, path)
