# -*- coding: utf-8 -*-

try:
    from invoke import ctask as task
except ImportError:
    from invoke import task

import json
import os
import sys


@task
def style(c):
    """
    Run PEP style checks against the codebase
    """

    print("Running PEP code style checks...")
    c.run('flake8 .')


@task(help={
    'source': 'Specify the source file to test',
    'slow': 'Also run the acceptance-scale tests (sets NTUCORE_SLOW)',
})
def test(c, source=None, slow=False):
    """
    Run the unit tests for the ntucore package.
    """

    env = {'NTUCORE_SLOW': '1'} if slow else {}

    # If a source file is provided, check that it actually exists
    if source:

        if not source.endswith('.py'):
            source += '.py'

        if not os.path.exists(source):
            source = os.path.join('test', source)

        if not os.path.exists(source):
            print(f"Error: Source file '{source}' does not exist")
            sys.exit(1)

    # If a single source file is supplied, test *just* that file
    # Otherwise, test *all* files
    if source:
        print(f"Running tests for '{source}'")
        c.run(f'coverage run -m unittest {source}', env=env)
    else:
        # Automatically discover tests, and run only those
        c.run('coverage run -m unittest discover -s test/', env=env)


@task(help={
    'tag': 'Release tag to check, e.g. v0.1.0',
})
def check_version(c, tag):
    """
    Check that a release tag matches the ntucore version number
    """

    c.run(f'python ci/check_version_number.py {tag}')


@task(help={
    'out': 'Output directory (default = runs/desk-study)',
    'seed': 'Grid city seed',
    'riders': 'Number of riders',
    'lines': 'Number of bus lines',
    'iters': 'Cutting plane iterations per objective',
    'budget': 'Membership search budget in seconds',
})
def desk_study(c, out='runs/desk-study', seed=0, riders=60, lines=12, iters=100, budget=300):
    """
    Transit desk study: generate a grid city, optimize both welfare
    objectives over the core and chart the results.
    """

    scenario = os.path.join(out, 'scenario')

    c.run(f'python -m ntucore --seed {seed} gen --family grid-city --riders {riders} --lines {lines} --out-dir {scenario}')

    game = os.path.join(scenario, 'game.json')

    for objective in ('utilitarian', 'maximin'):
        directory = os.path.join(out, objective)

        c.run(f'python -m ntucore solve --game {game} --objective {objective} --iters {iters} --budget {budget} --out-dir {directory}', warn=True)
        c.run(f'python -m ntucore report --trajectory {os.path.join(directory, "trajectory.csv")} --out-dir {directory}', warn=True)

    from ntucore.report import plot_utility_quantiles

    utilities = {}

    for objective in ('utilitarian', 'maximin'):
        path = os.path.join(out, objective, 'solution.json')

        if not os.path.exists(path):
            continue

        with open(path, 'r', encoding='utf-8') as f:
            solution = json.load(f)

        if solution.get('utilities'):
            utilities[objective] = solution['utilities']

    if utilities:
        path = plot_utility_quantiles(utilities, os.path.join(out, 'quantiles.svg'))
        print(f"Wrote {path}")
