# -*- coding: utf-8 -*-

"""
Command line front end.

    ntucore gen --family empty-core --out-dir runs/example
    ntucore oracle --game runs/example/game.json --u "2,2,-2"
    ntucore solve --game game.json --objective maximin --delta 1e-3 --iters 100 --out-dir runs/solve
    ntucore report --trajectory runs/solve/trajectory.csv --out-dir runs/solve

Exit codes: 0 on success, 2 on usage or input errors, 3 on numerical breakdown.
"""

import argparse
import logging
import os
import sys
import time

import numpy as np
import pandas as pd

from ntucore import instances, report, storage, transit
from ntucore.base import NTUCORE_VERSION
from ntucore.config import Settings
from ntucore.exceptions import NtuError, NumericalBreakdown, ParseError
from ntucore.game import parseRational
from ntucore.membership import ObjectionMode, least_objection
from ntucore.optimizer import Objective, RunConfig, solve_over_core
from ntucore.oracle import core_empty_evidence, is_blocked_exact

logger = logging.getLogger('ntucore')

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

FAMILIES = ('empty-core', 'cyclic', '3dm', '3dm-no', 'random', 'dilemma', 'grid-city', 'transit')

# Flag defaults applied after the config file (flags default to None so the file can fill them)
DEFAULTS = {
    'family': None,
    'players': 3,
    'goods': 2,
    'resources': 1,
    'moments': '2,3,4',
    'n': 2,
    'extra': 1,
    'm': 3,
    'riders': 60,
    'lines': 12,
    'objective': 'utilitarian',
    'secondary_weight': 1e-4,
    'delta': 1e-3,
    'iters': 100,
    'mode': 'additive',
    'floor': 1e-3,
    'resolution': 0.01,
}


def _parseVector(text, field='u'):
    """Parse a comma separated list of rationals into a float array"""

    try:
        return np.array([float(parseRational(a)) for a in text.split(',') if a.strip() != ''])
    except ValueError as e:
        raise ParseError(f"Invalid value for '--{field}': {e}", field=field)


def buildParser():

    parser = argparse.ArgumentParser(prog='ntucore', description="NTU linear production games: core membership and optimization over the core")

    parser.add_argument('--version', action='version', version=f"ntucore {NTUCORE_VERSION}")
    parser.add_argument('--config', default=None, help="JSON config file (flags take precedence)")
    parser.add_argument('--log-level', dest='log_level', default=None, help="Logging level (default WARNING)")
    parser.add_argument('--threads', type=int, default=None, help="Worker threads (env NTUCORE_THREADS)")
    parser.add_argument('--seed', type=int, default=None, help="Random seed (env NTUCORE_SEED)")

    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    gen = commands.add_parser('gen', help="Generate an instance")
    gen.add_argument('--family', choices=FAMILIES, default=None)
    gen.add_argument('--players', type=int, default=None)
    gen.add_argument('--goods', type=int, default=None)
    gen.add_argument('--resources', type=int, default=None)
    gen.add_argument('--moments', default=None, help="Comma separated cyclic moments")
    gen.add_argument('--n', type=int, default=None, help="Matching size")
    gen.add_argument('--extra', type=int, default=None, help="Random triples beyond the planted matching")
    gen.add_argument('--m', type=int, default=None, help="Triples of a no-instance")
    gen.add_argument('--riders', type=int, default=None)
    gen.add_argument('--lines', type=int, default=None)
    gen.add_argument('--scenario', default=None, help="Directory holding a scenario CSV trio (transit family)")
    gen.add_argument('--out-dir', dest='out_dir', required=True)

    solve = commands.add_parser('solve', help="Optimize over the core by intersection cuts")
    solve.add_argument('--game', required=True)
    solve.add_argument('--objective', choices=('utilitarian', 'maximin'), default=None)
    solve.add_argument('--secondary-weight', dest='secondary_weight', type=float, default=None)
    solve.add_argument('--delta', type=float, default=None)
    solve.add_argument('--iters', type=int, default=None)
    solve.add_argument('--mode', choices=('additive', 'multiplicative'), default=None)
    solve.add_argument('--floor', type=float, default=None)
    solve.add_argument('--budget', dest='time_budget', type=float, default=None, help="Membership budget in seconds")
    solve.add_argument('--out-dir', dest='out_dir', required=True)

    membership = commands.add_parser('membership', help="Least objection of an allocation")
    membership.add_argument('--game', required=True)
    membership.add_argument('--u', required=True, help="Comma separated utilities")
    membership.add_argument('--mode', choices=('additive', 'multiplicative'), default=None)
    membership.add_argument('--floor', type=float, default=None)
    membership.add_argument('--budget', dest='time_budget', type=float, default=None)
    membership.add_argument('--out-dir', dest='out_dir', default=None)

    oracle = commands.add_parser('oracle', help="Exhaustive blocking check")
    oracle.add_argument('--game', required=True)
    oracle.add_argument('--u', default=None, help="Comma separated utilities")
    oracle.add_argument('--evidence', action='store_true', help="Search a plan grid for a core point instead")
    oracle.add_argument('--resolution', type=float, default=None)
    oracle.add_argument('--out-dir', dest='out_dir', default=None)

    charts = commands.add_parser('report', help="SVG charts of a trajectory")
    charts.add_argument('--trajectory', required=True)
    charts.add_argument('--out-dir', dest='out_dir', required=True)

    return parser


class Command(object):
    """ One parsed invocation: flags, resolved settings and the files it writes """

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)

        options = {k: v for k, v in vars(args).items() if k not in ('config', 'command')}

        self.settings = Settings(config_file=args.config, **options)
        self.outputs = []

    def option(self, name):
        """Flag value, else config file value, else default"""

        value = self.settings.get(name, None)

        if value is None:
            value = DEFAULTS.get(name, None)

        return value

    def output(self, name):
        path = os.path.join(self.args.out_dir, name)
        self.outputs.append(name)
        return path

    def mode(self):
        kind = ObjectionMode.MULTIPLICATIVE if self.option('mode') == 'multiplicative' else ObjectionMode.ADDITIVE
        return ObjectionMode(kind, float(self.option('floor')))

    def prepare(self):
        """Validate paths before any work starts"""

        for name in ('game', 'trajectory'):
            path = getattr(self.args, name, None)

            if path is not None and not os.path.exists(path):
                raise FileNotFoundError(f"Input file '{path}' does not exist")

        out_dir = getattr(self.args, 'out_dir', None)

        if out_dir is not None:
            if os.path.exists(out_dir) and not os.path.isdir(out_dir):
                raise NotADirectoryError(f"Output path '{out_dir}' is not a directory")

            os.makedirs(out_dir, exist_ok=True)

    def finish(self, started):
        out_dir = getattr(self.args, 'out_dir', None)

        if out_dir is not None:
            report.write_manifest(out_dir, self.argv, self.settings.asDict(), time.monotonic() - started, self.outputs)


def runGen(command):

    family = command.option('family')
    seed = command.settings.seed

    if family is None:
        raise ParseError("No instance family given (use --family)", field='family')

    scenario = None

    if family == 'empty-core':
        game = instances.gen_empty_core_example()
    elif family == 'cyclic':
        moments = str(command.option('moments')).split(',')
        game = instances.gen_cyclic(int(command.option('players')), len(moments), moments)
    elif family == '3dm':
        instance = instances.gen_3dm_instance(int(command.option('n')), int(command.option('extra')), seed=seed)
        game, _ = instances.gen_3dm_gadget(instance)
    elif family == '3dm-no':
        instance = instances.gen_3dm_no_instance(int(command.option('n')), int(command.option('m')), seed=seed)
        game, _ = instances.gen_3dm_gadget(instance)
    elif family == 'random':
        game = instances.gen_random_game(
            int(command.option('players')),
            int(command.option('goods')),
            int(command.option('resources')),
            seed=seed,
        )
    elif family == 'dilemma':
        scenario = transit.gen_dilemma_scenario()
        game = transit.gen_transit_game(scenario)
    elif family == 'transit':
        if command.args.scenario is None:
            raise ParseError("The transit family needs --scenario", field='scenario')

        scenario = storage.load_scenario(command.args.scenario)
        game = transit.gen_transit_game(scenario)
    else:
        scenario = transit.gen_grid_city(seed=seed, lines=int(command.option('lines')), riders=int(command.option('riders')))
        game = transit.gen_transit_game(scenario)

    storage.save_game(game, command.output('game.json'))

    if scenario is not None:
        storage.save_scenario(scenario, command.args.out_dir)
        command.outputs += ['nodes.csv', 'lines.csv', 'riders.csv']

    print(f"Generated {game}")

    return EXIT_OK


def runSolve(command):

    game = storage.load_game(command.args.game)

    if command.option('objective') == 'maximin':
        objective = Objective.maximin(float(command.option('secondary_weight')))
    else:
        objective = Objective.utilitarian()

    config = RunConfig(
        objective=objective,
        delta=float(command.option('delta')),
        max_iterations=int(command.option('iters')),
        membership_budget=command.settings.time_budget,
        mode=command.mode(),
        threads=command.settings.threads,
    )

    try:
        solution = solve_over_core(game, config)
    except NumericalBreakdown as e:
        # Keep the iterations that completed before the breakdown
        if e.trajectory is not None:
            report.write_csv(e.trajectory.toFrame(), command.output('trajectory.csv'))
        raise

    report.write_csv(solution.trajectory.toFrame(), command.output('trajectory.csv'))
    report.write_csv(solution.cutFrame(), command.output('cuts.csv'))
    report.write_json(solution_summary(solution, game, config), command.output('solution.json'))

    print(f"Status: {solution.status}")
    print(f"Iterations: {len(solution.trajectory)}")

    if solution.utilities is not None:
        print(f"Utilitarian welfare: {solution.welfare(Objective.UTILITARIAN):.9g}")
        print(f"Maximin welfare: {solution.welfare(Objective.MAXIMIN):.9g}")

    return EXIT_OK


def solution_summary(solution, game, config):
    record = report.solution_record(solution, game)
    record['config'] = config.asDict()
    return record


def _checkLength(game, u):
    if u.size != game.players:
        raise ParseError(f"Expected {game.players} utilities, got {u.size}", field='u')


def runMembership(command):

    game = storage.load_game(command.args.game)
    u = _parseVector(command.args.u)
    _checkLength(game, u)

    objection = least_objection(game, u, mode=command.mode(), budget=command.settings.time_budget, threads=command.settings.threads)

    print(f"Epsilon: {objection.epsilon:.9g}")
    print(f"Coalition: {objection.coalition.label()}")
    print(f"Blocking: {'yes' if objection.blocking else 'no'}")

    if objection.timed_out:
        print("Timed out: the objection is a lower bound")
        print(f"Upper bound: {objection.bound:.9g}")

    if command.args.out_dir is not None:
        report.write_csv(pd.DataFrame([objection.asRecord()]), command.output('membership.csv'))

    return EXIT_OK


def runOracle(command):

    game = storage.load_game(command.args.game)

    if command.args.evidence:
        evidence = core_empty_evidence(game, float(command.option('resolution')), threads=command.settings.threads)

        print(f"Evidence: {evidence.status} (resolution {evidence.resolution:g})")

        if evidence.found:
            print(f"Core point: {', '.join(f'{a:.9g}' for a in evidence.utilities)}")

        if command.args.out_dir is not None:
            record = {'status': evidence.status, 'resolution': evidence.resolution, 'samples_checked': evidence.samples_checked}
            report.write_csv(pd.DataFrame([record]), command.output('evidence.csv'))

        return EXIT_OK

    if command.args.u is None:
        raise ParseError("The oracle needs --u (or --evidence)", field='u')

    u = _parseVector(command.args.u)
    _checkLength(game, u)

    verdict = is_blocked_exact(game, u, threads=command.settings.threads)

    if verdict.blocked:
        print(f"Blocked by {verdict.best.coalition.label()} (value {verdict.best.epsilon:.9g})")
    else:
        print("Not blocked")

    print(f"Coalitions checked: {verdict.coalitions_checked}")

    if command.args.out_dir is not None:
        report.write_csv(pd.DataFrame([verdict.asRecord()]), command.output('oracle.csv'))

    return EXIT_OK


def runReport(command):

    frame = report.read_trajectory(command.args.trajectory)

    for path in report.plot_trajectory(frame, command.args.out_dir):
        command.outputs.append(os.path.basename(path))
        print(f"Wrote {path}")

    return EXIT_OK


HANDLERS = {
    'gen': runGen,
    'solve': runSolve,
    'membership': runMembership,
    'oracle': runOracle,
    'report': runReport,
}


def run(argv=None):
    """ Run the command line interface and return the exit code """

    if argv is None:
        argv = sys.argv[1:]

    parser = buildParser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    started = time.monotonic()
    command = None

    try:
        command = Command(args, argv)

        logging.basicConfig(level=command.settings.logLevel(), format='%(levelname)s %(name)s: %(message)s')

        command.prepare()

        code = HANDLERS[args.command](command)

        command.finish(started)

        return code

    except NumericalBreakdown as e:
        print(f"Numerical breakdown: {e}", file=sys.stderr)
        if command is not None:
            command.finish(started)
        return EXIT_NUMERICAL
    except (ParseError, FileNotFoundError, NotADirectoryError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NtuError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE if isinstance(e, ValueError) else EXIT_FAILURE


def main():
    sys.exit(run())
