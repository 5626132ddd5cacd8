# -*- coding: utf-8 -*-

"""
Reading and writing games (JSON) and transit scenarios (CSV trio).
"""

import json
import logging
import os

import pandas as pd

from ntucore.exceptions import ParseError
from ntucore.game import Game, formatRational, parseRational
from ntucore.transit import TransitScenario

logger = logging.getLogger('ntucore')

GAME_FIELDS = ('players', 'resources', 'goods', 'A', 'b', 'v')

SCENARIO_FILES = {
    'nodes': ('nodes.csv', ['node', 'x', 'y']),
    'lines': ('lines.csv', ['line', 'length_km', 'stops']),
    'riders': ('riders.csv', ['rider', 'origin', 'destination', 'fare']),
}


def gameToDict(game):
    """JSON-ready representation of a game (rationals as 'p/q' strings)"""

    data = {
        'players': game.players,
        'resources': game.resources,
        'goods': game.goods,
        'A': [[formatRational(a) for a in row] for row in game.A],
        'b': [[formatRational(a) for a in row] for row in game.b],
        'v': [[formatRational(a) for a in row] for row in game.v],
    }

    if game.labels:
        data['labels'] = list(game.labels)

    metadata = game.getMetadata()

    if metadata:
        data['metadata'] = metadata

    return data


def _parseMatrix(data, field, rows, columns):
    """Parse a list-of-lists of rationals, checking its shape"""

    value = data[field]

    if type(value) is not list or len(value) != rows:
        raise ParseError(f"Field '{field}' must be a list of {rows} rows", field=field)

    parsed = []

    for r, row in enumerate(value):
        if type(row) is not list or len(row) != columns:
            raise ParseError(f"Row {r} of field '{field}' must have {columns} entries", field=field)

        try:
            parsed.append([parseRational(a) for a in row])
        except ValueError as e:
            raise ParseError(f"Invalid rational in row {r} of field '{field}': {e}", field=field)

    return parsed


def gameFromDict(data):
    """Validate a JSON representation and build the Game"""

    if type(data) is not dict:
        raise ParseError("Game data must be a JSON object")

    for field in GAME_FIELDS:
        if field not in data:
            raise ParseError(f"Missing required field '{field}'", field=field)

    try:
        players = int(data['players'])
        resources = int(data['resources'])
        goods = int(data['goods'])
    except (TypeError, ValueError):
        raise ParseError("Fields 'players', 'resources' and 'goods' must be integers")

    A = _parseMatrix(data, 'A', resources, goods)
    b = _parseMatrix(data, 'b', players, resources)
    v = _parseMatrix(data, 'v', players, goods)

    labels = data.get('labels', None)

    if labels is not None and (type(labels) is not list or len(labels) != players):
        raise ParseError(f"Field 'labels' must be a list of {players} entries", field='labels')

    return Game.create(A, b, v, labels=labels, metadata=data.get('metadata', None))


def save_game(game, path):
    """Write a game to a JSON file"""

    with open(path, 'w', encoding='utf-8') as f:
        json.dump(gameToDict(game), f, indent=2)
        f.write('\n')

    logger.info(f"Saved {game} to '{path}'")


def load_game(path):
    """Read a game from a JSON file"""

    if not os.path.exists(path):
        raise FileNotFoundError(f"Game file '{path}' does not exist")

    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.decoder.JSONDecodeError as e:
            raise ParseError(f"Error decoding game file '{path}': {e.msg}", line=e.lineno)

    return gameFromDict(data)


def save_scenario(scenario, directory):
    """Write nodes.csv, lines.csv and riders.csv into a directory"""

    os.makedirs(directory, exist_ok=True)

    nodes = pd.DataFrame(
        [{'node': idx, 'x': x, 'y': y} for idx, (x, y) in enumerate(scenario.nodes)],
        columns=SCENARIO_FILES['nodes'][1],
    )

    lines = pd.DataFrame(
        [{'line': line['name'], 'length_km': line['length'], 'stops': ';'.join(str(s) for s in line['stops'])} for line in scenario.lines],
        columns=SCENARIO_FILES['lines'][1],
    )

    riders = pd.DataFrame(
        [
            {'rider': idx, 'origin': r['origin'], 'destination': r['destination'], 'fare': formatRational(r['fare'])}
            for idx, r in enumerate(scenario.riders)
        ],
        columns=SCENARIO_FILES['riders'][1],
    )

    for key, frame in (('nodes', nodes), ('lines', lines), ('riders', riders)):
        frame.to_csv(os.path.join(directory, SCENARIO_FILES[key][0]), index=False)

    logger.info(f"Saved {scenario} to '{directory}'")


def _readTable(directory, key):

    filename, columns = SCENARIO_FILES[key]
    path = os.path.join(directory, filename)

    if not os.path.exists(path):
        raise FileNotFoundError(f"Scenario file '{path}' does not exist")

    frame = pd.read_csv(path, dtype=str, keep_default_na=False)

    for column in columns:
        if column not in frame.columns:
            raise ParseError(f"'{filename}' is missing column '{column}'", field=column)

    return frame


def load_scenario(directory):
    """Read a scenario from its CSV trio"""

    nodes = _readTable(directory, 'nodes')
    lines = _readTable(directory, 'lines')
    riders = _readTable(directory, 'riders')

    def number(value, field, row, kind=float):
        try:
            return kind(value)
        except ValueError:
            # Header is line 1
            raise ParseError(f"Invalid value '{value}' for '{field}'", field=field, line=row + 2)

    node_data = [[number(r['x'], 'x', idx), number(r['y'], 'y', idx)] for idx, r in nodes.iterrows()]

    line_data = []

    for idx, r in lines.iterrows():
        stops = [number(s, 'stops', idx, int) for s in str(r['stops']).split(';') if s != '']
        line_data.append({'name': r['line'], 'stops': stops, 'length': number(r['length_km'], 'length_km', idx)})

    rider_data = []

    for idx, r in riders.iterrows():
        try:
            fare = parseRational(r['fare'])
        except ValueError:
            raise ParseError(f"Invalid fare '{r['fare']}'", field='fare', line=idx + 2)

        rider_data.append({
            'origin': number(r['origin'], 'origin', idx, int),
            'destination': number(r['destination'], 'destination', idx, int),
            'fare': fare,
        })

    return TransitScenario.create(node_data, line_data, rider_data)
