# -*- coding: utf-8 -*-

"""
Transit frequency setting as an NTU LP game.

Goods are bus lines and the single resource is the fare budget: funding
line j with x_j units costs a_j x_j, where a_j is the line length in
kilometers. Riders value a line by how close its stops are to both ends
of their trip.
"""

import logging
from fractions import Fraction

import numpy as np

from ntucore.base import MetadataMixin, NtuObject
from ntucore.exceptions import EmptyScenario, NegativeDistance
from ntucore.game import Game, parseRational

logger = logging.getLogger('ntucore')

# Walking distances (meters) of full and zero accessibility
NEAR = 400.0
FAR = 1600.0


def accessibility(distance_m):
    """ 1 below 400 m, 0 beyond 1600 m, linear in between """

    if distance_m < 0:
        raise NegativeDistance(f"Distance must be nonnegative (got {distance_m})")

    if distance_m < NEAR:
        return 1.0

    if distance_m > FAR:
        return 0.0

    return 1.0 - (distance_m - NEAR) / (FAR - NEAR)


class TransitScenario(MetadataMixin, NtuObject):
    """ Nodes, bus lines and riders of a transit study.

    Data entries:
        nodes - list of [x, y] coordinates in meters
        lines - list of {'name', 'stops', 'length'} (stops are node indices, length in km)
        riders - list of {'origin', 'destination', 'fare'} (node indices, fare in dollars)
    """

    MODEL_TYPE = 'scenario'

    REQUIRED_FIELDS = ('nodes', 'lines', 'riders')

    def __init__(self, data):

        values = {
            'nodes': [[float(a) for a in node] for node in data['nodes']],
            'lines': [],
            'riders': [],
            'metadata': dict(data.get('metadata') or {}),
        }

        super().__init__(values)

        count = len(values['nodes'])

        for idx, line in enumerate(data['lines']):
            stops = [int(s) for s in line['stops']]

            if len(stops) == 0 or any(s < 0 or s >= count for s in stops):
                raise ValueError(f"Line {idx} has invalid stops {stops}")

            length = line.get('length', None)

            if length is None:
                length = self._polylineLength(stops)

            length = float(length)

            if length <= 0:
                raise ValueError(f"Line {idx} must have a positive length (got {length})")

            values['lines'].append({
                'name': str(line.get('name', f"L{idx + 1}")),
                'stops': stops,
                'length': length,
            })

        for idx, rider in enumerate(data['riders']):
            origin = int(rider['origin'])
            destination = int(rider['destination'])

            if origin == destination:
                raise ValueError(f"Rider {idx} has the same origin and destination")

            if not (0 <= origin < count and 0 <= destination < count):
                raise ValueError(f"Rider {idx} references an unknown node")

            values['riders'].append({
                'origin': origin,
                'destination': destination,
                'fare': parseRational(rider.get('fare', 1)),
            })

        self._coordinates = np.array(values['nodes'], dtype=float).reshape(count, 2)

    @classmethod
    def create(cls, nodes, lines, riders, metadata=None):
        return cls({'nodes': nodes, 'lines': lines, 'riders': riders, 'metadata': metadata})

    @classmethod
    def fromDict(cls, data):
        return cls(data)

    def _polylineLength(self, stops):
        """Length in km of the path through the stops, in order"""

        points = np.array([self._data['nodes'][s] for s in stops], dtype=float)

        if len(points) < 2:
            return 0.0

        return float(np.linalg.norm(np.diff(points, axis=0), axis=1).sum()) / 1000.0

    @property
    def coordinates(self):
        return self._coordinates

    @property
    def lengths(self):
        return np.array([line['length'] for line in self.lines])

    def stopDistance(self, node, line):
        """Euclidean distance (meters) from a node to the nearest stop of a line"""

        stops = self._coordinates[self.lines[line]['stops']]

        return float(np.min(np.linalg.norm(stops - self._coordinates[node], axis=1)))

    def __str__(self):
        return f"TransitScenario<{len(self.nodes)} nodes, {len(self.lines)} lines, {len(self.riders)} riders>"


def rider_valuation(scenario, rider, line):
    """ min of origin-side and destination-side accessibility of a line """

    trip = scenario.riders[rider]

    origin = accessibility(scenario.stopDistance(trip['origin'], line))
    destination = accessibility(scenario.stopDistance(trip['destination'], line))

    return min(origin, destination)


def valuation_matrix(scenario):
    """Riders x lines matrix of valuations"""

    return np.array([
        [rider_valuation(scenario, i, j) for j in range(len(scenario.lines))]
        for i in range(len(scenario.riders))
    ]).reshape(len(scenario.riders), len(scenario.lines))


def gen_transit_game(scenario):
    """ One-resource game: A = line lengths, b^i = fare, v^i from accessibility.

    Riders whose valuation row is identically zero are dropped; the kept
    rider indices are recorded in the game metadata.
    """

    valuations = valuation_matrix(scenario)

    kept = [i for i in range(valuations.shape[0]) if np.any(valuations[i] > 0)]

    if not kept:
        raise EmptyScenario("No rider values any line")

    dropped = valuations.shape[0] - len(kept)

    if dropped:
        logger.info(f"Dropped {dropped} riders with no accessible line")

    A = [[parseRational(length) for length in scenario.lengths]]
    b = [[scenario.riders[i]['fare']] for i in kept]
    v = [[parseRational(value) for value in valuations[i]] for i in kept]

    metadata = {
        'family': 'transit',
        'riders': kept,
        'lines': [line['name'] for line in scenario.lines],
    }

    labels = [f"r{i + 1}" for i in kept]

    return Game.create(A, b, v, labels=labels, metadata=metadata)


def gen_dilemma_scenario():
    """ Three riders, two lines on a straight corridor.

    Line A runs 6 km through all three nodes, line B covers the first
    2 km only. Rider 1 travels the full corridor and is served by line A
    alone; riders 2 and 3 travel the short stretch both lines serve.
    """

    nodes = [[0.0, 0.0], [2000.0, 0.0], [6000.0, 0.0]]

    lines = [
        {'name': 'A', 'stops': [0, 1, 2]},
        {'name': 'B', 'stops': [0, 1]},
    ]

    riders = [
        {'origin': 2, 'destination': 0, 'fare': 1},
        {'origin': 0, 'destination': 1, 'fare': 1},
        {'origin': 0, 'destination': 1, 'fare': 1},
    ]

    return TransitScenario.create(nodes, lines, riders, metadata={'family': 'dilemma'})


def gen_grid_city(seed=0, width=8000.0, height=8000.0, lines=12, riders=60, block=400.0):
    """ Synthetic grid city.

    Roads form a grid with the given block size. Each bus line runs along
    a randomly chosen horizontal or vertical road with a stop at every
    intersection. Trip endpoints are drawn around the city center (normal
    with a fifth of the city size as deviation) and snapped to the grid.

    Args:
        seed - seed for numpy's default_rng
        width, height - city extent in meters
        lines - number of bus lines
        riders - number of riders (distinct origin and destination)
        block - road spacing in meters
    """

    if width <= 0 or height <= 0 or block <= 0 or lines < 1 or riders < 1:
        raise ValueError("Grid city dimensions and counts must be positive")

    rng = np.random.default_rng(seed)

    columns = int(width // block) + 1
    rows = int(height // block) + 1

    registry = {}
    nodes = []

    def node(cx, cy):
        key = (int(cx), int(cy))

        if key not in registry:
            registry[key] = len(nodes)
            nodes.append([key[0] * block, key[1] * block])

        return registry[key]

    line_data = []

    for idx in range(lines):
        if rng.random() < 0.5:
            road = int(rng.integers(0, rows))
            stops = [node(cx, road) for cx in range(columns)]
            name = f"H{idx + 1}"
        else:
            road = int(rng.integers(0, columns))
            stops = [node(road, cy) for cy in range(rows)]
            name = f"V{idx + 1}"

        line_data.append({'name': name, 'stops': stops})

    center = np.array([(columns - 1) / 2.0, (rows - 1) / 2.0])
    spread = np.array([columns / 5.0, rows / 5.0])

    def endpoint():
        point = np.rint(rng.normal(center, spread))
        point = np.clip(point, [0, 0], [columns - 1, rows - 1])
        return node(point[0], point[1])

    rider_data = []

    while len(rider_data) < riders:
        origin = endpoint()
        destination = endpoint()

        if origin != destination:
            rider_data.append({'origin': origin, 'destination': destination, 'fare': Fraction(1)})

    metadata = {
        'family': 'grid-city',
        'seed': seed,
        'width': width,
        'height': height,
        'block': block,
    }

    return TransitScenario.create(nodes, line_data, rider_data, metadata=metadata)
