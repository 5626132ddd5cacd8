# -*- coding: utf-8 -*-

"""
Instance families: the empty-core counterexample, the cyclic family,
the three-dimensional matching gadget and random games.
"""

import logging
from fractions import Fraction

import numpy as np

from ntucore.exceptions import BadInstance, BadMoments
from ntucore.game import Game, parseRational

logger = logging.getLogger('ntucore')


def gen_empty_core_example():
    """ Three players, one resource, two goods, unit endowments and an empty core """

    A = [[1, 1]]
    b = [[1], [1], [1]]
    v = [
        [Fraction(2, 3), Fraction(1, 3)],
        [Fraction(2, 3), Fraction(1, 3)],
        [Fraction(-2, 3), Fraction(1, 3)],
    ]

    return Game.create(A, b, v, metadata={'family': 'empty-core'})


def gen_cyclic(n, m, t):
    """ Cyclic family: one resource, A = all ones, b^i = 1 and v_j^i = t_j ** i.

    Args:
        n - number of players (i = 1..n)
        m - number of goods
        t - m strictly increasing moments, all greater than one
    """

    t = [parseRational(value) for value in t]

    if len(t) != m:
        raise BadMoments(f"Expected {m} moments, got {len(t)}")

    if any(value <= 1 for value in t):
        raise BadMoments("Every moment must be greater than one")

    if any(a >= b for a, b in zip(t, t[1:])):
        raise BadMoments("Moments must be strictly increasing")

    A = [[1] * m]
    b = [[1] for _ in range(n)]
    v = [[value ** i for value in t] for i in range(1, n + 1)]

    metadata = {
        'family': 'cyclic',
        'moments': [str(value) for value in t],
    }

    return Game.create(A, b, v, metadata=metadata)


class ThreeDMInstance(object):
    """ A three-dimensional matching instance.

    X, Y and Z each hold n nodes; a triple (x, y, z) uses local indices
    0..n-1 in each set.
    """

    def __init__(self, n, triples):

        self.n = int(n)
        self.triples = [tuple(int(a) for a in triple) for triple in triples]

        if self.n <= 1:
            raise BadInstance(f"Matching instances need n > 1 (got {self.n})")

        if len(self.triples) < self.n:
            raise BadInstance(f"Matching instances need at least n = {self.n} triples (got {len(self.triples)})")

        for triple in self.triples:
            if len(triple) != 3 or any(a < 0 or a >= self.n for a in triple):
                raise BadInstance(f"Invalid triple {triple} for n = {self.n}")

    @property
    def m(self):
        return len(self.triples)

    def nodes(self, triple):
        """Node player indices (X first, then Y, then Z) touched by a triple"""
        x, y, z = triple
        return (x, self.n + y, 2 * self.n + z)

    def isPerfectMatching(self, indices):
        """Whether the triples at the given indices cover every node exactly once"""

        indices = list(indices)

        if len(indices) != self.n:
            return False

        covered = set()

        for idx in indices:
            covered.update(self.nodes(self.triples[idx]))

        return len(covered) == 3 * self.n

    def __str__(self):
        return f"ThreeDMInstance<n={self.n}, m={self.m}>"


def gadget_values(n, m):
    """ Exact valuation levels of the matching gadget.

    Returns:
        (incident edge value, non-incident edge value, common good value, edge player own value)
    """

    incident = Fraction(1, 4 * n - 1)
    other = Fraction(1, 4 * n) * (1 - Fraction(1, 2 * (n - 1) * (4 * n - 1)))
    common = Fraction(1, 3 * n + m)
    own = Fraction(n, 4 * n - 1)

    return incident, other, common, own


def gen_3dm_gadget(instance):
    """ NTU LP game deciding whether the instance has a perfect matching.

    The lexicographically first triple is duplicated until the non-incident
    node value exceeds the common good value. Players are the 3n node
    players followed by one edge player per (possibly duplicated) triple;
    goods are the edge goods followed by one common good.

    Returns:
        (Game, u_star) with u_star the all-ones allocation
    """

    n = instance.n
    triples = list(instance.triples)

    first = sorted(triples)[0]

    while True:
        _, other, common, _ = gadget_values(n, len(triples))

        if other > common:
            break

        triples.append(first)

    m = len(triples)
    incident, other, common, own = gadget_values(n, m)

    padded = ThreeDMInstance(n, triples)

    v = []

    for h in range(3 * n):
        row = [incident if h in padded.nodes(triple) else other for triple in triples]
        row.append(common)
        v.append(row)

    for t in range(m):
        row = [own if j == t else Fraction(0) for j in range(m)]
        row.append(common)
        v.append(row)

    players = 3 * n + m

    labels = [f"x{h + 1}" for h in range(n)] + [f"y{h + 1}" for h in range(n)] + [f"z{h + 1}" for h in range(n)]
    labels += [f"t{t + 1}" for t in range(m)]

    metadata = {
        'family': '3dm',
        'n': n,
        'triples': [list(triple) for triple in triples],
        'roles': ['node'] * (3 * n) + ['edge'] * m,
        'duplicates': m - instance.m,
    }

    game = Game.create([[1] * (m + 1)], [[1] for _ in range(players)], v, labels=labels, metadata=metadata)

    logger.debug(f"Built matching gadget with {players} players ({m - instance.m} duplicated triples)")

    return game, np.ones(players)


def gen_3dm_instance(n, extra=0, seed=0):
    """ Random yes-instance: a planted perfect matching plus extra random triples """

    rng = np.random.default_rng(seed)

    ys = rng.permutation(n)
    zs = rng.permutation(n)

    triples = [(x, int(ys[x]), int(zs[x])) for x in range(n)]

    for _ in range(extra):
        triples.append(tuple(int(a) for a in rng.integers(0, n, size=3)))

    order = rng.permutation(len(triples))

    return ThreeDMInstance(n, [triples[k] for k in order])


def gen_3dm_no_instance(n, m, seed=0):
    """ Random no-instance: one Z node lies in no triple """

    if n <= 1:
        raise BadInstance(f"Matching instances need n > 1 (got {n})")

    rng = np.random.default_rng(seed)

    missing = int(rng.integers(0, n))
    allowed = [z for z in range(n) if z != missing]

    triples = []

    for _ in range(m):
        x, y = (int(a) for a in rng.integers(0, n, size=2))
        z = allowed[int(rng.integers(0, len(allowed)))]
        triples.append((x, y, z))

    return ThreeDMInstance(n, triples)


def gen_random_game(players, goods, resources=1, seed=0, nonnegative=True):
    """ Random small game with positive production matrix and nonnegative endowments.

    Valuations are multiples of 1/4 in [0, 1] (or [-1/2, 1] when nonnegative is False).
    """

    rng = np.random.default_rng(seed)

    A = [[Fraction(int(a)) for a in row] for row in rng.integers(1, 4, size=(resources, goods))]
    b = [[Fraction(int(a)) for a in row] for row in rng.integers(1, 3, size=(players, resources))]

    low = 0 if nonnegative else -2
    v = [[Fraction(int(a), 4) for a in row] for row in rng.integers(low, 5, size=(players, goods))]

    metadata = {
        'family': 'random',
        'seed': seed,
        'nonnegative': nonnegative,
    }

    return Game.create(A, b, v, metadata=metadata)
