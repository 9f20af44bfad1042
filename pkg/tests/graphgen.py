"""Seeded fixture generators shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from escprob.graphio import Graph
from escprob.mpfloat import MPFloat, mp_from_fraction
from escprob.oracle import det_rational, rddl_matrix
from escprob.walkmatrix import RDDLSystem


def random_connected_graph(rng: random.Random, n_min=4, n_max=14, extra_max=None) -> Graph:
    """Unweighted undirected connected graph: a random spanning tree plus a few chords."""
    n = rng.randint(n_min, n_max)
    order = list(range(n))
    rng.shuffle(order)
    edges = set()
    for k in range(1, n):
        u, v = order[k], order[rng.randrange(k)]
        edges.add((min(u, v), max(u, v)))
    extra = rng.randint(0, n // 2 if extra_max is None else extra_max)
    tries = 0
    while extra and tries < 100:
        tries += 1
        u, v = rng.sample(range(n), 2)
        e = (min(u, v), max(u, v))
        if e not in edges:
            edges.add(e)
            extra -= 1
    return Graph.from_edges(n, [(u, v, 1) for u, v in sorted(edges)], directed=False)


def random_digraph(rng: random.Random, n_min=3, n_max=12, density=0.25, zero_frac=0.1) -> Graph:
    """Directed graph with random positive weights, some zero-weight edges and no guarantee of connectivity."""
    n = rng.randint(n_min, n_max)
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < density:
                w = 0 if rng.random() < zero_frac else Fraction(rng.randint(1, 9), rng.randint(1, 4))
                edges.append((u, v, w))
    return Graph.from_edges(n, edges, directed=True)


def pick_pair(rng: random.Random, n: int):
    t, p = rng.sample(range(n), 2)
    return t, p


def random_wide_system(rng: random.Random, m: int, prec: int = 64) -> RDDLSystem:
    """RDDL system with magnitudes spread over 2^-60..2^60, some exact zeros, invertible."""
    def mag():
        return mp_from_fraction(Fraction(rng.randint(1, 2**20)) * Fraction(2) ** rng.randint(-60, 40), prec)

    zero = MPFloat.zero(prec)
    while True:
        off = [[mag() if i != j and rng.random() < 0.6 else zero for j in range(m)] for i in range(m)]
        exc = [mag() if rng.random() < 0.4 else zero for _ in range(m)]
        if all(x.sign == 0 for x in exc):
            exc[rng.randrange(m)] = mag()
        system = RDDLSystem(off, exc)
        if det_rational(system.implied_matrix()) != 0:
            return system


def random_integer_rddl(rng: random.Random, m: int, hi: int = 4):
    """Exact RDDL matrix with integer off-diagonal magnitudes and excess in [0, hi], invertible."""
    while True:
        off = [[Fraction(rng.randint(0, hi)) if i != j else Fraction(0) for j in range(m)]
               for i in range(m)]
        exc = [Fraction(rng.randint(0, hi)) for _ in range(m)]
        M = rddl_matrix(off, exc)
        if det_rational(M) != 0:
            return M


def system_from_fractions(off, exc, prec: int = 64) -> RDDLSystem:
    return RDDLSystem([[mp_from_fraction(x, prec) for x in row] for row in off],
                      [mp_from_fraction(x, prec) for x in exc])
