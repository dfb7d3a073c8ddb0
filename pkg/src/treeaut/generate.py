"""Random schemes and edge-indexed graphs for property tests."""

from __future__ import annotations

import random

from .extnat import OMEGA, ExtNat
from .nonrooted import Edge, EdgeIndexedGraph
from .scheme import Entry, Scheme

__all__ = ["random_mult", "random_scheme", "random_edge_indexed"]

_MULTS = (ExtNat(1), ExtNat(2), ExtNat(3), OMEGA)


def random_mult(rng: random.Random, weights=(3, 3, 1, 3)) -> ExtNat:
    return rng.choices(_MULTS, weights=weights)[0]


def random_scheme(rng: random.Random, max_classes: int = 5, max_entries: int = 3) -> Scheme:
    """Random scheme with every class reachable; leaves and self-loops are common."""
    n = rng.randint(1, max_classes)
    names = [f"c{i}" for i in range(n)]
    rows: list[list[Entry]] = [[] for _ in names]
    for i in range(1, n):
        rows[rng.randrange(i)].append(Entry(names[i], random_mult(rng)))
    for row in rows:
        for _ in range(rng.randint(0, max_entries - 1)):
            if len(row) < max_entries:
                row.append(Entry(rng.choice(names), random_mult(rng)))
        rng.shuffle(row)
    return Scheme(tuple(names), names[0], tuple(tuple(r) for r in rows))


def random_edge_indexed(rng: random.Random, max_vertices: int = 3, max_extra: int = 2) -> EdgeIndexedGraph:
    """Random connected edge-indexed graph; loops are allowed."""
    n = rng.randint(1, max_vertices)
    vs = [f"v{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        edges.append(Edge(vs[rng.randrange(i)], vs[i], random_mult(rng), random_mult(rng)))
    for _ in range(rng.randint(0 if n > 1 else 1, max_extra)):
        a, b = rng.choice(vs), rng.choice(vs)
        ia = random_mult(rng)
        ib = ia if a == b and rng.random() < 0.5 else random_mult(rng)
        edges.append(Edge(a, b, ia, ib))
    return EdgeIndexedGraph(tuple(vs), tuple(edges))
