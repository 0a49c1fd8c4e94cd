from __future__ import annotations

import random

import pytest

from netcycle import DebtGraph

# Three-company worked instance, major units x100 into minor units.
INTRO_EDGES = [("A", "B", 3_200_000), ("B", "C", 2_300_000), ("C", "A", 2_500_000)]

# Four-company ring whose minimum edge is D->A at 600.
RING4_EDGES = [("A", "B", 1_500), ("B", "C", 900), ("C", "D", 2_100), ("D", "A", 600)]

# Three overlapping circuits: the ring ABCD at 7000 per edge, the
# five-party ABDEF detour worth 200, the four-party BCGH branch worth 300.
# ABCD shares A->B with ABDEF and B->C with BCGH.
OVERLAP_EDGES = [
    ("A", "B", 7_000), ("B", "C", 7_000), ("C", "D", 7_000), ("D", "A", 7_000),
    ("B", "D", 200), ("D", "E", 200), ("E", "F", 200), ("F", "A", 200),
    ("C", "G", 300), ("G", "H", 300), ("H", "B", 300),
]
ABCD = ("A", "B", "C", "D")
ABDEF = ("A", "B", "D", "E", "F")
BCGH = ("B", "C", "G", "H")
OVERLAP_CIRCUITS = [ABCD, ABDEF, BCGH]


def graph_of(edges) -> DebtGraph:
    g = DebtGraph()
    for u, v, w in edges:
        g.add_obligation(u, v, w)
    return g


def complete_digraph(n: int, weight: int = 5) -> DebtGraph:
    g = DebtGraph()
    names = [chr(65 + i) for i in range(n)]
    for u in names:
        for v in names:
            if u != v:
                g.add_obligation(u, v, weight)
    return g


def random_graph(rng: random.Random, n: int, p: float, max_weight: int = 50) -> DebtGraph:
    g = DebtGraph()
    names = [f"v{i:02d}" for i in range(n)]
    for v in names:
        g.add_vertex(v)
    for u in names:
        for v in names:
            if u != v and rng.random() < p:
                g.add_obligation(u, v, rng.randint(1, max_weight))
    return g


@pytest.fixture
def intro_graph() -> DebtGraph:
    return graph_of(INTRO_EDGES)


@pytest.fixture
def ring4_graph() -> DebtGraph:
    return graph_of(RING4_EDGES)


@pytest.fixture
def overlap_graph() -> DebtGraph:
    return graph_of(OVERLAP_EDGES)
