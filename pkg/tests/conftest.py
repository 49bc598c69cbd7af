import itertools
import random

import pytest

from hampack.posa import ColorClassGraph


def adjacency_from_edges(n, edges):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def random_graph(rnd: random.Random, n, p):
    return [(u, v) for u in range(n) for v in range(u + 1, n)
            if rnd.random() < p]


def min_degree(n, edges):
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return min(deg) if n else 0


def petersen_edges():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return outer + inner + spokes


@pytest.fixture(scope="session")
def petersen_graph():
    return ColorClassGraph(10, petersen_edges(), [])


def complete_graph_edges(n):
    return list(itertools.combinations(range(n), 2))
