import random

import pytest

from regres import Graph, sample_simple_with_remainder


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def complete_bipartite(a, b):
    return Graph(a + b, [(u, a + v) for u in range(a) for v in range(b)])


def petersen():
    edges = []
    for i in range(5):
        edges.append((i, (i + 1) % 5))
        edges.append((i, i + 5))
        edges.append((5 + i, 5 + (i + 2) % 5))
    return Graph(10, edges)


def random_connected_graph(n, extra_edges, rng):
    """Random spanning tree plus `extra_edges` random chords."""
    verts = list(range(n))
    rng.shuffle(verts)
    g = Graph(n)
    for i in range(1, n):
        g.add_edge(verts[i], verts[rng.randrange(i)])
    candidates = [
        (u, v) for u in range(n) for v in range(u + 1, n) if not g.has_edge(u, v)
    ]
    rng.shuffle(candidates)
    for u, v in candidates[:extra_edges]:
        g.add_edge(u, v)
    return g


def sample_regular(n, d, seed):
    """Exactly uniform d-regular graph (rejection sampler)."""
    return sample_simple_with_remainder(Graph(n), d, seed).graph


@pytest.fixture
def rng():
    return random.Random(20240817)
