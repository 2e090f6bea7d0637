import random
from fractions import Fraction

import pytest

from regres import (
    DegreeSequence,
    Graph,
    MultiGraph,
    connected_components,
    edge_count_between,
    is_connected,
    is_in_H_alpha,
    neighborhood,
    read_edgelist,
    subtract,
    two_coloring,
    union,
    write_edgelist,
)

from conftest import complete_graph, cycle_graph, path_graph, random_connected_graph


class TestGraphBasics:
    def test_handshake(self):
        g = cycle_graph(7)
        assert sum(g.degrees()) == 2 * g.m

    def test_no_loops_or_parallels(self):
        g = Graph(3)
        with pytest.raises(ValueError):
            g.add_edge(1, 1)
        g.add_edge(0, 1)
        with pytest.raises(ValueError):
            g.add_edge(1, 0)

    def test_vertex_range_checked(self):
        g = Graph(3)
        with pytest.raises(IndexError):
            g.add_edge(0, 3)
        with pytest.raises(IndexError):
            g.degree(-1)

    def test_remove_edge(self):
        g = cycle_graph(4)
        g.remove_edge(0, 1)
        assert g.m == 3 and not g.has_edge(0, 1)
        with pytest.raises(ValueError):
            g.remove_edge(0, 1)

    def test_copy_is_independent(self):
        g = cycle_graph(4)
        h = g.copy()
        h.remove_edge(0, 1)
        assert g.has_edge(0, 1) and not h.has_edge(0, 1)

    def test_edges_sorted(self):
        g = Graph(4, [(3, 2), (1, 0), (2, 0)])
        assert list(g.edges()) == [(0, 1), (0, 2), (2, 3)]


class TestMultiGraph:
    def test_loop_degree_counts_twice(self):
        g = MultiGraph(2)
        g.add_edge(0, 0)
        assert g.degree(0) == 2
        assert g.m == 1
        assert sum(g.degrees()) == 2 * g.m

    def test_parallel_edges(self):
        g = MultiGraph(2, [(0, 1), (0, 1)])
        assert g.multiplicity(0, 1) == 2
        assert g.degrees() == (2, 2)
        assert not g.is_simple()

    def test_to_graph_requires_simple(self):
        g = MultiGraph(3, [(0, 1), (1, 2)])
        assert g.is_simple()
        assert g.to_graph().edge_set() == frozenset({(0, 1), (1, 2)})
        g.add_edge(0, 0)
        with pytest.raises(ValueError):
            g.to_graph()


class TestEdgeCountBetween:
    def test_cross_edges_of_c4(self):
        g = cycle_graph(4)
        assert edge_count_between(g, {0, 1}, {2, 3}) == 2

    def test_whole_vertex_set(self):
        g = cycle_graph(4)
        assert edge_count_between(g, range(4), range(4)) == 4

    def test_nonadjacent_pair(self):
        g = cycle_graph(4)
        assert edge_count_between(g, {0}, {2}) == 0

    def test_symmetry(self, rng):
        g = random_connected_graph(12, 8, rng)
        for _ in range(20):
            a = set(rng.sample(range(12), rng.randint(1, 6)))
            b = set(rng.sample(range(12), rng.randint(1, 6)))
            assert edge_count_between(g, a, b) == edge_count_between(g, b, a)

    def test_overlap_counted_once(self):
        g = Graph(3, [(0, 1)])
        assert edge_count_between(g, {0, 1}, {0, 1}) == 1

    def test_multigraph_multiplicity(self):
        g = MultiGraph(3, [(0, 1), (0, 1), (1, 1)])
        assert edge_count_between(g, {0}, {1}) == 2
        assert edge_count_between(g, {1}, {1}) == 1

    def test_out_of_range(self):
        g = cycle_graph(4)
        with pytest.raises(IndexError):
            edge_count_between(g, {0, 9}, {1})


class TestSubtractUnion:
    def test_remove_one_edge(self):
        g = cycle_graph(4)
        h = Graph(4, [(0, 1)])
        out = subtract(g, h)
        assert out.edge_set() == frozenset({(1, 2), (2, 3), (0, 3)})

    def test_self_subtraction(self):
        g = cycle_graph(5)
        assert subtract(g, g).m == 0

    def test_subtract_empty_is_identity(self):
        g = cycle_graph(5)
        assert subtract(g, Graph(5)) == g

    def test_union_closes_triangle(self):
        p = path_graph(3)
        out = union(p, Graph(3, [(2, 0)]))
        assert out.edge_set() == complete_graph(3).edge_set()

    def test_union_with_empty(self):
        g = cycle_graph(5)
        assert union(g, Graph(5)) == g

    def test_multigraph_union_adds_multiplicities(self):
        a = MultiGraph(2, [(0, 1)])
        out = union(a, a)
        assert out.multiplicity(0, 1) == 2
        assert out.degrees() == (2, 2)

    def test_mismatched_sizes(self):
        with pytest.raises(ValueError):
            subtract(cycle_graph(4), Graph(5))
        with pytest.raises(ValueError):
            union(cycle_graph(4), Graph(5))

    def test_subtract_union_round_trip(self, rng):
        g = random_connected_graph(10, 12, rng)
        h_edges = [e for e in g.edges() if rng.random() < 0.4]
        h = Graph(10, h_edges)
        assert union(subtract(g, h), h) == g


class TestHAlpha:
    def test_matching_in_cubic_at_one_third(self):
        g = complete_graph(4)
        matching = Graph(4, [(0, 1), (2, 3)])
        assert is_in_H_alpha(g, matching, 1 / 3)
        assert is_in_H_alpha(g, matching, Fraction(1, 3))

    def test_shared_vertex_violates_half(self):
        g = complete_graph(4)
        h = Graph(4, [(0, 1), (0, 2)])
        assert not is_in_H_alpha(g, h, 1 / 2)

    def test_containment_required(self):
        g = cycle_graph(4)
        h = Graph(4, [(0, 2)])
        assert not is_in_H_alpha(g, h, 1.0)

    def test_alpha_one_and_zero(self, rng):
        g = random_connected_graph(9, 6, rng)
        assert is_in_H_alpha(g, g, 1)
        assert is_in_H_alpha(g, Graph(9), 0)
        assert not is_in_H_alpha(g, Graph(9, [next(g.edges())]), 0)


class TestConnectivity:
    def test_components(self):
        g = Graph(5, [(0, 1), (2, 3)])
        assert connected_components(g) == [[0, 1], [2, 3], [4]]
        assert not is_connected(g)
        assert is_connected(cycle_graph(5))

    def test_neighborhood_may_meet_set(self):
        g = cycle_graph(4)
        assert neighborhood(g, {0, 1}) == frozenset({0, 1, 2, 3})

    def test_two_coloring(self):
        assert two_coloring(cycle_graph(4)) is not None
        assert two_coloring(cycle_graph(5)) is None


class TestDegreeSequence:
    def test_regular(self):
        ds = DegreeSequence.regular(4, 3)
        assert ds.total == 12 and ds.is_even()

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            DegreeSequence((1, -1))


class TestEdgelistIO:
    def test_graph_round_trip(self, tmp_path, rng):
        g = random_connected_graph(9, 5, rng)
        path = tmp_path / "g.edgelist"
        write_edgelist(g, path)
        assert read_edgelist(path) == g

    def test_multigraph_round_trip(self, tmp_path):
        g = MultiGraph(3, [(0, 0), (0, 1), (0, 1), (1, 2)])
        path = tmp_path / "m.edgelist"
        write_edgelist(g, path)
        back = read_edgelist(path)
        assert isinstance(back, MultiGraph) and back == g

    def test_plain_file_rejects_loops(self, tmp_path):
        path = tmp_path / "bad.edgelist"
        path.write_text("2 1\n0 0\n")
        with pytest.raises(ValueError):
            read_edgelist(path)

    def test_header_count_checked(self, tmp_path):
        path = tmp_path / "bad.edgelist"
        path.write_text("3 2\n0 1\n")
        with pytest.raises(ValueError):
            read_edgelist(path)


def test_handshake_identity_random_graphs(rng):
    for _ in range(25):
        g = random_connected_graph(rng.randint(2, 14), rng.randint(0, 10), rng)
        assert sum(g.degrees()) == 2 * g.m
