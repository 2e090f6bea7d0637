import random
from fractions import Fraction

import pytest
from scipy import stats

from regres import (
    Configuration,
    DegreeSequence,
    Graph,
    MultiGraph,
    PointSet,
    RejectionBudgetExceeded,
    SwitchPlan,
    algorithm_A_step,
    algorithm_A_support,
    algorithm_B_distribution,
    algorithm_B_step,
    apply_switch,
    default_sigma,
    derive_seed,
    hybrid_sample_configuration,
    is_simple,
    project,
    sample_configuration_sequential,
    sample_regular_pairing,
    sample_simple_with_remainder,
)

from conftest import cycle_graph, sample_regular


def all_matchings(points):
    """Independent brute-force enumeration of perfect matchings."""
    points = sorted(points)
    if not points:
        return [frozenset()]
    first, rest = points[0], points[1:]
    out = []
    for i, p in enumerate(rest):
        others = rest[:i] + rest[i + 1 :]
        for m in all_matchings(others):
            out.append(m | {(first, p)})
    return out


def ones_point_set(total):
    return PointSet(DegreeSequence((1,) * total))


class TestPointSet:
    def test_contracted_and_slots(self):
        ps = PointSet(DegreeSequence((2, 0, 3)))
        assert ps.total == 5
        assert [ps.contracted(p) for p in range(5)] == [0, 0, 2, 2, 2]
        assert list(ps.points_of_vertex(2)) == [2, 3, 4]
        assert ps.point(2, 1) == 3
        with pytest.raises(IndexError):
            ps.point(1, 0)


class TestConfiguration:
    def test_matching_constraints(self):
        ps = ones_point_set(4)
        c = Configuration(ps, [(0, 1)])
        with pytest.raises(ValueError):
            c.with_pair(1, 2)
        with pytest.raises(ValueError):
            c.with_pair(2, 2)
        assert c.with_pair(2, 3).is_complete()

    def test_without_pair(self):
        ps = ones_point_set(4)
        c = Configuration(ps, [(0, 1), (2, 3)])
        back = c.without_pair(1, 0)
        assert back.key() == frozenset({(2, 3)})
        with pytest.raises(ValueError):
            back.without_pair(0, 1)


class TestSequentialSampler:
    def test_unique_pairing_for_two_points(self):
        ps = ones_point_set(2)
        c = sample_configuration_sequential(ps, seed=5)
        assert c.key() == frozenset({(0, 1)})

    def test_support_is_all_matchings_d4(self):
        ps = ones_point_set(4)
        oracle = {frozenset(m) for m in all_matchings(range(4))}
        assert len(oracle) == 3  # (4-1)!!
        seen = {
            sample_configuration_sequential(ps, seed=s).key() for s in range(200)
        }
        assert seen == oracle

    def test_uniform_over_15_configurations(self):
        ps = ones_point_set(6)
        oracle = sorted({frozenset(m) for m in all_matchings(range(6))}, key=sorted)
        assert len(oracle) == 15  # (6-1)!!
        index = {m: i for i, m in enumerate(oracle)}
        counts = [0] * 15
        rng = random.Random(99)
        for _ in range(30_000):
            counts[index[sample_configuration_sequential(ps, rng).key()]] += 1
        assert stats.chisquare(counts).pvalue > 0.001

    def test_odd_total_rejected(self):
        with pytest.raises(ValueError):
            sample_configuration_sequential(ones_point_set(3), seed=0)


class TestAlgorithmA:
    def test_forced_single_pairing(self):
        ps = ones_point_set(2)
        c = algorithm_A_step(Configuration(ps), seed=3)
        assert c.key() == frozenset({(0, 1)})

    def test_first_step_uniform_over_six_pairs(self):
        ps = ones_point_set(4)
        counts = {}
        rng = random.Random(7)
        for _ in range(12_000):
            c = algorithm_A_step(Configuration(ps), rng)
            counts[c.key()] = counts.get(c.key(), 0) + 1
        assert len(counts) == 6  # C(4,2)
        assert stats.chisquare(list(counts.values())).pvalue > 0.001

    def test_iterated_steps_uniform_over_complete(self):
        ps = ones_point_set(6)
        oracle = {frozenset(m) for m in all_matchings(range(6))}
        counts = {m: 0 for m in oracle}
        rng = random.Random(11)
        for _ in range(30_000):
            c = Configuration(ps)
            for _ in range(3):
                c = algorithm_A_step(c, rng)
            counts[c.key()] += 1
        assert stats.chisquare(list(counts.values())).pvalue > 0.001

    def test_needs_two_uncovered(self):
        ps = ones_point_set(2)
        full = Configuration(ps, [(0, 1)])
        with pytest.raises(ValueError):
            algorithm_A_step(full, seed=0)

    @pytest.mark.parametrize("total,expected", [(2, 1), (4, 3), (6, 15)])
    def test_exhaustive_search_counts(self, total, expected):
        # Double factorial (total-1)!! distinct complete configurations.
        ps = ones_point_set(total)
        complete = set()

        def dfs(config):
            if config.is_complete():
                complete.add(config.key())
                return
            for x, y in algorithm_A_support(config):
                dfs(config.with_pair(x, y))

        dfs(Configuration(ps))
        assert len(complete) == expected


def reachable_by_one_step(config, sigma):
    """Reachable set of the ordered incremental step, from its definition."""
    i = config.size + 1
    x1, x2 = sigma[2 * i - 2], sigma[2 * i - 1]
    out = {config.with_pair(x1, x2).key()}
    for a, b in config.pairs:
        for z1, z2 in ((a, b), (b, a)):
            out.add(
                config.without_pair(a, b).with_pair(x1, z1).with_pair(x2, z2).key()
            )
    return out


class TestAlgorithmB:
    def test_first_step_forced(self):
        ps = ones_point_set(4)
        empty = Configuration(ps)
        sigma = tuple(range(4))
        for s in range(10):
            c = algorithm_B_step(empty, sigma, seed=s)
            assert c.key() == frozenset({(0, 1)})

    def test_second_step_type_split(self):
        # Type A keeps the old pairing: probability 1/3; the two Type B
        # outcomes carry 1/3 each.
        ps = ones_point_set(4)
        m1 = Configuration(ps, [(0, 1)])
        sigma = (0, 1, 2, 3)
        dist = dict()
        for cfg, p in algorithm_B_distribution(m1, sigma):
            dist[cfg.key()] = dist.get(cfg.key(), Fraction(0)) + p
        type_a = m1.with_pair(2, 3).key()
        assert dist[type_a] == Fraction(1, 3)
        assert sum(dist.values()) == 1

    def test_step_frequencies_match_enumeration(self):
        ps = ones_point_set(4)
        m1 = Configuration(ps, [(0, 1)])
        sigma = (1, 0, 3, 2)
        support = reachable_by_one_step(m1, sigma)
        assert len(support) == 3
        counts = {k: 0 for k in support}
        rng = random.Random(13)
        for _ in range(30_000):
            counts[algorithm_B_step(m1, sigma, rng).key()] += 1
        assert stats.chisquare(list(counts.values())).pvalue > 0.001

    def test_exact_law_uniform_on_reachable_set(self):
        # Analytic law vs the independently enumerated reachable set, with
        # rational arithmetic and zero tolerance, for every partial state.
        from itertools import combinations

        ps = ones_point_set(6)
        all_points = list(range(6))
        ones = [Configuration(ps, [pair]) for pair in combinations(all_points, 2)]
        twos_keys = set()
        twos = []
        for m in all_matchings(range(6)):
            pairs = sorted(m)
            for drop in range(3):
                kept = tuple(p for i, p in enumerate(pairs) if i != drop)
                if kept not in twos_keys:
                    twos_keys.add(kept)
                    twos.append(Configuration(ps, kept))
        states = [Configuration(ps)] + ones + twos
        rng = random.Random(17)
        for config in states:
            covered = sorted(config.covered_points())
            free = [p for p in all_points if p not in config.covered_points()]
            for _ in range(3):  # a few random consistent orderings each
                rng.shuffle(covered)
                rng.shuffle(free)
                sigma = tuple(covered + free)
                i = config.size + 1
                law = algorithm_B_distribution(config, sigma)
                support = reachable_by_one_step(config, sigma)
                assert {cfg.key() for cfg, _ in law} == support
                assert len(law) == 2 * i - 1 == len(support)
                assert all(p == Fraction(1, 2 * i - 1) for _, p in law)
                assert sum(p for _, p in law) == 1

    def test_sigma_validation(self):
        ps = ones_point_set(4)
        m1 = Configuration(ps, [(0, 1)])
        with pytest.raises(ValueError):
            algorithm_B_step(m1, (0, 2, 1, 3), seed=0)
        with pytest.raises(ValueError):
            algorithm_B_step(m1, (0, 1, 2), seed=0)

    def test_default_sigma_discovery_order(self):
        ps = ones_point_set(6)
        c = Configuration(ps, [(4, 2), (0, 5)])
        assert default_sigma(c) == (2, 4, 0, 5, 1, 3)


class TestHybridSampler:
    @pytest.mark.parametrize("fraction", [0.0, 2 / 3, 1.0])
    def test_uniform_over_complete_configurations(self, fraction):
        ps = ones_point_set(6)
        oracle = {frozenset(m) for m in all_matchings(range(6))}
        counts = {m: 0 for m in oracle}
        rng = random.Random(23)
        for _ in range(30_000):
            counts[hybrid_sample_configuration(ps, fraction, rng).key()] += 1
        assert stats.chisquare(list(counts.values())).pvalue > 0.001

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            hybrid_sample_configuration(ones_point_set(4), 1.5, seed=0)


class TestProjection:
    def test_single_edge(self):
        ps = PointSet(DegreeSequence((1, 1)))
        mg = project(Configuration(ps, [(0, 1)]))
        assert mg.multiplicity(0, 1) == 1 and mg.degrees() == (1, 1)

    def test_loop_counts_double(self):
        ps = PointSet(DegreeSequence((2,)))
        mg = project(Configuration(ps, [(0, 1)]))
        assert mg.multiplicity(0, 0) == 1 and mg.degree(0) == 2

    def test_double_edge(self):
        ps = PointSet(DegreeSequence((2, 2)))
        mg = project(Configuration(ps, [(0, 2), (1, 3)]))
        assert mg.multiplicity(0, 1) == 2 and mg.degrees() == (2, 2)

    def test_projection_degrees_match_sequence(self, rng):
        degrees = (3, 1, 4, 2, 2)
        ps = PointSet(DegreeSequence(degrees))
        for s in range(30):
            mg = project(sample_configuration_sequential(ps, seed=s))
            assert mg.degrees() == degrees

    def test_incomplete_rejected(self):
        ps = ones_point_set(4)
        with pytest.raises(ValueError):
            project(Configuration(ps, [(0, 1)]))


class TestIsSimple:
    def test_cases(self):
        assert not is_simple(MultiGraph(2, [(0, 1), (0, 1)]))
        assert not is_simple(MultiGraph(2, [(0, 0)]))
        assert is_simple(MultiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))


class TestRejectionSampler:
    def test_k4_is_the_only_cubic_graph_on_four(self):
        for s in range(5):
            g = sample_simple_with_remainder(Graph(4), 3, seed=s).graph
            assert g.m == 6 and g.min_degree() == 3

    def test_uniform_over_labelled_4_cycles(self):
        # The three 2-regular graphs on 4 labelled vertices.
        counts = {}
        rng = random.Random(31)
        for _ in range(30_000):
            g = sample_simple_with_remainder(Graph(4), 2, rng).graph
            counts[g.edge_set()] = counts.get(g.edge_set(), 0) + 1
        assert len(counts) == 3
        assert stats.chisquare(list(counts.values())).pvalue > 0.001

    def test_odd_residual_rejected(self):
        with pytest.raises(ValueError):
            sample_simple_with_remainder(Graph(3), 1, seed=0)

    def test_remainder_contained_and_uniformity_conditional(self):
        base = Graph(5, [(0, 1)])
        counts = {}
        rng = random.Random(41)
        for _ in range(6_000):
            g = sample_simple_with_remainder(base, 2, rng).graph
            assert g.has_edge(0, 1)
            assert g.degrees() == (2, 2, 2, 2, 2)
            counts[g.edge_set()] = counts.get(g.edge_set(), 0) + 1
        # 2-regular graphs on 5 labelled vertices are the 12 5-cycles;
        # those through edge {0,1} number 12 * (2*5)/20 = 6.
        assert len(counts) == 6
        assert stats.chisquare(list(counts.values())).pvalue > 0.001

    def test_max_degree_precondition(self):
        base = Graph(4, [(0, 1), (0, 2), (0, 3)])
        with pytest.raises(ValueError):
            sample_simple_with_remainder(base, 3, seed=0)

    def test_budget_exhaustion_reports_rejections(self):
        # d = n-1 forces K_n; tiny budgets may run out on n=6, d=5.
        with pytest.raises(RejectionBudgetExceeded) as exc:
            sample_simple_with_remainder(Graph(8), 7, seed=0, max_rejects=0)
        assert exc.value.rejections == 1

    def test_acceptance_rate_above_stated_bound(self):
        # Far slacker than reality: acceptance for d=4 sits near e^-3.75,
        # the asserted floor is e^-48.
        rng = random.Random(53)
        total_rejections = 0
        samples = 60
        for _ in range(samples):
            total_rejections += sample_simple_with_remainder(
                Graph(200), 4, rng
            ).rejections
        rate = samples / (samples + total_rejections)
        assert rate >= 2.718281828 ** (-3 * 4 * 4)


class TestPairingSampler:
    def test_regular_and_simple(self):
        g = sample_regular_pairing(30, 7, seed=3)
        assert g.degrees() == (7,) * 30

    def test_contains_respected(self):
        base = cycle_graph(12)
        g = sample_regular_pairing(12, 5, seed=9, contains=base)
        assert g.degrees() == (5,) * 12
        for u, v in base.edges():
            assert g.has_edge(u, v)


class TestSwitching:
    def test_c4_switch(self):
        g = cycle_graph(4)
        plan = SwitchPlan.of_labels(0, 1, 2, 3)
        out = apply_switch(g, plan)
        assert out.degrees() == (2, 2, 2, 2)
        assert out.has_edge(0, 2) and out.has_edge(1, 3)
        assert not out.has_edge(0, 1) and not out.has_edge(2, 3)

    def test_inverse_restores(self):
        g = cycle_graph(4)
        plan = SwitchPlan.of_labels(0, 1, 2, 3)
        assert apply_switch(apply_switch(g, plan), plan.inverse()) == g

    def test_inverse_restores_multigraph(self):
        g = MultiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        plan = SwitchPlan.of_labels(0, 1, 2, 3)
        out = apply_switch(apply_switch(g, plan), plan.inverse())
        assert out == g

    def test_degrees_preserved_on_random_plans(self):
        rng = random.Random(61)
        g = sample_regular(20, 3, seed=67)
        degrees = g.degrees()
        done = 0
        while done < 100:
            edges = list(g.edges())
            (u1, u2), (v1, v2) = rng.sample(edges, 2)
            if rng.random() < 0.5:
                u1, u2 = u2, u1
            if rng.random() < 0.5:
                v1, v2 = v2, v1
            plan = SwitchPlan.of_labels(u1, u2, v1, v2)
            try:
                g2 = apply_switch(g, plan)
            except ValueError:
                continue
            assert g2.degrees() == degrees
            g = g2
            done += 1

    def test_graph_variant_rejects_collisions(self):
        g = Graph(4, [(0, 1), (2, 3), (0, 2)])
        with pytest.raises(ValueError):
            apply_switch(g, SwitchPlan.of_labels(0, 1, 2, 3))  # adds 0-2 again
        tri = Graph(3, [(0, 1), (1, 2), (2, 0)])
        with pytest.raises(ValueError):
            apply_switch(tri, SwitchPlan.of_labels(0, 1, 0, 2))  # loop at 0

    def test_multigraph_variant_allows_loops(self):
        g = MultiGraph(4, [(0, 1), (0, 2)])
        out = apply_switch(g, SwitchPlan.of_labels(1, 0, 0, 2))
        assert out.multiplicity(1, 0) == 1  # new edge u1v1 = (1,0)
        assert out.multiplicity(0, 2) == 1  # new edge u2v2 = (0,2)
        assert out.degrees() == g.degrees()

    def test_missing_edge_rejected(self):
        g = cycle_graph(4)
        with pytest.raises(ValueError):
            apply_switch(g, SwitchPlan.of_labels(0, 2, 1, 3))

    def test_plan_consistency_enforced(self):
        with pytest.raises(ValueError):
            SwitchPlan(removed=((0, 1), (2, 3)), added=((0, 3), (1, 2)))


def test_stochastic_domination_by_binomial():
    # Pairing counts into a fixed set are dominated by a binomial whose
    # success rate treats every draw as maximally exposed.
    n, d = 60, 4
    a_set = frozenset(range(10))
    ps = PointSet(DegreeSequence.regular(n, d))
    point_in_a = [ps.contracted(p) in a_set for p in range(ps.total)]
    rng = random.Random(71)
    samples = 10_000
    values = []
    for _ in range(samples):
        c = sample_configuration_sequential(ps, rng)
        e = sum(1 for x, y in c.pairs if point_in_a[x] and point_in_a[y])
        values.append(e)
    t = d * len(a_set)
    p = len(a_set) / (n - 2 * len(a_set))
    ecdf_num = [0] * (t + 2)
    for v in values:
        ecdf_num[min(v, t + 1)] += 1
    running = 0
    for k in range(t + 1):
        running += ecdf_num[k]
        empirical = running / samples
        theoretical = stats.binom.cdf(k, t, p)
        margin = 3 * (theoretical * (1 - theoretical) / samples) ** 0.5
        assert empirical >= theoretical - margin, f"CDF dips at k={k}"
