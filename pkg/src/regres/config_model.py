"""Uniform generation of configurations (point matchings) and of graphs
with prescribed degree sequences: the sequential pairing process, the two
incremental pairing algorithms, projection to multigraphs, rejection to
simple graphs, and degree-preserving edge switchings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import exp
from typing import NamedTuple

from .graphs import DegreeSequence, Graph, MultiGraph
from .rng import make_rng


class RejectionBudgetExceeded(RuntimeError):
    """Raised when a rejection sampler exhausts its attempt budget."""

    def __init__(self, message: str, rejections: int):
        super().__init__(message)
        self.rejections = rejections


class PointSet:
    """The expanded point set of a degree sequence: d_i labelled points per
    vertex i, indexed 0..D-1 in vertex order."""

    __slots__ = ("degree_sequence", "_offsets", "_vertex_of")

    def __init__(self, degree_sequence: DegreeSequence):
        self.degree_sequence = degree_sequence
        self._offsets = []
        self._vertex_of = []
        total = 0
        for i, d in enumerate(degree_sequence.degrees):
            self._offsets.append(total)
            self._vertex_of.extend([i] * d)
            total += d

    @property
    def total(self) -> int:
        return len(self._vertex_of)

    @property
    def n(self) -> int:
        return self.degree_sequence.n

    def contracted(self, point: int) -> int:
        """The vertex whose expanded set contains `point`."""
        return self._vertex_of[point]

    def point(self, vertex: int, slot: int) -> int:
        d = self.degree_sequence.degrees[vertex]
        if not 0 <= slot < d:
            raise IndexError(f"vertex {vertex} has {d} slots, not {slot}")
        return self._offsets[vertex] + slot

    def points_of_vertex(self, vertex: int) -> range:
        base = self._offsets[vertex]
        return range(base, base + self.degree_sequence.degrees[vertex])

    def contracted_vertices(self) -> tuple:
        return tuple(self._vertex_of)


class Configuration:
    """A (possibly partial) matching on the points of a PointSet.

    Pairings are kept in insertion order, which later defines the default
    point ordering handed to the incremental pairing step.
    """

    __slots__ = ("point_set", "_pairs", "_partner")

    def __init__(self, point_set: PointSet, pairs=()):
        self.point_set = point_set
        self._pairs = []
        self._partner = {}
        for x, y in pairs:
            self._insert(x, y)

    def _insert(self, x: int, y: int) -> None:
        total = self.point_set.total
        if not (0 <= x < total and 0 <= y < total):
            raise IndexError("point index out of range")
        if x == y:
            raise ValueError("a point cannot be paired with itself")
        if x in self._partner or y in self._partner:
            raise ValueError("point already covered by a pairing")
        if x > y:
            x, y = y, x
        self._pairs.append((x, y))
        self._partner[x] = y
        self._partner[y] = x

    @property
    def size(self) -> int:
        return len(self._pairs)

    @property
    def pairs(self) -> tuple:
        return tuple(self._pairs)

    def covered(self, point: int) -> bool:
        return point in self._partner

    def covered_points(self) -> frozenset:
        return frozenset(self._partner)

    def partner(self, point: int) -> int:
        return self._partner[point]

    def uncovered_points(self) -> list:
        return [p for p in range(self.point_set.total) if p not in self._partner]

    def is_complete(self) -> bool:
        return 2 * len(self._pairs) == self.point_set.total

    def with_pair(self, x: int, y: int) -> "Configuration":
        out = Configuration(self.point_set)
        out._pairs = list(self._pairs)
        out._partner = dict(self._partner)
        out._insert(x, y)
        return out

    def without_pair(self, x: int, y: int) -> "Configuration":
        key = (x, y) if x < y else (y, x)
        if key not in self._pairs:
            raise ValueError(f"pairing {key} not present")
        out = Configuration(self.point_set)
        out._pairs = [p for p in self._pairs if p != key]
        out._partner = dict(self._partner)
        del out._partner[key[0]]
        del out._partner[key[1]]
        return out

    def key(self) -> frozenset:
        """Order-free identity of the matching, for dedup and comparison."""
        return frozenset(self._pairs)

    def __eq__(self, other):
        return isinstance(other, Configuration) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Configuration(size={self.size}, D={self.point_set.total})"


def _raw_sequential_pairs(total: int, rng) -> list:
    """The sequential pairing process on points 0..total-1.

    Scans points in label order; each still-uncovered point draws its
    partner uniformly from the remaining uncovered points. Output matchings
    are uniform over all (total-1)!! configurations.
    """
    if total % 2:
        raise ValueError("total degree must be even")
    pool = list(range(total))
    pos = list(range(total))

    def remove(p):
        idx = pos[p]
        last = pool[-1]
        pool[idx] = last
        pos[last] = idx
        pool.pop()
        pos[p] = -1

    pairs = []
    for i in range(total):
        if pos[i] < 0:
            continue
        while True:
            j = pool[rng.randrange(len(pool))]
            if j != i:
                break
        remove(i)
        remove(j)
        pairs.append((i, j))
    return pairs


def sample_configuration_sequential(point_set: PointSet, seed) -> Configuration:
    """Draw a complete configuration uniformly at random."""
    rng = make_rng(seed)
    return Configuration(point_set, _raw_sequential_pairs(point_set.total, rng))


def algorithm_A_support(config: Configuration) -> list:
    """All pairings whose addition extends the matching by one."""
    return list(combinations(config.uncovered_points(), 2))


def algorithm_A_step(config: Configuration, seed) -> Configuration:
    """Extend a partial configuration by one uniformly chosen pairing.

    The new pairing is uniform over all point pairs still uncovered, so a
    uniform input over the i-1 stage yields a uniform output over stage i.
    """
    rng = make_rng(seed)
    uncovered = config.uncovered_points()
    if len(uncovered) < 2:
        raise ValueError("need at least 2 uncovered points")
    x, y = rng.sample(uncovered, 2)
    return config.with_pair(x, y)


def default_sigma(config: Configuration) -> tuple:
    """Point ordering consistent with `config`: covered points in pairing
    insertion order (ascending within a pairing), then the rest ascending."""
    head = []
    for x, y in config.pairs:
        head.extend((x, y))
    seen = set(head)
    tail = [p for p in range(config.point_set.total) if p not in seen]
    return tuple(head + tail)


def _check_sigma(config: Configuration, sigma) -> tuple:
    total = config.point_set.total
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(total)):
        raise ValueError("sigma must be a permutation of all points")
    k = 2 * config.size
    if set(sigma[:k]) != config.covered_points():
        raise ValueError("sigma must start with exactly the covered points")
    return sigma


def algorithm_B_step(config: Configuration, sigma, seed) -> Configuration:
    """One incremental pairing step driven by a fixed point ordering.

    With probability 1/(2i-1) the next two ordered points are paired with
    each other; otherwise a uniformly chosen existing pairing is split and
    its endpoints (in a uniformly chosen role assignment) are re-paired with
    the two new points. The output is uniform over every configuration
    reachable from the input in one step.
    """
    sigma = _check_sigma(config, sigma)
    rng = make_rng(seed)
    i = config.size + 1
    if 2 * i > config.point_set.total:
        raise ValueError("configuration is already complete")
    x1, x2 = sigma[2 * i - 2], sigma[2 * i - 1]
    if rng.randrange(2 * i - 1) == 0:
        return config.with_pair(x1, x2)
    a, b = config.pairs[rng.randrange(i - 1)]
    # The role assignment is one explicit fair bit.
    z1, z2 = (a, b) if rng.getrandbits(1) == 0 else (b, a)
    return config.without_pair(a, b).with_pair(x1, z1).with_pair(x2, z2)


def algorithm_B_distribution(config: Configuration, sigma) -> list:
    """Exact output law of `algorithm_B_step` as (outcome, Fraction) pairs.

    Summed analytically over the branch probabilities; outcomes are listed
    once each (distinct branches always produce distinct matchings).
    """
    sigma = _check_sigma(config, sigma)
    i = config.size + 1
    if 2 * i > config.point_set.total:
        raise ValueError("configuration is already complete")
    x1, x2 = sigma[2 * i - 2], sigma[2 * i - 1]
    out = [(config.with_pair(x1, x2), Fraction(1, 2 * i - 1))]
    if i > 1:
        p_branch = Fraction(2 * i - 2, 2 * i - 1) * Fraction(1, i - 1) * Fraction(1, 2)
        for a, b in config.pairs:
            for z1, z2 in ((a, b), (b, a)):
                out.append(
                    (
                        config.without_pair(a, b).with_pair(x1, z1).with_pair(x2, z2),
                        p_branch,
                    )
                )
    return out


def hybrid_sample_configuration(point_set: PointSet, switch_fraction: float, seed) -> Configuration:
    """Uniform complete configuration via a two-phase pairing build.

    The first round(switch_fraction * D/2) pairings are added by uniform
    free-pair extension; the remainder by the ordered incremental step with
    the default consistent ordering. Both phases preserve uniformity, so
    any fraction in [0, 1] yields the uniform law.
    """
    if not 0 <= switch_fraction <= 1:
        raise ValueError("switch_fraction must lie in [0, 1]")
    total_steps = point_set.total // 2
    if point_set.total % 2:
        raise ValueError("total degree must be even")
    steps_a = min(total_steps, round(switch_fraction * total_steps))
    rng = make_rng(seed)
    config = Configuration(point_set)
    for _ in range(steps_a):
        config = algorithm_A_step(config, rng)
    if config.size < total_steps:
        sigma = default_sigma(config)
        for _ in range(total_steps - config.size):
            config = algorithm_B_step(config, sigma, rng)
    return config


def project(config: Configuration) -> MultiGraph:
    """Contract a complete configuration to its multigraph."""
    if not config.is_complete():
        raise ValueError("configuration must be complete to project")
    ps = config.point_set
    g = MultiGraph(ps.n)
    for x, y in config.pairs:
        g.add_edge(ps.contracted(x), ps.contracted(y))
    return g


def is_simple(g: MultiGraph) -> bool:
    """True iff the multigraph has no loops and no parallel edges."""
    return g.is_simple()


class SimpleSampleResult(NamedTuple):
    graph: Graph
    rejections: int
    accept_rate: float


def expected_simple_rate(d: int) -> float:
    """Heuristic acceptance-rate estimate for rejection to simple d-regular
    graphs, exp(-lam - lam^2) with lam = (d-1)/2. Used only to decide when
    exact rejection is practical."""
    lam = (d - 1) / 2
    return exp(-lam - lam * lam)


def sample_simple_with_remainder(
    remainder: Graph, d: int, seed, max_rejects: int = 10**6
) -> SimpleSampleResult:
    """Uniform d-regular simple graph containing `remainder`, by rejection.

    Repeatedly samples a configuration on the residual degree sequence
    d - d_remainder(v) and accepts when the projected multigraph together
    with `remainder` is simple. With an empty remainder this is the uniform
    d-regular sampler. Returns the accepted graph plus rejection counts.
    """
    n = remainder.n
    if d >= n:
        raise ValueError(f"no simple {d}-regular graph on {n} vertices exists")
    if remainder.max_degree() >= d:
        raise ValueError("remainder max degree must be strictly below d")
    residual = [d - remainder.degree(v) for v in range(n)]
    total = sum(residual)
    if total % 2:
        raise ValueError("residual degree sum is odd; no configuration exists")

    vertex_of = []
    for v, r in enumerate(residual):
        vertex_of.extend([v] * r)
    forbidden = remainder.edge_set()
    rng = make_rng(seed)

    rejections = 0
    while rejections <= max_rejects:
        pairs = _raw_sequential_pairs(total, rng)
        seen = set()
        ok = True
        for x, y in pairs:
            a, b = vertex_of[x], vertex_of[y]
            if a == b:
                ok = False
                break
            key = (a, b) if a < b else (b, a)
            if key in seen or key in forbidden:
                ok = False
                break
            seen.add(key)
        if ok:
            out = remainder.copy()
            for a, b in seen:
                out.add_edge(a, b)
            return SimpleSampleResult(out, rejections, 1.0 / (rejections + 1))
        rejections += 1
    raise RejectionBudgetExceeded(
        f"no simple graph found within {max_rejects} rejections", rejections
    )


def sample_regular_pairing(
    n: int, d: int, seed, contains: Graph | None = None, max_restarts: int = 2000
) -> Graph:
    """Fast d-regular simple graph containing `contains`, by collision-free
    stub pairing with restarts.

    Approximately uniform only (the standard pairing-with-retries sampler);
    use `sample_simple_with_remainder` wherever exact uniformity matters.
    """
    remainder = contains if contains is not None else Graph(n)
    if remainder.n != n:
        raise ValueError("contains graph has a different vertex count")
    if d >= n:
        raise ValueError(f"no simple {d}-regular graph on {n} vertices exists")
    if remainder.max_degree() > d:
        raise ValueError("contains graph exceeds the target degree")
    residual = [d - remainder.degree(v) for v in range(n)]
    if sum(residual) % 2:
        raise ValueError("residual degree sum is odd")
    rng = make_rng(seed)

    def suitable(counts, adj):
        if not counts:
            return True
        stubs = sorted(counts)
        for s1 in stubs:
            for s2 in stubs:
                if s1 == s2:
                    break
                if s2 not in adj[s1]:
                    return True
        return False

    base_stubs = []
    for v, r in enumerate(residual):
        base_stubs.extend([v] * r)

    for _ in range(max_restarts):
        adj = [set(remainder.neighbors(v)) for v in range(n)]
        new_edges = []
        stubs = list(base_stubs)
        dead = False
        while stubs:
            rng.shuffle(stubs)
            counts = {}
            it = iter(stubs)
            for s1, s2 in zip(it, it):
                if s1 > s2:
                    s1, s2 = s2, s1
                if s1 != s2 and s2 not in adj[s1]:
                    adj[s1].add(s2)
                    adj[s2].add(s1)
                    new_edges.append((s1, s2))
                else:
                    counts[s1] = counts.get(s1, 0) + 1
                    counts[s2] = counts.get(s2, 0) + 1
            if not counts:
                break
            if not suitable(counts, adj):
                dead = True
                break
            stubs = [v for v, k in counts.items() for _ in range(k)]
        if not dead:
            out = remainder.copy()
            for u, v in new_edges:
                out.add_edge(u, v)
            return out
    raise RejectionBudgetExceeded(
        f"pairing sampler failed after {max_restarts} restarts", max_restarts
    )


@dataclass(frozen=True)
class SwitchPlan:
    """A degree-preserving edge switch: drop u1u2 and v1v2, add u1v1, u2v2."""

    removed: tuple
    added: tuple

    def __post_init__(self):
        (u1, u2), (v1, v2) = self.removed
        if self.added != ((u1, v1), (u2, v2)):
            raise ValueError("added edges inconsistent with removed labelling")

    @classmethod
    def of_labels(cls, u1: int, u2: int, v1: int, v2: int) -> "SwitchPlan":
        return cls(removed=((u1, u2), (v1, v2)), added=((u1, v1), (u2, v2)))

    def inverse(self) -> "SwitchPlan":
        (u1, u2), (v1, v2) = self.removed
        return SwitchPlan.of_labels(u1, v1, u2, v2)


def apply_switch(g, plan: SwitchPlan):
    """Apply a switch, returning a new graph of the same kind.

    Multigraphs accept any plan whose removed edges are present (the result
    may gain loops or parallels). Simple graphs additionally reject plans
    whose added edges would create a loop, a parallel edge, or collide with
    each other.
    """
    (u1, u2), (v1, v2) = plan.removed
    (a1, a2) = plan.added
    if isinstance(g, MultiGraph):
        out = g.copy()
        out.remove_edge(u1, u2)
        out.remove_edge(v1, v2)
        out.add_edge(*a1)
        out.add_edge(*a2)
        return out
    out = g.copy()
    out.remove_edge(u1, u2)
    out.remove_edge(v1, v2)
    for x, y in (a1, a2):
        if x == y:
            raise ValueError(f"switch would create a loop at {x}")
        if out.has_edge(x, y):
            raise ValueError(f"switch would create a parallel edge {{{x},{y}}}")
        out.add_edge(x, y)
    return out
