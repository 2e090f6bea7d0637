"""Bounded-degree deletion adversaries built on locally maximal cuts, the
unbalanced-cut attack, random capped deletions, and the structured
switching plans used to move cut incidences around.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

from .config_model import SwitchPlan, apply_switch
from .graphs import Graph, edge_count_between, subtract
from .rng import make_rng, spawn


@dataclass(frozen=True)
class CutPartition:
    """A bipartition (a, b) of the vertex set with per-vertex cross degrees."""

    a: frozenset
    b: frozenset
    cross_degrees: tuple
    value: int

    @classmethod
    def from_sides(cls, g: Graph, a_side) -> "CutPartition":
        a = frozenset(a_side)
        b = frozenset(range(g.n)) - a
        cross = []
        for v in range(g.n):
            other = b if v in a else a
            cross.append(sum(1 for w in g.neighbors(v) if w in other))
        value = edge_count_between(g, a, b)
        return cls(a=a, b=b, cross_degrees=tuple(cross), value=value)


@dataclass(frozen=True)
class UnbalancedBipartite:
    """Certificate: the graph minus the deletion is bipartite with parts of
    different sizes, hence neither Hamiltonian nor perfectly matchable."""

    a: frozenset
    b: frozenset


@dataclass(frozen=True)
class AdversaryDeletion:
    h: Graph
    bound: int
    certificate: UnbalancedBipartite | None = None


@dataclass(frozen=True)
class AttackNotFound:
    stats: dict = field(default_factory=dict)


def local_max_cut(g: Graph, seed=0) -> CutPartition:
    """Hill-climb single-vertex moves from a random bipartition until no
    move improves the cut.

    At a local maximum every vertex has at least half its degree across
    the cut, so cross_degree(v) >= ceil(d(v)/2) everywhere.
    """
    rng = make_rng(seed)
    n = g.n
    side = [rng.getrandbits(1) for _ in range(n)]
    cross = [0] * n
    for v in range(n):
        cross[v] = sum(1 for w in g.neighbors(v) if side[w] != side[v])
    improved = True
    while improved:
        improved = False
        order = list(range(n))
        rng.shuffle(order)
        for v in order:
            intra = g.degree(v) - cross[v]
            if intra > cross[v]:
                old = side[v]
                side[v] = 1 - old
                cross[v] = intra
                for w in g.neighbors(v):
                    if side[w] == side[v]:
                        cross[w] -= 1
                    else:
                        cross[w] += 1
                improved = True
    cut = CutPartition.from_sides(g, [v for v in range(n) if side[v] == 0])
    for v in range(n):
        if cut.cross_degrees[v] < ceil(g.degree(v) / 2):
            raise RuntimeError("local maximality violated; this is a bug")
    return cut


def exact_max_cut(g: Graph, limit: int = 24) -> CutPartition:
    """Maximum cut by exhaustion over bipartitions (vertex n-1 pinned)."""
    n = g.n
    if n > limit:
        raise ValueError(f"exact max cut limited to {limit} vertices, got {n}")
    if n == 0:
        return CutPartition.from_sides(g, [])
    edges = list(g.edges())
    best_mask, best_val = 0, -1
    for mask in range(1 << (n - 1)):
        val = 0
        for u, v in edges:
            su = (mask >> u) & 1 if u < n - 1 else 0
            sv = (mask >> v) & 1 if v < n - 1 else 0
            if su != sv:
                val += 1
        if val > best_val:
            best_mask, best_val = mask, val
    a_side = [v for v in range(n - 1) if (best_mask >> v) & 1]
    return CutPartition.from_sides(g, a_side)


def intra_cut_deletion(g: Graph, cut: CutPartition) -> AdversaryDeletion:
    """Delete every edge that stays inside one side of the cut."""
    if cut.a | cut.b != frozenset(range(g.n)) or cut.a & cut.b:
        raise ValueError("cut is not a partition of the vertex set")
    h = Graph(g.n)
    for u, v in g.edges():
        if (u in cut.a) == (v in cut.a):
            h.add_edge(u, v)
    certificate = None
    if len(cut.a) != len(cut.b):
        certificate = UnbalancedBipartite(a=cut.a, b=cut.b)
    return AdversaryDeletion(h=h, bound=h.max_degree(), certificate=certificate)


def unbalanced_cut_attack(g: Graph, restarts: int = 20, seed=0):
    """Search locally maximal cuts for one with unequal sides; deleting its
    intra-side edges then leaves an unbalanced bipartite graph.

    On hosts whose degrees are all odd, local maximality caps the deleted
    degree at (d-1)/2 automatically. Returns the deletion with its
    certificate, or the balanced-cut statistics when every restart came
    out balanced.
    """
    rng = make_rng(seed)
    balanced = 0
    for _ in range(max(1, restarts)):
        cut = local_max_cut(g, spawn(rng))
        if len(cut.a) != len(cut.b):
            return intra_cut_deletion(g, cut)
        balanced += 1
    return AttackNotFound(stats={"balanced_cuts": balanced, "restarts": restarts})


def maxcut_eps_adversary(g: Graph, eps: float, seed=0):
    """Unbalance a locally maximal cut, by construction when the sides
    already differ, else by moving one vertex of low cross degree.

    A balanced cut is made unbalanced by shifting a vertex x with
    cross_degree(x) <= (1/2 + eps/2)*d across, after which deleting all
    intra-side edges costs no vertex more than (1/2 + eps)*d edges. When
    no such vertex exists (possible at finite n), reports NotFound.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    rng = make_rng(seed)
    cut = local_max_cut(g, spawn(rng))
    if len(cut.a) != len(cut.b):
        return intra_cut_deletion(g, cut)
    d = g.max_degree()
    threshold = (0.5 + eps / 2) * d
    movable = sorted(
        (cut.cross_degrees[x], x)
        for x in range(g.n)
        if cut.cross_degrees[x] <= threshold
    )
    for _, x in movable:
        if x in cut.a:
            new_a = cut.a - {x}
        else:
            new_a = cut.a | {x}
        moved = CutPartition.from_sides(g, new_a)
        deletion = intra_cut_deletion(g, moved)
        if deletion.h.max_degree() <= (0.5 + eps) * d:
            return deletion
    return AttackNotFound(
        stats={
            "balanced": True,
            "movable_candidates": len(movable),
            "threshold": threshold,
        }
    )


def random_bounded_adversary(g: Graph, r: int, seed=0) -> AdversaryDeletion:
    """Random deletion subgraph with every vertex degree capped at `r`.

    Greedy randomised selection over shuffled edge orders, best of three
    passes, aiming for (but not guaranteeing) the maximum edge count under
    the cap.
    """
    if r < 0:
        raise ValueError("degree cap must be non-negative")
    rng = make_rng(seed)
    edges = list(g.edges())
    best = None
    for _ in range(3):
        order = list(edges)
        rng.shuffle(order)
        deg = [0] * g.n
        chosen = []
        for u, v in order:
            if deg[u] < r and deg[v] < r:
                deg[u] += 1
                deg[v] += 1
                chosen.append((u, v))
        if best is None or len(chosen) > len(best):
            best = chosen
    h = Graph(g.n, best or [])
    return AdversaryDeletion(h=h, bound=r)


def verify_unbalanced_certificate(g: Graph, deletion: AdversaryDeletion) -> bool:
    """Re-check an unbalanced-bipartite certificate from scratch."""
    cert = deletion.certificate
    if cert is None:
        return False
    if cert.a | cert.b != frozenset(range(g.n)) or cert.a & cert.b:
        return False
    if len(cert.a) == len(cert.b):
        return False
    for u, v in deletion.h.edges():
        if not g.has_edge(u, v):
            return False
    if deletion.h.max_degree() > deletion.bound:
        return False
    remaining = subtract(g, deletion.h)
    for u, v in remaining.edges():
        if (u in cert.a) == (v in cert.a):
            return False
    return True


@dataclass(frozen=True)
class SwitchingConfigurationPlan:
    """A structured multi-edge switch at `u`: the cross edges e_i = (u, v_i)
    and matched independent edges f_i = (x_i, y_i), each f_i at distance at
    least 2 from its e_i. Applying it replaces e_i, f_i by (u, y_i),
    (x_i, v_i) for every i."""

    u: int
    ell: int
    e_edges: tuple
    f_edges: tuple

    def __post_init__(self):
        if len(self.e_edges) != self.ell or len(self.f_edges) != self.ell:
            raise ValueError("need exactly ell e-edges and ell f-edges")
        for (a, _) in self.e_edges:
            if a != self.u:
                raise ValueError("every e-edge must start at u")

    def reoriented(self, bits: int) -> "SwitchingConfigurationPlan":
        """Flip the orientation of f_i for every set bit i."""
        flipped = tuple(
            (y, x) if (bits >> i) & 1 else (x, y)
            for i, (x, y) in enumerate(self.f_edges)
        )
        return SwitchingConfigurationPlan(
            u=self.u, ell=self.ell, e_edges=self.e_edges, f_edges=flipped
        )

    def switch_steps(self) -> list:
        return [
            SwitchPlan.of_labels(self.u, v_i, y_i, x_i)
            for (_, v_i), (x_i, y_i) in zip(self.e_edges, self.f_edges)
        ]


def validate_switching_plan(g: Graph, plan: SwitchingConfigurationPlan) -> bool:
    """Independence and distance conditions, re-checked from scratch."""
    u = plan.u
    f_vertices = set()
    for (x, y) in plan.f_edges:
        if x == y or not g.has_edge(x, y):
            return False
        if x in f_vertices or y in f_vertices:
            return False
        f_vertices.update((x, y))
    for (a, v_i), (x, y) in zip(plan.e_edges, plan.f_edges):
        if a != u or not g.has_edge(u, v_i):
            return False
        for p in (x, y):
            for q in (u, v_i):
                if p == q or g.has_edge(p, q):
                    return False
    return True


def apply_out_switching(g: Graph, plan: SwitchingConfigurationPlan) -> Graph:
    """Apply the plan as a composition of single edge switches."""
    out = g
    for step in plan.switch_steps():
        out = apply_switch(out, step)
    return out


def enumerate_out_switchings(
    g: Graph, cut: CutPartition, u: int, ell: int, limit: int | None = None
):
    """Stream switching plans that move `u` across the cut in cross-degree
    terms: the e_i are all cut edges at u, and the f_i are matched,
    pairwise independent edges spanned by u's own side, each at distance
    at least 2 from its e_i. `ell` is the cross-degree offset, so the plan
    switches floor(d(u)/2) + ell edge pairs. Orientations are emitted in
    the canonical (smaller, larger) form; use `reoriented` for the rest.
    """
    if u not in cut.a:
        raise ValueError("u must lie on the A side of the cut")
    d = g.degree(u)
    count = d // 2 + ell
    cross = tuple(
        (u, w) for w in g.sorted_neighbors(u) if w in cut.b
    )
    if len(cross) != count:
        raise ValueError(
            f"cross degree of u is {len(cross)}, plan needs exactly {count}"
        )
    pool = [
        (x, y)
        for x, y in g.edges()
        if x in cut.a and y in cut.a and x != u and y != u
    ]

    def ok_for(e_idx: int, edge, used_vertices) -> bool:
        x, y = edge
        if x in used_vertices or y in used_vertices:
            return False
        _, v_i = cross[e_idx]
        for p in (x, y):
            for q in (u, v_i):
                if p == q or g.has_edge(p, q):
                    return False
        return True

    emitted = 0
    chosen = []
    used = set()

    def dfs(idx: int):
        nonlocal emitted
        if limit is not None and emitted >= limit:
            return
        if idx == count:
            yield SwitchingConfigurationPlan(
                u=u, ell=count, e_edges=cross, f_edges=tuple(chosen)
            )
            return
        for edge in pool:
            if limit is not None and emitted >= limit:
                return
            if edge in chosen:
                continue
            if ok_for(idx, edge, used):
                chosen.append(edge)
                used.update(edge)
                yield from dfs(idx + 1)
                used.difference_update(edge)
                chosen.pop()

    for plan in dfs(0):
        emitted += 1
        yield plan
        if limit is not None and emitted >= limit:
            return


@dataclass(frozen=True)
class HalfSetDensityReport:
    trials: int
    min_spanned: int
    mean_spanned: float
    below_threshold: int
    threshold: float


def half_set_density_probe(g: Graph, trials: int, seed=0) -> HalfSetDensityReport:
    """Sample floor(n/2)-sets and report how many span at most n/100 edges.

    Low counts are expected for random regular hosts of degree >= 3; the
    probe reports, it never asserts.
    """
    rng = make_rng(seed)
    n = g.n
    size = n // 2
    threshold = n / 100
    total = 0
    minimum = None
    below = 0
    for _ in range(trials):
        s = rng.sample(range(n), size)
        spanned = edge_count_between(g, s, s)
        total += spanned
        minimum = spanned if minimum is None else min(minimum, spanned)
        if spanned <= threshold:
            below += 1
    return HalfSetDensityReport(
        trials=trials,
        min_spanned=minimum if minimum is not None else 0,
        mean_spanned=total / trials if trials else 0.0,
        below_threshold=below,
        threshold=threshold,
    )
