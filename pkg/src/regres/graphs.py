"""Simple graphs, multigraphs, degree sequences, and the edge-counting
primitives shared by the samplers, the expander pipeline, and the solvers.

Vertices are 0-based contiguous integers. Values are mutated only by their
owner; all module-level operations are pure functions of their inputs.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction


class Graph:
    """Simple undirected graph on vertex set {0, ..., n-1}.

    No loops, no parallel edges. Adjacency is kept as per-vertex hash sets;
    algorithmic code that needs a deterministic order iterates sorted views.
    """

    __slots__ = ("n", "_adj", "m")

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        self._adj = [set() for _ in range(n)]
        self.m = 0
        for u, v in edges:
            self.add_edge(u, v)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")

    def add_edge(self, u: int, v: int) -> None:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise ValueError(f"loop at {u} not allowed in a simple graph")
        if v in self._adj[u]:
            raise ValueError(f"parallel edge {{{u},{v}}} not allowed in a simple graph")
        self._adj[u].add(v)
        self._adj[v].add(u)
        self.m += 1

    def remove_edge(self, u: int, v: int) -> None:
        self._check_vertex(u)
        self._check_vertex(v)
        if v not in self._adj[u]:
            raise ValueError(f"edge {{{u},{v}}} not present")
        self._adj[u].discard(v)
        self._adj[v].discard(u)
        self.m -= 1

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        return v in self._adj[u]

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self._adj[v])

    def neighbors(self, v: int) -> frozenset:
        self._check_vertex(v)
        return frozenset(self._adj[v])

    def sorted_neighbors(self, v: int) -> list:
        self._check_vertex(v)
        return sorted(self._adj[v])

    def edges(self):
        """Yield edges as (u, v) with u < v, in sorted order."""
        for u in range(self.n):
            for v in sorted(self._adj[u]):
                if u < v:
                    yield (u, v)

    def edge_set(self) -> frozenset:
        return frozenset((u, v) for u, v in self.edges())

    def degrees(self) -> tuple:
        return tuple(len(self._adj[v]) for v in range(self.n))

    def degree_sequence(self) -> "DegreeSequence":
        return DegreeSequence(self.degrees())

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def min_degree(self) -> int:
        return min((len(a) for a in self._adj), default=0)

    def copy(self) -> "Graph":
        g = Graph(self.n)
        g._adj = [set(a) for a in self._adj]
        g.m = self.m
        return g

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self._adj == other._adj
        )

    def __hash__(self):
        return hash((self.n, self.edge_set()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


class MultiGraph:
    """Undirected multigraph: loops and parallel edges allowed.

    Each loop at v contributes two to the degree of v. Edge multiplicities
    are tracked per unordered pair (u <= v).
    """

    __slots__ = ("n", "_mult", "_deg")

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        self._mult = Counter()
        self._deg = [0] * n
        for u, v in edges:
            self.add_edge(u, v)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")

    @staticmethod
    def _key(u: int, v: int):
        return (u, v) if u <= v else (v, u)

    def add_edge(self, u: int, v: int) -> None:
        self._check_vertex(u)
        self._check_vertex(v)
        self._mult[self._key(u, v)] += 1
        if u == v:
            self._deg[u] += 2
        else:
            self._deg[u] += 1
            self._deg[v] += 1

    def remove_edge(self, u: int, v: int) -> None:
        self._check_vertex(u)
        self._check_vertex(v)
        k = self._key(u, v)
        if self._mult[k] <= 0:
            raise ValueError(f"edge {{{u},{v}}} not present")
        self._mult[k] -= 1
        if self._mult[k] == 0:
            del self._mult[k]
        if u == v:
            self._deg[u] -= 2
        else:
            self._deg[u] -= 1
            self._deg[v] -= 1

    def multiplicity(self, u: int, v: int) -> int:
        self._check_vertex(u)
        self._check_vertex(v)
        return self._mult.get(self._key(u, v), 0)

    def has_edge(self, u: int, v: int) -> bool:
        return self.multiplicity(u, v) > 0

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return self._deg[v]

    @property
    def m(self) -> int:
        """Total edge count, with multiplicity (each loop counts once)."""
        return sum(self._mult.values())

    def edges(self):
        """Yield each edge once per multiplicity, (u, v) with u <= v, sorted."""
        for (u, v) in sorted(self._mult):
            for _ in range(self._mult[(u, v)]):
                yield (u, v)

    def support(self):
        """Distinct edges, sorted."""
        return sorted(self._mult)

    def edge_multiset(self) -> Counter:
        return Counter(self._mult)

    def degrees(self) -> tuple:
        return tuple(self._deg)

    def degree_sequence(self) -> "DegreeSequence":
        return DegreeSequence(self.degrees())

    def is_simple(self) -> bool:
        """No loops and no parallel edges."""
        for (u, v), k in self._mult.items():
            if u == v or k > 1:
                return False
        return True

    def to_graph(self) -> Graph:
        if not self.is_simple():
            raise ValueError("multigraph has loops or parallel edges")
        return Graph(self.n, self.support())

    def copy(self) -> "MultiGraph":
        g = MultiGraph(self.n)
        g._mult = Counter(self._mult)
        g._deg = list(self._deg)
        return g

    def __eq__(self, other):
        return (
            isinstance(other, MultiGraph)
            and self.n == other.n
            and self._mult == other._mult
        )

    def __repr__(self):
        return f"MultiGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class DegreeSequence:
    """A vector of prescribed vertex degrees."""

    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if any(d < 0 for d in self.degrees):
            raise ValueError("degrees must be non-negative")

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def total(self) -> int:
        return sum(self.degrees)

    def is_even(self) -> bool:
        return self.total % 2 == 0

    @classmethod
    def regular(cls, n: int, d: int) -> "DegreeSequence":
        return cls((d,) * n)


def _require_same_n(g1, g2):
    if g1.n != g2.n:
        raise ValueError(f"vertex counts differ: {g1.n} vs {g2.n}")


def edge_count_between(g, a, b) -> int:
    """Number of edges of `g` with one endpoint in `a` and one in `b`.

    An edge lying inside the intersection is counted once. With a == b this
    is the number of edges spanned by the set. Works for Graph and
    MultiGraph (with multiplicity).
    """
    a = frozenset(a)
    b = frozenset(b)
    for v in a | b:
        if not 0 <= v < g.n:
            raise IndexError(f"vertex {v} out of range [0, {g.n})")
    count = 0
    if isinstance(g, MultiGraph):
        for (u, v), k in g._mult.items():
            if (u in a and v in b) or (u in b and v in a):
                count += k
        return count
    for u, v in g.edges():
        if (u in a and v in b) or (u in b and v in a):
            count += 1
    return count


def subtract(g: Graph, h: Graph) -> Graph:
    """Edge-set difference of two simple graphs on the same vertex set."""
    _require_same_n(g, h)
    out = Graph(g.n)
    for u, v in g.edges():
        if not h.has_edge(u, v):
            out.add_edge(u, v)
    return out


def union(g1, g2):
    """Edge union on a common vertex set.

    Graphs take the set union (never creating parallels); multigraphs take
    the multiset union, adding multiplicities.
    """
    _require_same_n(g1, g2)
    if isinstance(g1, MultiGraph) or isinstance(g2, MultiGraph):
        if not (isinstance(g1, MultiGraph) and isinstance(g2, MultiGraph)):
            raise TypeError("union requires both operands of the same kind")
        out = g1.copy()
        for u, v in g2.edges():
            out.add_edge(u, v)
        return out
    out = g1.copy()
    for u, v in g2.edges():
        if not out.has_edge(u, v):
            out.add_edge(u, v)
    return out


def is_in_H_alpha(g: Graph, h: Graph, alpha) -> bool:
    """True iff `h` is a spanning subgraph of `g` with d_h(v) <= alpha*d_g(v).

    `alpha` may be a float or a Fraction; floats are snapped to the nearest
    small rational so that boundary cases like alpha=1/3 compare exactly.
    """
    _require_same_n(g, h)
    frac = alpha if isinstance(alpha, Fraction) else Fraction(alpha).limit_denominator(10**9)
    for u, v in h.edges():
        if not g.has_edge(u, v):
            return False
    for v in range(g.n):
        if h.degree(v) > frac * g.degree(v):
            return False
    return True


def connected_components(g) -> list:
    """Components as sorted vertex lists, ordered by smallest member."""
    if isinstance(g, MultiGraph):
        adj = [set() for _ in range(g.n)]
        for u, v in g.support():
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
    else:
        adj = g._adj
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = []
        queue = deque([s])
        seen[s] = True
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g) -> bool:
    if g.n == 0:
        return True
    return len(connected_components(g)) == 1


def neighborhood(g: Graph, s) -> frozenset:
    """Union of the neighbor sets of the vertices of `s` (may meet `s`)."""
    out = set()
    for v in s:
        out |= g._adj[v]
    return frozenset(out)


def two_coloring(g: Graph):
    """A proper 2-colouring as a 0/1 list, or None if not bipartite."""
    color = [-1] * g.n
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g._adj[v]:
                if color[w] < 0:
                    color[w] = 1 - color[v]
                    stack.append(w)
                elif color[w] == color[v]:
                    return None
    return color


def write_edgelist(g, path) -> None:
    """Line-oriented edge list: header `n m` (plus `multi` token for
    multigraphs), then one `u v` pair per line, 0-based."""
    lines = []
    if isinstance(g, MultiGraph):
        lines.append(f"{g.n} {g.m} multi")
    else:
        lines.append(f"{g.n} {g.m}")
    for u, v in g.edges():
        lines.append(f"{u} {v}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_edgelist(path):
    """Parse the edge list format written by `write_edgelist`.

    Returns a Graph, or a MultiGraph when the header carries the `multi`
    token. Loops and parallels in a plain graph file are an error.
    """
    with open(path) as fh:
        tokens = fh.readline().split()
        if len(tokens) not in (2, 3):
            raise ValueError("bad header, expected 'n m' or 'n m multi'")
        n, m = int(tokens[0]), int(tokens[1])
        multi = len(tokens) == 3
        if multi and tokens[2] != "multi":
            raise ValueError(f"unknown header token {tokens[2]!r}")
        g = MultiGraph(n) if multi else Graph(n)
        count = 0
        for line in fh:
            line = line.strip()
            if not line:
                continue
            u, v = map(int, line.split())
            g.add_edge(u, v)
            count += 1
        if count != m:
            raise ValueError(f"header promised {m} edges, file has {count}")
    return g
