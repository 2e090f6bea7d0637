"""Rotation-extension machinery for long paths and Hamilton cycles:
the rotation engine, exact small-instance oracles, booster-pair
construction, and the iterative edge-augmentation loop that upgrades a
sparse connected expander into a Hamilton cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expander import ExpansionParams, SparseExpanderResult, build_sparse_expander
from .graphs import Graph, is_connected, two_coloring
from .rng import make_rng, spawn


class NotPathEndpoint(ValueError):
    """The requested vertex cannot be made an endpoint of a maximal path."""


@dataclass(frozen=True)
class Path:
    """An oriented simple path; the orientation runs first -> last."""

    vertices: tuple

    __slots__ = ("vertices", "_pos")

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("path vertices must be distinct")
        if not self.vertices:
            raise ValueError("path must be non-empty")
        object.__setattr__(self, "_pos", {v: i for i, v in enumerate(self.vertices)})

    @property
    def first(self) -> int:
        return self.vertices[0]

    @property
    def last(self) -> int:
        return self.vertices[-1]

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self._pos

    def index(self, v: int) -> int:
        return self._pos[v]

    def successor(self, v: int) -> int:
        i = self._pos[v]
        if i == len(self.vertices) - 1:
            raise ValueError(f"{v} is the final vertex and has no successor")
        return self.vertices[i + 1]

    def reversed(self) -> "Path":
        return Path(tuple(reversed(self.vertices)))

    def check_in(self, g: Graph) -> bool:
        return all(g.has_edge(u, v) for u, v in zip(self.vertices, self.vertices[1:]))


def rotate(host: Graph, path: Path, pivot) -> Path:
    """Rotate `path` around a chord from its last vertex to an interior
    vertex, keeping the vertex set and the first endpoint."""
    a, b = pivot
    last = path.last
    if a == last:
        x = b
    elif b == last:
        x = a
    else:
        raise ValueError("pivot must be incident to the moving endpoint")
    if x not in path:
        raise ValueError("pivot endpoint is not on the path")
    if x == path.first:
        raise ValueError("pivot endpoint must be interior to the path")
    if not host.has_edge(last, x):
        raise ValueError("pivot is not an edge of the host graph")
    i = path.index(x)
    verts = path.vertices
    return Path(verts[: i + 1] + tuple(reversed(verts[i + 1 :])))


@dataclass
class RotationState:
    """Closure of single rotations from a path with one endpoint held fixed."""

    fixed_endpoint: int
    root: Path
    endpoint_set: frozenset
    parent: dict
    _paths: dict

    def path_to(self, endpoint: int) -> Path:
        if endpoint not in self._paths:
            raise KeyError(f"{endpoint} is not a reachable endpoint")
        return Path(self._paths[endpoint])


def rotation_closure(
    host: Graph, path: Path, fixed: int, max_endpoints: int | None = None
) -> RotationState:
    """Breadth-first closure of single rotations with `fixed` held in place.

    Every discovered endpoint carries a reconstructable path on the same
    vertex set. Each endpoint is processed once, from one representative
    path, with neighbours scanned in sorted order, so the closure is a
    deterministic function of (host, path, fixed).
    """
    if path.first == fixed:
        oriented = path
    elif path.last == fixed:
        oriented = path.reversed()
    else:
        raise ValueError(f"{fixed} is not an endpoint of the path")
    root_end = oriented.last
    paths = {root_end: oriented.vertices}
    parent = {root_end: None}
    queue = [root_end]
    head = 0
    full = max_endpoints is not None and len(paths) >= max_endpoints
    while head < len(queue) and not full:
        a = queue[head]
        head += 1
        pv = paths[a]
        pos = {v: i for i, v in enumerate(pv)}
        k = len(pv) - 1
        for x in host.sorted_neighbors(a):
            i = pos.get(x)
            # Skip off-path neighbours, the fixed endpoint (a closing
            # chord, not a rotation), and the degenerate predecessor pivot.
            if i is None or i == 0 or i >= k - 1:
                continue
            new_end = pv[i + 1]
            if new_end in parent:
                continue
            parent[new_end] = (a, x)
            paths[new_end] = pv[: i + 1] + tuple(reversed(pv[i + 1 :]))
            queue.append(new_end)
            if max_endpoints is not None and len(paths) >= max_endpoints:
                full = True
                break
    return RotationState(
        fixed_endpoint=fixed,
        root=oriented,
        endpoint_set=frozenset(paths),
        parent=parent,
        _paths=paths,
    )


def is_hamilton_cycle(g: Graph, cycle) -> bool:
    """Check a claimed Hamilton cycle edge by edge."""
    cycle = tuple(cycle)
    if len(cycle) != g.n or g.n < 3:
        return False
    if len(set(cycle)) != g.n:
        return False
    return all(g.has_edge(cycle[i], cycle[(i + 1) % g.n]) for i in range(g.n))


# ---------------------------------------------------------------------------
# Exact small-instance oracles (bitmask dynamic programming).


def _adj_masks(g: Graph) -> list:
    masks = [0] * g.n
    for u, v in g.edges():
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def _extend_layer(layer: dict, adj: list) -> dict:
    nxt = {}
    for mask, ends in layer.items():
        e = ends
        while e:
            vbit = e & -e
            e ^= vbit
            ext = adj[vbit.bit_length() - 1] & ~mask
            while ext:
                ubit = ext & -ext
                ext ^= ubit
                key = mask | ubit
                nxt[key] = nxt.get(key, 0) | ubit
    return nxt


def exact_hamiltonian(g: Graph, limit: int = 20) -> bool:
    """Exact Hamiltonicity decision for up to `limit` vertices."""
    n = g.n
    if n > limit:
        raise ValueError(f"exact oracle limited to {limit} vertices, got {n}")
    if n < 3:
        return False
    if g.min_degree() < 2 or not is_connected(g):
        return False
    color = two_coloring(g)
    if color is not None and 2 * sum(color) != n:
        # An unbalanced bipartition admits no spanning cycle.
        return False
    adj = _adj_masks(g)
    layer = {1: 1}
    for _ in range(n - 1):
        layer = _extend_layer(layer, adj)
        if not layer:
            return False
    return bool(layer.get((1 << n) - 1, 0) & adj[0])


def exact_longest_path(g: Graph, limit: int = 20) -> int:
    """Number of vertices on a longest path, by exhaustive subset DP."""
    n = g.n
    if n > limit:
        raise ValueError(f"exact oracle limited to {limit} vertices, got {n}")
    if n == 0:
        return 0
    adj = _adj_masks(g)
    layer = {1 << v: 1 << v for v in range(n)}
    best = 1
    while True:
        layer = _extend_layer(layer, adj)
        if not layer:
            return best
        best += 1


def is_booster(h: Graph, edges, oracle_limit: int = 20) -> bool:
    """Exact check that adding `edges` (one or two vertex pairs) lengthens
    the longest path or completes a Hamilton cycle.

    A host that is already Hamiltonian is terminal: nothing boosts it.
    """
    if h.n > oracle_limit:
        raise ValueError(f"exact oracle limited to {oracle_limit} vertices")
    edges = [tuple(e) for e in edges]
    if not 1 <= len(edges) <= 2:
        raise ValueError("a booster candidate has one or two edges")
    if exact_hamiltonian(h, oracle_limit):
        return False
    augmented = h.copy()
    for u, v in edges:
        if u != v and not augmented.has_edge(u, v):
            augmented.add_edge(u, v)
    if exact_hamiltonian(augmented, oracle_limit):
        return True
    return exact_longest_path(augmented, oracle_limit) > exact_longest_path(
        h, oracle_limit
    )


# ---------------------------------------------------------------------------
# Rotation-extension engine.


class _PathSearch:
    """One rotation-extension attempt on a host graph.

    Grows a path greedily, rotates when stuck, reopens non-spanning cycles
    at a vertex with an outside neighbour, and periodically attempts a
    systematic closure once the path spans the graph.
    """

    def __init__(self, g: Graph, rng):
        self.g = g
        self.n = g.n
        self.adj = [g.neighbors(v) for v in range(g.n)]
        self.rng = rng
        self.path = []
        self.pos = [-1] * g.n
        self.rotations = 0

    def _append(self, v):
        self.pos[v] = len(self.path)
        self.path.append(v)

    def _reverse(self):
        self.path.reverse()
        for i, v in enumerate(self.path):
            self.pos[v] = i

    def _extend_last(self) -> bool:
        grew = False
        while True:
            cands = sorted(w for w in self.adj[self.path[-1]] if self.pos[w] < 0)
            if not cands:
                return grew
            self._append(self.rng.choice(cands))
            grew = True

    def _make_maximal(self):
        while True:
            self._extend_last()
            first = self.path[0]
            if any(self.pos[w] < 0 for w in self.adj[first]):
                self._reverse()
                continue
            return

    def _rotate_random(self) -> bool:
        last = self.path[-1]
        k = len(self.path) - 1
        chords = sorted(w for w in self.adj[last] if 0 < self.pos[w] < k - 1)
        if not chords:
            return False
        x = self.rng.choice(chords)
        i = self.pos[x]
        tail = self.path[i + 1 :]
        tail.reverse()
        self.path[i + 1 :] = tail
        for j in range(i + 1, len(self.path)):
            self.pos[self.path[j]] = j
        self.rotations += 1
        return True

    def _reopen_cycle(self) -> bool:
        """If the current path closes into a non-spanning cycle, reopen it
        at a vertex that has an unvisited neighbour, then extend."""
        first, last = self.path[0], self.path[-1]
        if first not in self.adj[last]:
            return False
        for j, c in enumerate(self.path):
            w = next((x for x in sorted(self.adj[c]) if self.pos[x] < 0), None)
            if w is None:
                continue
            self.path = self.path[j + 1 :] + self.path[: j + 1]
            for i, v in enumerate(self.path):
                self.pos[v] = i
            self._append(w)
            return True
        return False

    def _close_spanning(self):
        """Try to close a spanning path into a cycle via the rotation
        closure of either endpoint."""
        if self.path[0] in self.adj[self.path[-1]]:
            return list(self.path)
        for _ in range(2):
            state = rotation_closure(
                self.g, Path(tuple(self.path)), self.path[0], max_endpoints=128
            )
            for a in sorted(state.endpoint_set):
                if self.path[0] in self.adj[a]:
                    return list(state.path_to(a).vertices)
            self._reverse()
        return None

    def run(self, start: int, rotation_budget: int):
        """Returns (cycle | None, best path found)."""
        self.path = []
        self.pos = [-1] * self.n
        self.rotations = 0
        self._append(start)
        self._make_maximal()
        best = list(self.path)
        close_attempts = 0
        next_close_at = 0
        while self.rotations <= rotation_budget:
            if len(self.path) == self.n:
                if self.path[0] in self.adj[self.path[-1]]:
                    return list(self.path), self.path
                if self.rotations >= next_close_at:
                    cyc = self._close_spanning()
                    if cyc is not None:
                        return cyc, self.path
                    close_attempts += 1
                    next_close_at = self.rotations + 32 * (2**close_attempts)
            elif self._reopen_cycle():
                self._make_maximal()
                if len(self.path) > len(best):
                    best = list(self.path)
                continue
            if not self._rotate_random():
                # The moving endpoint has no chords; try the other end.
                self._reverse()
                if not self._rotate_random():
                    break
            if self._extend_last():
                self._make_maximal()
            if len(self.path) > len(best):
                best = list(self.path)
        return None, best


def _probe(g: Graph, seed, restarts: int, rotation_budget: int):
    """Multi-restart engine run; returns (cycle | None, best path list)."""
    rng = make_rng(seed)
    best = []
    if g.n == 0:
        return None, best
    search = _PathSearch(g, rng)
    starts = list(range(g.n))
    rng.shuffle(starts)
    for r in range(max(1, restarts)):
        start = starts[r % len(starts)]
        cycle, path = search.run(start, rotation_budget)
        if cycle is not None:
            return cycle, path
        if len(path) > len(best):
            best = path
    return None, best


@dataclass
class SolverResult:
    cycle: tuple | None
    best_path_length: int
    rotations_used: int
    restarts: int

    @property
    def ok(self) -> bool:
        return self.cycle is not None


def rotation_extension_solver(g: Graph, budget: int | None = None, seed=0) -> SolverResult:
    """Classical rotation-extension heuristic run directly on `g`.

    `budget` caps the total number of rotations across restarts. Returns a
    certified Hamilton cycle or a failure value; failure is an outcome,
    not an error.
    """
    n = g.n
    if budget is None:
        budget = 40 * n + 400
    rng = make_rng(seed)
    if n == 0:
        return SolverResult(None, 0, 0, 0)
    search = _PathSearch(g, rng)
    starts = list(range(n))
    rng.shuffle(starts)
    used = 0
    restarts = 0
    stalled = 0
    best_len = 0
    per_attempt = max(4 * n, 64)
    while used < budget and stalled < n:
        start = starts[restarts % n]
        cycle, path = search.run(start, min(per_attempt, budget - used))
        used += search.rotations
        restarts += 1
        best_len = max(best_len, len(path))
        if cycle is not None:
            if not is_hamilton_cycle(g, cycle):
                raise RuntimeError("engine produced an invalid cycle")
            return SolverResult(tuple(cycle), n, used, restarts)
        if search.rotations == 0:
            # No rotation was even possible; only fresh starts remain.
            stalled += 1
        else:
            stalled = 0
    return SolverResult(None, best_len, used, restarts)


# ---------------------------------------------------------------------------
# Booster construction.


def _norm_edge(e):
    u, v = e
    if u == v:
        raise ValueError("loops cannot be booster edges")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Booster:
    """One or two candidate edges whose addition lengthens a longest path
    or closes a Hamilton cycle."""

    edges: tuple
    kind: str
    primary: tuple | None = None
    secondary: tuple | None = None

    @classmethod
    def single(cls, edge) -> "Booster":
        return cls(edges=(_norm_edge(edge),), kind="single")

    @classmethod
    def pair(cls, primary, secondary) -> "Booster":
        p, s = _norm_edge(primary), _norm_edge(secondary)
        return cls(edges=(p, s), kind="pair", primary=p, secondary=s)


def _path_with_endpoint(r: Graph, v: int, seed, restarts: int, rotation_budget: int):
    """Find a maximal path of `r` with `v` as an endpoint, or a Hamilton
    cycle. Returns (cycle, None) when the engine closes a cycle, else
    (None, path) oriented so that `v` comes first."""
    rng = make_rng(seed)
    cycle, best = _probe(r, rng, restarts, rotation_budget)
    if cycle is not None:
        return cycle, None
    path = Path(tuple(best))
    if path.first == v:
        return None, path
    if path.last == v:
        return None, path.reversed()
    for anchor in (path.first, path.last):
        state = rotation_closure(r, path, anchor)
        if v in state.endpoint_set:
            return None, state.path_to(v).reversed()
    # Dedicated attempts from v itself; only paths matching the best known
    # length are acceptable, a shorter path would undermine the booster
    # guarantee.
    search = _PathSearch(r, rng)
    for _ in range(max(2, restarts)):
        cyc, p = search.run(v, rotation_budget)
        if cyc is not None:
            return cyc, None
        if len(p) >= len(path):
            candidate = Path(tuple(p))
            if candidate.first == v:
                return None, candidate
            if candidate.last == v:
                return None, candidate.reversed()
            for anchor in (candidate.first, candidate.last):
                state = rotation_closure(r, candidate, anchor)
                if v in state.endpoint_set:
                    return None, state.path_to(v).reversed()
    raise NotPathEndpoint(f"vertex {v} was not reachable as a maximal-path endpoint")


def find_booster_pairs(
    r: Graph,
    gp: Graph,
    s,
    v: int,
    seed=0,
    max_anchors: int | None = None,
    limit: int | None = None,
    restarts: int | None = None,
    rotation_budget: int | None = None,
) -> list:
    """Construct booster pairs {uv, e} for `r`, using rotations inside `r`
    and candidate edges drawn from `gp`.

    Starting from a maximal path ending at `v`, every rotation endpoint `a`
    outside `s` yields an alternative path from `v` to `a`. A gp-edge from
    `a` back to an interior vertex `b` lets the path be rotated to end at
    the successor `u` of `b`, so {uv, ab} closes a cycle on the path's
    vertex set; a gp-edge from `a` to a vertex off the path extends it
    outright. Emitted pairs have both edges in `gp` but not `r`, and no
    endpoint in `s`. An already-Hamiltonian `r` returns an empty list.
    Secondary candidates are ranked by their larger endpoint degree in `r`.
    """
    if r.n != gp.n:
        raise ValueError("vertex counts differ")
    if not is_connected(r):
        raise ValueError("booster construction needs a connected graph")
    avoid = frozenset(s)
    if v in avoid:
        raise ValueError("the fixed endpoint must avoid the saturated set")
    n = r.n
    if max_anchors is None:
        # Anchors are blocked as candidate endpoints downstream, so the
        # anchor set must stay small relative to n.
        max_anchors = max(3, min(48, n // 12))
    if restarts is None:
        restarts = 8 if n > 64 else 3 * max(1, n // 2)
    if rotation_budget is None:
        rotation_budget = 4 * n if n > 64 else n * n
    cycle, path = _path_with_endpoint(r, v, seed, restarts, rotation_budget)
    if cycle is not None:
        return []
    return _pairs_from_path(r, gp, avoid, v, path, max_anchors, limit)


def _pairs_from_path(r, gp, avoid, v, path, max_anchors, limit, state=None):
    """Core pair construction from a concrete path oriented v-first."""
    n = r.n
    if state is None:
        state = rotation_closure(r, path, v, max_endpoints=max_anchors + 1)
    anchors = sorted(a for a in state.endpoint_set if a not in avoid)[:max_anchors]
    on_path = set(path.vertices)
    blocked = avoid | set(anchors) | {v}

    # Secondary candidates keyed by the endpoint u that the rotated (or
    # extended) path would reach.
    secondaries: dict = {}
    for a in anchors:
        pa = state.path_to(a).vertices
        for i in range(len(pa) - 1):
            b, u = pa[i], pa[i + 1]
            if b in blocked or u in blocked:
                continue
            if r.has_edge(a, b) or not gp.has_edge(a, b):
                continue
            secondaries.setdefault(u, set()).add(_norm_edge((a, b)))
    for u in range(n):
        if u in on_path or u in blocked:
            continue
        for a in anchors:
            if r.has_edge(a, u) or not gp.has_edge(a, u):
                continue
            secondaries.setdefault(u, set()).add(_norm_edge((a, u)))

    out = []
    for u in sorted(secondaries):
        if not gp.has_edge(u, v) or r.has_edge(u, v):
            continue
        ranked = sorted(
            secondaries[u], key=lambda e: (max(r.degree(e[0]), r.degree(e[1])), e)
        )
        for e in ranked:
            out.append(Booster.pair((u, v), e))
            if limit is not None and len(out) >= limit:
                return out
    return out


# ---------------------------------------------------------------------------
# Iterative booster augmentation.


@dataclass
class IterationRecord:
    index: int
    path_length: int
    saturated_size: int
    added: tuple | None
    max_degree_after: int
    added_touches_saturated: bool = False


@dataclass
class BoosterRun:
    cycle: tuple | None
    iterations: int
    history: list = field(default_factory=list)
    failure_stage: str | None = None
    diagnostics: dict = field(default_factory=dict)
    expander: SparseExpanderResult | None = None

    @property
    def ok(self) -> bool:
        return self.cycle is not None


def _trace_two_regular_cycle(g: Graph):
    start = 0
    cycle = [start]
    prev, cur = None, start
    while True:
        nbrs = g.sorted_neighbors(cur)
        nxt = nbrs[0] if nbrs[0] != prev else nbrs[1]
        if nxt == start:
            return cycle
        cycle.append(nxt)
        prev, cur = cur, nxt


def booster_iteration(
    gp: Graph,
    delta: float,
    d: int,
    params: ExpansionParams | None = None,
    seed=0,
    max_expander_attempts: int = 50,
    max_iterations: int | None = None,
    engine_restarts: int = 4,
    pair_limit: int = 24,
    max_anchors: int | None = None,
) -> BoosterRun:
    """Grow a Hamilton cycle inside `gp` by repeated booster-pair addition.

    Starts from a sparse connected expander subgraph, then alternates
    {certify / search booster pairs avoiding the saturated vertex set /
    add both edges} for at most n rounds. The maximum degree stays at or
    below 2*delta*d throughout, enforced directly on every addition.
    Failure values carry the stuck stage and diagnostics.
    """
    n = gp.n
    rng = make_rng(seed)
    if max_anchors is None:
        max_anchors = max(3, min(48, n // 12))
    if n >= 3 and gp.m == n and gp.max_degree() == 2 and is_connected(gp):
        cycle = _trace_two_regular_cycle(gp)
        if is_hamilton_cycle(gp, cycle):
            return BoosterRun(cycle=tuple(cycle), iterations=0)

    build = build_sparse_expander(
        gp, delta, d, params, max_attempts=max_expander_attempts, seed=spawn(rng)
    )
    if not build.ok:
        return BoosterRun(
            cycle=None,
            iterations=0,
            failure_stage=f"expander:{build.failure_stage}",
            diagnostics={"expander_rejections": build.rejections},
            expander=build,
        )
    r = build.graph.copy()
    cap = 2 * delta * d
    if max_iterations is None:
        max_iterations = n
    history = []
    rot_budget = 4 * n if n > 64 else max(64, n * n // 2)

    for i in range(1, max_iterations + 1):
        cycle, best = _probe(r, spawn(rng), engine_restarts, rot_budget)
        if cycle is not None:
            if not is_hamilton_cycle(r, cycle):
                raise RuntimeError("engine produced an invalid cycle")
            return BoosterRun(
                cycle=tuple(cycle), iterations=i - 1, history=history, expander=build
            )
        saturated = frozenset(x for x in range(n) if r.degree(x) >= cap - 1)
        path = Path(tuple(best))

        # Endpoint candidates for the primary edge, each with a concrete
        # path oriented away from it, ranked by rotation-closure size.
        candidates = []
        if path.first not in saturated:
            candidates.append((path.first, path))
        if path.last not in saturated:
            candidates.append((path.last, path.reversed()))
        side = rotation_closure(r, path, path.last, max_endpoints=16)
        for a in sorted(side.endpoint_set - {path.first}):
            if a not in saturated:
                candidates.append((a, side.path_to(a).reversed()))
        ranked = []
        for cand, pv in candidates[:10]:
            state = rotation_closure(r, pv, cand, max_endpoints=max_anchors + 1)
            ranked.append((-len(state.endpoint_set), cand, pv, state))
        ranked.sort(key=lambda t: (t[0], t[1]))

        chosen = None
        for _, vtx, pv, state in ranked:
            pairs = _pairs_from_path(
                r, gp, saturated, vtx, pv, max_anchors, pair_limit, state=state
            )
            for cand_pair in pairs:
                increments = {}
                for (x, y) in cand_pair.edges:
                    increments[x] = increments.get(x, 0) + 1
                    increments[y] = increments.get(y, 0) + 1
                if all(r.degree(x) + inc <= cap for x, inc in increments.items()):
                    chosen = cand_pair
                    break
            if chosen is not None:
                break
        if chosen is None:
            return BoosterRun(
                cycle=None,
                iterations=i - 1,
                history=history,
                failure_stage="boosters",
                diagnostics={
                    "stuck_iteration": i,
                    "path_length": len(path),
                    "saturated_size": len(saturated),
                    "endpoint_candidates": [t[1] for t in ranked],
                },
                expander=build,
            )
        touches = any(
            x in saturated for edge in chosen.edges for x in edge
        )
        for (x, y) in chosen.edges:
            r.add_edge(x, y)
        if r.max_degree() > cap:
            raise RuntimeError("degree budget violated after booster addition")
        history.append(
            IterationRecord(
                index=i,
                path_length=len(path),
                saturated_size=len(saturated),
                added=chosen.edges,
                max_degree_after=r.max_degree(),
                added_touches_saturated=touches,
            )
        )

    cycle, _ = _probe(r, spawn(rng), engine_restarts, rot_budget)
    if cycle is not None and is_hamilton_cycle(r, cycle):
        return BoosterRun(
            cycle=tuple(cycle),
            iterations=max_iterations,
            history=history,
            expander=build,
        )
    return BoosterRun(
        cycle=None,
        iterations=max_iterations,
        history=history,
        failure_stage="iteration_budget",
        diagnostics={"max_iterations": max_iterations},
        expander=build,
    )
