"""Vertex-expansion verdicts and the thinning pipeline that extracts a
sparse connected expander subgraph from a host graph.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

from .graphs import Graph, connected_components, is_connected, neighborhood
from .rng import make_rng, spawn

CERTIFIED_EXACT = "certified_exact"
NO_COUNTEREXAMPLE = "no_counterexample_found"
COUNTEREXAMPLE = "counterexample"


class DisconnectedHost(ValueError):
    """The ambient graph is disconnected where connectivity is required."""


class PatchBudgetExceeded(RuntimeError):
    """More connecting edges would be needed than the budget allows."""


@dataclass(frozen=True)
class ExpansionParams:
    """Expansion requirement: |N(S)| >= ratio * |S| for every vertex set S
    with |S| <= fraction * n, plus connectivity."""

    ratio: float = 3.0
    fraction: float = 1 / 400
    mode: str = "exact"
    budget: int = 2000

    def __post_init__(self):
        if self.ratio <= 0:
            raise ValueError("ratio must be positive")
        if not 0 < self.fraction <= 1:
            raise ValueError("fraction must lie in (0, 1]")
        if self.mode not in ("exact", "randomized"):
            raise ValueError("mode must be 'exact' or 'randomized'")
        if self.budget < 0:
            raise ValueError("budget must be non-negative")

    def max_set_size(self, n: int) -> int:
        return int(self.fraction * n)


@dataclass(frozen=True)
class ExpanderVerdict:
    status: str
    witness: frozenset | None = None
    sets_tested: int = 0
    connectivity_failure: bool = False

    @property
    def ok(self) -> bool:
        return self.status != COUNTEREXAMPLE


def check_three_expander(g: Graph, params: ExpansionParams, seed=0) -> ExpanderVerdict:
    """Decide (or probe) the expansion property of `g`.

    Exact mode enumerates every candidate set up to the size cap, so it is
    feasible only when that cap is tiny; randomized mode samples random and
    greedily grown sets within `params.budget` evaluations and can only
    report a counterexample or the absence of one among the tested sets.
    A disconnected graph yields a component-based counterexample flagged as
    a connectivity failure.
    """
    n = g.n
    if n > 0 and not is_connected(g):
        comp = min(connected_components(g), key=len)
        return ExpanderVerdict(
            status=COUNTEREXAMPLE,
            witness=frozenset(comp),
            sets_tested=0,
            connectivity_failure=True,
        )
    k = params.max_set_size(n)
    if params.mode == "exact":
        tested = 0
        for size in range(1, k + 1):
            for subset in combinations(range(n), size):
                tested += 1
                if len(neighborhood(g, subset)) < params.ratio * size:
                    return ExpanderVerdict(
                        status=COUNTEREXAMPLE,
                        witness=frozenset(subset),
                        sets_tested=tested,
                    )
        return ExpanderVerdict(status=CERTIFIED_EXACT, sets_tested=tested)

    rng = make_rng(seed)
    tested = 0
    while tested < params.budget and k >= 1:
        size = rng.randint(1, k)
        s = set(rng.sample(range(n), size))
        # Greedy boundary absorption: repeatedly pull a neighbour into S,
        # preferring the vertex that grows N(S) the least.
        while True:
            tested += 1
            nbhd = neighborhood(g, s)
            if len(nbhd) < params.ratio * len(s):
                return ExpanderVerdict(
                    status=COUNTEREXAMPLE, witness=frozenset(s), sets_tested=tested
                )
            if len(s) >= k or tested >= params.budget:
                break
            candidates = sorted(nbhd - s)
            if not candidates:
                break
            best = min(candidates, key=lambda w: (len(g.neighbors(w) - nbhd), w))
            s.add(best)
    return ExpanderVerdict(status=NO_COUNTEREXAMPLE, sets_tested=tested)


@dataclass(frozen=True)
class ThinRetry:
    """Thinning attempt landed outside the per-vertex degree window; the
    kept subgraph is carried along for diagnostics."""

    violations: tuple
    subgraph: Graph


def thin_random_subgraph(gp: Graph, delta_hat: float, d: int, seed):
    """Keep each edge of `gp` independently with probability 4*delta_hat.

    Returns the kept subgraph when every vertex degree lands strictly
    inside (delta_hat*d, 8*delta_hat*d), else a ThinRetry naming the
    offending vertices.
    """
    p = 4 * delta_hat
    if not 0 < p <= 1:
        raise ValueError("need 0 < 4*delta_hat <= 1")
    rng = make_rng(seed)
    kept = Graph(gp.n)
    for u, v in gp.edges():
        if rng.random() < p:
            kept.add_edge(u, v)
    lo, hi = delta_hat * d, 8 * delta_hat * d
    violations = tuple(v for v in range(gp.n) if not lo < kept.degree(v) < hi)
    if violations:
        return ThinRetry(violations, kept)
    return kept


def patch_connectivity(gp: Graph, r: Graph, max_extra: int = 400) -> Graph:
    """Connect the components of `r` using at most `max_extra` edges of `gp`.

    Each added edge is the gp-edge between distinct components minimising
    the larger endpoint degree in the patched graph so far (ties broken
    lexicographically), which protects the maximum-degree budget.
    """
    if gp.n != r.n:
        raise ValueError("vertex counts differ")
    for u, v in r.edges():
        if not gp.has_edge(u, v):
            raise ValueError("r is not a subgraph of the host")
    if not is_connected(gp):
        raise DisconnectedHost("host graph is disconnected")

    comps = connected_components(r)
    if len(comps) - 1 > max_extra:
        raise PatchBudgetExceeded(
            f"need {len(comps) - 1} connecting edges, budget is {max_extra}"
        )
    comp_of = [0] * r.n
    for idx, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = idx

    def find(x, parent):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    parent = list(range(len(comps)))
    out = r.copy()
    remaining = len(comps) - 1
    while remaining > 0:
        best = None
        for u, v in gp.edges():
            cu, cv = find(comp_of[u], parent), find(comp_of[v], parent)
            if cu == cv:
                continue
            key = (max(out.degree(u), out.degree(v)), u, v)
            if best is None or key < best:
                best = key
        if best is None:
            raise DisconnectedHost("host graph is disconnected")
        _, u, v = best
        out.add_edge(u, v)
        parent[find(comp_of[u], parent)] = find(comp_of[v], parent)
        remaining -= 1
    return out


@dataclass
class SparseExpanderResult:
    graph: Graph | None
    attempts: int
    rejections: dict = field(default_factory=dict)
    verdict: ExpanderVerdict | None = None
    failure_stage: str | None = None
    delta_hat_final: float = 0.0

    @property
    def ok(self) -> bool:
        return self.graph is not None


def build_sparse_expander(
    gp: Graph,
    delta: float,
    d: int,
    params: ExpansionParams | None = None,
    max_attempts: int = 50,
    seed=0,
    max_patch: int = 400,
) -> SparseExpanderResult:
    """Extract a spanning, connected, sparse expander subgraph of `gp`.

    Loops {thin at rate 4*delta_hat -> degree window -> connectivity patch
    -> max-degree check -> expansion check} with fresh coins per attempt;
    after each failed attempt the thinning rate decays by 0.9, floored at
    delta/16. Success requires max degree strictly below delta*d.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if delta > 1e-5:
        warnings.warn(
            f"delta={delta} is far above the asymptotic regime; "
            "the degree window may be hard to satisfy",
            stacklevel=2,
        )
    params = params or ExpansionParams()
    rejections = {
        "degree_window": 0,
        "patch_budget": 0,
        "max_degree": 0,
        "expander": 0,
    }
    if not is_connected(gp):
        return SparseExpanderResult(
            graph=None,
            attempts=0,
            rejections=rejections,
            failure_stage="connectivity",
        )
    rng = make_rng(seed)
    delta_hat = delta / 8
    floor = delta / 16
    for attempt in range(1, max_attempts + 1):
        thinned = thin_random_subgraph(gp, delta_hat, d, spawn(rng))
        if isinstance(thinned, ThinRetry):
            rejections["degree_window"] += 1
            # Decay the keep rate only when the window failed from above;
            # decaying on low-degree violations compounds them.
            lows = sum(
                1
                for v in thinned.violations
                if thinned.subgraph.degree(v) <= delta_hat * d
            )
            if len(thinned.violations) - lows > lows:
                delta_hat = max(floor, delta_hat * 0.9)
            continue
        try:
            patched = patch_connectivity(gp, thinned, max_patch)
        except PatchBudgetExceeded:
            rejections["patch_budget"] += 1
            continue
        if patched.max_degree() >= delta * d:
            rejections["max_degree"] += 1
            delta_hat = max(floor, delta_hat * 0.9)
            continue
        verdict = check_three_expander(patched, params, seed=spawn(rng))
        if verdict.status == COUNTEREXAMPLE:
            rejections["expander"] += 1
            continue
        return SparseExpanderResult(
            graph=patched,
            attempts=attempt,
            rejections=rejections,
            verdict=verdict,
            delta_hat_final=delta_hat,
        )
    worst = max(rejections, key=lambda k: rejections[k])
    return SparseExpanderResult(
        graph=None,
        attempts=max_attempts,
        rejections=rejections,
        failure_stage=worst,
        delta_hat_final=delta_hat,
    )


@dataclass(frozen=True)
class DensityProbeReport:
    trials: int
    violations: int
    min_spanned: int
    mean_spanned: float
    threshold_description: str


def sparse_set_density_probe(
    g: Graph, delta: float, d: int, trials: int, seed
) -> DensityProbeReport:
    """Sample vertex sets in the sparse-density size range and report how
    often the spanned-edge count exceeds delta*d*|S|/25.

    Violations are reported, never asserted away: at finite n exceptions
    are possible and simply get counted.
    """
    rng = make_rng(seed)
    n = g.n
    lo = max(1, int(delta * delta * d))
    hi = max(lo, min(n, int(5 * delta * delta * n)))
    from .graphs import edge_count_between

    violations = 0
    minimum = None
    total = 0
    for _ in range(trials):
        size = rng.randint(lo, hi)
        s = rng.sample(range(n), size)
        spanned = edge_count_between(g, s, s)
        total += spanned
        minimum = spanned if minimum is None else min(minimum, spanned)
        if spanned > delta * d * size / 25:
            violations += 1
    return DensityProbeReport(
        trials=trials,
        violations=violations,
        min_spanned=minimum if minimum is not None else 0,
        mean_spanned=total / trials if trials else 0.0,
        threshold_description="e(S) <= delta*d*|S|/25",
    )
