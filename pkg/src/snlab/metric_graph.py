"""Weighted metric graphs, their compatibility validation, and tripods.

A positively edge-labeled connected simple graph induces a metric by adding
weights along hop-shortest paths, provided two compatibility conditions
hold: equal-hop shortest paths carry equal weight sums, and any path with
more hops than the hop distance is strictly heavier.  Validation checks
both (scoped by a hop budget), and only validated graphs may be turned into
metric spaces.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, UnvalidatedGraphError
from .exact import as_exact
from .spaces import SpaceHandle, discrete_neighborhood


class WeightedGraph:
    """Simple connected graph with positive rational edge weights.

    Immutable after construction apart from the set-once ``validation``
    stamp.  Vertices are kept in a canonical sorted order; all tie-breaking
    in the library refers to that order.
    """

    def __init__(self, edges, id="graph", extra_vertices=(), sort_key=None):
        self.id = id
        adj: dict = {}
        for item in edges:
            u, v, w = item
            if u == v:
                raise PreconditionError(f"loop at vertex {u!r}")
            weight = as_exact(w)
            if weight <= 0:
                raise PreconditionError(f"nonpositive weight on edge {u!r}-{v!r}")
            if v in adj.get(u, {}):
                raise PreconditionError(f"multi-edge {u!r}-{v!r}")
            adj.setdefault(u, {})[v] = weight
            adj.setdefault(v, {})[u] = weight
        for v in extra_vertices:
            adj.setdefault(v, {})
        if not adj:
            raise PreconditionError("graph has no vertices")
        try:
            ordered = sorted(adj)
        except TypeError:
            ordered = sorted(adj, key=str)
        if sort_key is not None:
            ordered = sorted(adj, key=sort_key)
        self.vertices = tuple(ordered)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        self._adj = {v: dict(sorted(nbrs.items(), key=lambda kv: self._index[kv[0]]))
                     for v, nbrs in adj.items()}
        reached = _hop_distances(self._adj, self.vertices[0])
        if len(reached) != len(self.vertices):
            raise PreconditionError(f"graph {id!r} is not connected")
        self.degree_bound = max(len(n) for n in self._adj.values())
        self.validation = None  # set once by validate_metric_graph

    def adjacency(self, v) -> dict:
        return self._adj[v]

    def weight(self, u, v) -> Fraction:
        try:
            return self._adj[u][v]
        except KeyError:
            raise PreconditionError(f"no edge {u!r}-{v!r}") from None

    def has_edge(self, u, v) -> bool:
        return v in self._adj.get(u, {})

    def vertex_key(self, v) -> int:
        return self._index[v]

    @property
    def unit_weights(self) -> bool:
        return all(w == 1 for nbrs in self._adj.values() for w in nbrs.values())

    @property
    def is_tree(self) -> bool:
        m = sum(len(n) for n in self._adj.values()) // 2
        return m == len(self.vertices) - 1

    def edge_list(self):
        out = []
        for u in self.vertices:
            for v, w in self._adj[u].items():
                if self._index[u] < self._index[v]:
                    out.append((u, v, w))
        return out

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"<WeightedGraph {self.id!r} |V|={len(self.vertices)}>"


def _hop_distances(adj, source, limit=None):
    dist = {source: 0}
    frontier = [source]
    hops = 0
    while frontier and (limit is None or hops < limit):
        hops += 1
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = hops
                    nxt.append(v)
        frontier = nxt
    return dist


# -- compatibility validation ------------------------------------------------


@dataclass(frozen=True)
class CompatibilityReport:
    """Outcome of the two path-compatibility checks.

    A failed condition carries two concrete paths exhibiting the violation;
    condition 2 is only certified up to ``hop_budget`` hops.
    """

    condition1_ok: bool
    condition1_witness: tuple | None
    condition2_ok: bool
    condition2_witness: tuple | None
    hop_budget: int
    method: str

    @property
    def passed(self) -> bool:
        return self.condition1_ok and self.condition2_ok


def _weight_extremes(graph: WeightedGraph, source):
    """Min and max weight sums over hop-shortest paths from source,
    with parent pointers for path reconstruction."""
    hop = _hop_distances(graph._adj, source)
    order = sorted(hop, key=lambda v: (hop[v], graph.vertex_key(v)))
    minw = {source: Fraction(0)}
    maxw = {source: Fraction(0)}
    par_min = {source: None}
    par_max = {source: None}
    for v in order:
        if v == source:
            continue
        best = worst = None
        for u, w in graph._adj[v].items():
            if hop.get(u) == hop[v] - 1:
                lo = minw[u] + w
                hi = maxw[u] + w
                if best is None or lo < best[0]:
                    best = (lo, u)
                if worst is None or hi > worst[0]:
                    worst = (hi, u)
        minw[v], par_min[v] = best
        maxw[v], par_max[v] = worst
    return hop, minw, maxw, par_min, par_max


def _climb(parents, v):
    path = [v]
    while parents[path[-1]] is not None:
        path.append(parents[path[-1]])
    return tuple(reversed(path))


def _condition1_pair(graph: WeightedGraph, s, t):
    """(ok, min_path, max_path) for the equal-weight condition on (s, t)."""
    _hop, minw, maxw, par_min, par_max = _weight_extremes(graph, s)
    if minw[t] == maxw[t]:
        return True, None, None
    return False, _climb(par_min, t), _climb(par_max, t)


def _condition2_pair(graph: WeightedGraph, s, t, hop_budget):
    """Search for a simple path s->t longer in hops than the hop distance
    but not strictly heavier than the heaviest hop-shortest path."""
    hop, _minw, maxw, _pm, par_max = _weight_extremes(graph, s)
    target_hops = hop[t]
    budget_weight = maxw[t]

    best = None

    def dfs(v, path, onpath, weight):
        nonlocal best
        if best is not None:
            return
        if v == t:
            if len(path) - 1 > target_hops and weight <= budget_weight:
                best = tuple(path)
            return
        if len(path) - 1 >= hop_budget:
            return
        for u, w in graph._adj[v].items():
            if u in onpath or weight + w > budget_weight:
                continue
            onpath.add(u)
            path.append(u)
            dfs(u, path, onpath, weight + w)
            path.pop()
            onpath.discard(u)

    dfs(s, [s], {s}, Fraction(0))
    if best is None:
        return True, None, None
    return False, _climb(par_max, t), best


def validate_metric_graph(graph: WeightedGraph, hop_budget: int | None = None) -> CompatibilityReport:
    """Check both compatibility conditions, scoped by a simple-path hop budget.

    Trees satisfy both conditions vacuously (unique simple paths), and
    uniform weights make weight sums proportional to hop counts; both
    shortcuts are exact, not approximations.  General graphs get the full
    dynamic-programming check for condition 1 and a pruned simple-path
    search for condition 2.
    """
    hops_needed = max(
        max(_hop_distances(graph._adj, v).values()) for v in graph.vertices
    )
    if hop_budget is None:
        hop_budget = hops_needed + 4
    if hop_budget < hops_needed:
        raise PreconditionError(
            f"hop budget {hop_budget} below the hop diameter {hops_needed}")

    if graph.is_tree:
        report = CompatibilityReport(True, None, True, None, hop_budget, "tree")
    elif graph.unit_weights:
        report = CompatibilityReport(True, None, True, None, hop_budget, "uniform-weights")
    else:
        c1_ok, c1_witness = True, None
        for s in graph.vertices:
            _hop, minw, maxw, par_min, par_max = _weight_extremes(graph, s)
            for t in graph.vertices:
                if t is s:
                    continue
                if minw[t] != maxw[t]:
                    c1_ok = False
                    c1_witness = (_climb(par_min, t), _climb(par_max, t))
                    break
            if not c1_ok:
                break
        c2_ok, c2_witness = True, None
        for s in graph.vertices:
            for t in graph.vertices:
                if t is s:
                    continue
                ok, short_path, long_path = _condition2_pair(graph, s, t, hop_budget)
                if not ok:
                    c2_ok = False
                    c2_witness = (short_path, long_path)
                    break
            if not c2_ok:
                break
        report = CompatibilityReport(c1_ok, c1_witness, c2_ok, c2_witness,
                                     hop_budget, "search")
    graph.validation = report
    return report


# -- the induced metric space -------------------------------------------------


class WeightedGraphSpace(SpaceHandle):
    """The metric space induced by a validated weighted graph."""

    is_finite = True

    def __init__(self, graph: WeightedGraph):
        if graph.validation is None:
            raise UnvalidatedGraphError(
                f"graph {graph.id!r} must pass validate_metric_graph first")
        if not graph.validation.passed:
            raise UnvalidatedGraphError(
                f"graph {graph.id!r} failed compatibility validation")
        self.graph = graph
        self.id = f"metric({graph.id})"
        self.size = len(graph.vertices)
        self.base_point = graph.vertices[0]
        self.unit_graph = graph.unit_weights
        self._dist_cache: dict = {}

    def _from(self, src) -> dict:
        cached = self._dist_cache.get(src)
        if cached is None:
            import heapq

            dist = {}
            heap = [(Fraction(0), 0, src)]
            counter = 0
            while heap:
                d, _, v = heapq.heappop(heap)
                if v in dist:
                    continue
                dist[v] = d
                for u, w in self.graph.adjacency(v).items():
                    if u not in dist:
                        counter += 1
                        heapq.heappush(heap, (d + w, counter, u))
            cached = dist
            self._dist_cache[src] = cached
        return cached

    def distance(self, x, y):
        return self._from(x)[y]

    def neighbors(self, p):
        yield from self.graph.adjacency(p).items()

    def point_key(self, p):
        return self.graph.vertex_key(p)

    def point_label(self, p):
        return str(p)

    def parse_point(self, label):
        for v in self.graph.vertices:
            if str(v) == label:
                return v
        raise PreconditionError(f"unknown vertex {label!r}")


def induced_metric(graph: WeightedGraph) -> WeightedGraphSpace:
    """The metric space whose distances add weights along hop-shortest paths.

    Refuses unvalidated or invalid graphs; under the compatibility
    conditions the weighted shortest-path metric agrees with the weight sum
    along any hop-shortest path.
    """
    return WeightedGraphSpace(graph)


# -- tripods -------------------------------------------------------------------


@dataclass(frozen=True)
class TripodWitness:
    """A center adjacent to three arms with at most one edge among them."""

    center: object
    arms: tuple
    kind: str  # "tripod" or "semi-tripod"
    connections_among_arms: int
    sphere_index: int


def find_tripod(graph: WeightedGraph, root, radius_budget: int) -> TripodWitness | None:
    """Sphere-growth search for a tripod or semi-tripod around root.

    Looks for a vertex in sphere n (n >= 2) adjacent to two vertices of
    sphere n+1 and one of sphere n-1; the outer arms can never connect to
    the inner one, so the four vertices form a (semi-)tripod.  Returns None
    when the budget runs out, which is not a disproof.
    """
    if root not in graph._index:
        raise PreconditionError(f"root {root!r} is not a vertex")
    if radius_budget < 3:
        return None
    hop = _hop_distances(graph._adj, root, limit=radius_budget)
    spheres: dict[int, list] = {}
    for v, d in hop.items():
        spheres.setdefault(d, []).append(v)
    for n in range(2, radius_budget):
        layer = sorted(spheres.get(n, ()), key=graph.vertex_key)
        for v in layer:
            up = sorted((u for u in graph._adj[v] if hop.get(u) == n + 1),
                        key=graph.vertex_key)
            down = sorted((u for u in graph._adj[v] if hop.get(u) == n - 1),
                          key=graph.vertex_key)
            if len(up) >= 2 and down:
                arms = (up[0], up[1], down[0])
                links = sum(
                    1 for i in range(3) for j in range(i + 1, 3)
                    if graph.has_edge(arms[i], arms[j])
                )
                if links > 1:
                    continue  # cannot happen by the sphere argument; guard anyway
                kind = "tripod" if links == 0 else "semi-tripod"
                return TripodWitness(center=v, arms=arms, kind=kind,
                                     connections_among_arms=links, sphere_index=n)
    return None


def verify_tripod_witness(graph: WeightedGraph, witness: TripodWitness) -> bool:
    """Independent check of the tripod/semi-tripod predicate on a witness."""
    v = witness.center
    arms = witness.arms
    if len(arms) != 3 or len(set(arms)) != 3 or v in arms:
        return False
    if not all(graph.has_edge(v, a) for a in arms):
        return False
    links = sum(
        1 for i in range(3) for j in range(i + 1, 3)
        if graph.has_edge(arms[i], arms[j])
    )
    if links != witness.connections_among_arms:
        return False
    if witness.kind == "tripod":
        return links == 0
    if witness.kind == "semi-tripod":
        return links <= 1
    return False


# -- boundaries in both metrics -----------------------------------------------


@dataclass(frozen=True)
class GraphBoundaryResult:
    """dB_k in the induced weighted metric next to cB_k in the hop metric."""

    k: int
    weighted_dn: frozenset
    weighted_db: frozenset
    hop_cn: frozenset
    hop_cb: frozenset
    containment_ok: bool


def graph_boundary(graph: WeightedGraph, A, k: int) -> GraphBoundaryResult:
    """Compute dB_k(A) (weighted metric) and cB_k(A) (hop metric) together.

    For validated graphs the discrete boundary always sits inside the hop
    boundary, which is the computational heart of the tripod theorem.
    """
    base = frozenset(A)
    if not base or not base.issubset(set(graph.vertices)):
        raise PreconditionError("A must be a nonempty vertex subset")
    space = induced_metric(graph)
    weighted = discrete_neighborhood(space, base, k)
    hop_dist = _multi_source_hops(graph, base)
    cn = frozenset(v for v, d in hop_dist.items() if d <= k)
    cb = frozenset(cn - base)
    return GraphBoundaryResult(
        k=k,
        weighted_dn=weighted.dn,
        weighted_db=weighted.db,
        hop_cn=cn,
        hop_cb=cb,
        containment_ok=weighted.db.issubset(cb),
    )


def _multi_source_hops(graph: WeightedGraph, sources):
    dist = {v: 0 for v in sources}
    frontier = list(sources)
    hops = 0
    while frontier:
        hops += 1
        nxt = []
        for u in frontier:
            for v in graph._adj[u]:
                if v not in dist:
                    dist[v] = hops
                    nxt.append(v)
        frontier = nxt
    return dist
