"""Constructors for the concrete spaces used throughout the library.

Every space here satisfies the SpaceHandle contract exactly: rational
distances where closed forms exist (harmonic points, weighted trees,
graphs), lazy point enumeration, canonical point ordering.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .errors import HorizonExceededError, PreconditionError
from .exact import as_exact
from .metric_graph import WeightedGraph
from .spaces import SpaceHandle


# -- harmonic space (partial sums of the harmonic series) -----------------


class HarmonicSpace(SpaceHandle):
    """The set {x_n = 1 + 1/2 + ... + 1/n : n >= 1} with the line metric.

    The canonical example of a locally finite space where small-neighborhood
    witnesses exist while closed 1-neighborhoods always double a set.
    """

    id = "harmonic"
    base_point = 1

    def __init__(self):
        self._h = [Fraction(0), Fraction(1)]  # h[n] = H_n

    def _harmonic(self, n: int) -> Fraction:
        h = self._h
        while len(h) <= n:
            h.append(h[-1] + Fraction(1, len(h)))
        return h[n]

    def distance(self, x, y):
        return abs(self._harmonic(x) - self._harmonic(y))

    def distance_to_set(self, x, A):
        if not A:
            raise PreconditionError("distance to the empty set is undefined")
        hx = self._harmonic(x)
        values = sorted(self._harmonic(a) for a in A)
        return _nearest_on_line(hx, values)

    def initial_level_radius(self, A, m):
        # The m tail points beyond max(A) realize m distinct positive
        # levels, so the radius reaching them is guaranteed to cover the
        # m+1 smallest levels while keeping the region linear in m.
        if m < 1:
            return None
        mx = max(A)
        return self._harmonic(mx + m) - self._harmonic(mx)

    def region_distances(self, seeds, radius):
        mx = max(seeds)
        values = sorted(self._harmonic(a) for a in seeds)
        top = values[-1]
        out = {}
        n = 1
        while True:
            hn = self._harmonic(n)
            if n > mx and hn - top > radius:
                break
            d = _nearest_on_line(hn, values)
            if d <= radius:
                out[n] = d
            n += 1
            if n > self.enumeration_cap:
                raise HorizonExceededError(self.id, radius, self.enumeration_cap)
        return out

    def point_key(self, p):
        return p

    def point_label(self, p):
        return f"x{p}"

    def parse_point(self, label):
        text = label[1:] if label.startswith("x") else label
        n = int(text)
        if n < 1:
            raise PreconditionError("harmonic points are indexed from 1")
        return n


def _nearest_on_line(value, sorted_values):
    import bisect

    i = bisect.bisect_left(sorted_values, value)
    best = None
    for j in (i - 1, i):
        if 0 <= j < len(sorted_values):
            d = abs(value - sorted_values[j])
            if best is None or d < best:
                best = d
    return best


# -- integer lattices ------------------------------------------------------


class IntegerLattice(SpaceHandle):
    """Z^d with the word metric of the 2d standard generators (L1 metric).

    Points are plain integers for d = 1 and integer tuples otherwise.
    """

    def __init__(self, dim: int = 1):
        if dim < 1:
            raise PreconditionError("lattice dimension must be positive")
        self.dim = dim
        self.id = "z" if dim == 1 else f"z{dim}"
        self.base_point = 0 if dim == 1 else (0,) * dim
        self.unit_graph = True

    def distance(self, x, y):
        if self.dim == 1:
            return abs(x - y)
        return sum(abs(a - b) for a, b in zip(x, y))

    def neighbors(self, p):
        if self.dim == 1:
            yield p + 1, 1
            yield p - 1, 1
            return
        for i in range(self.dim):
            for step in (1, -1):
                q = list(p)
                q[i] += step
                yield tuple(q), 1

    def point_key(self, p):
        return p

    def point_label(self, p):
        if self.dim == 1:
            return str(p)
        return "(" + ",".join(str(c) for c in p) + ")"

    def parse_point(self, label):
        text = label.strip().strip("()")
        parts = [s for s in text.split(",") if s.strip() != ""]
        if len(parts) != self.dim:
            raise PreconditionError(f"expected {self.dim} coordinates in {label!r}")
        coords = tuple(int(s) for s in parts)
        return coords[0] if self.dim == 1 else coords


# -- free groups -----------------------------------------------------------

_ALPHA = "abcdefghijklmnopqrstuvwxyz"


def _inv_letter(c: str) -> str:
    return c.swapcase()


class FreeGroupSpace(SpaceHandle):
    """The free group of given rank with its word metric.

    Points are reduced words: lowercase letters are generators, uppercase
    their inverses.  The Cayley graph is the 2*rank regular tree.
    """

    tree_like = True

    def __init__(self, rank: int = 2):
        if not 1 <= rank <= 26:
            raise PreconditionError("free-group rank must be between 1 and 26")
        self.rank = rank
        self.id = f"free-group-{rank}"
        self.base_point = ""
        self.unit_graph = True
        self._letters = _ALPHA[:rank] + _ALPHA[:rank].upper()

    def distance(self, x, y):
        lcp = 0
        for a, b in zip(x, y):
            if a != b:
                break
            lcp += 1
        return len(x) + len(y) - 2 * lcp

    def neighbors(self, p):
        for g in self._letters:
            if p and g == _inv_letter(p[-1]):
                yield p[:-1], 1
            else:
                yield p + g, 1

    def point_key(self, p):
        return (len(p), p)

    def point_label(self, p):
        return p if p else "e"

    def parse_point(self, label):
        word = "" if label in ("e", "") else label
        for i, c in enumerate(word):
            if c not in self._letters:
                raise PreconditionError(f"letter {c!r} outside rank-{self.rank} alphabet")
            if i and word[i - 1] == _inv_letter(c):
                raise PreconditionError(f"word {label!r} is not reduced")
        return word


# -- regular trees ---------------------------------------------------------


class RegularTreeSpace(SpaceHandle):
    """The d-regular infinite tree with unit edges.

    Points are root paths: the root has d children, every other vertex has
    d-1 children and one parent.
    """

    tree_like = True

    def __init__(self, degree: int = 3):
        if degree < 2:
            raise PreconditionError("tree degree must be at least 2")
        self.degree = degree
        self.id = f"tree-{degree}"
        self.base_point = ()
        self.unit_graph = True

    def distance(self, x, y):
        lcp = 0
        for a, b in zip(x, y):
            if a != b:
                break
            lcp += 1
        return len(x) + len(y) - 2 * lcp

    def _branching(self, p) -> int:
        return self.degree if not p else self.degree - 1

    def neighbors(self, p):
        if p:
            yield p[:-1], 1
        for i in range(self._branching(p)):
            yield p + (i,), 1

    def point_key(self, p):
        return (len(p), p)

    def point_label(self, p):
        return "r" if not p else ".".join(str(i) for i in p)

    def parse_point(self, label):
        if label in ("r", ""):
            return ()
        path = tuple(int(s) for s in label.split("."))
        for depth, i in enumerate(path):
            limit = self.degree if depth == 0 else self.degree - 1
            if not 0 <= i < limit:
                raise PreconditionError(f"branch index {i} out of range at depth {depth}")
        return path


class TreePlusRaySpace(SpaceHandle):
    """A d-regular tree with a one-sided integer ray glued at the root.

    The motivating example of a space whose isoperimetric constant vanishes
    while every deep tree observer sees doubling balls.
    """

    def __init__(self, degree: int = 3):
        if degree < 3:
            raise PreconditionError("tree-plus-ray needs tree degree at least 3")
        self.degree = degree
        self.id = f"tree-{degree}-plus-ray"
        self.base_point = ("t", ())
        self.unit_graph = True

    def tree_point(self, path):
        return ("t", tuple(path))

    def ray_point(self, n):
        if n < 1:
            raise PreconditionError("ray points are indexed from 1")
        return ("r", n)

    def distance(self, x, y):
        kx, px = x
        ky, py = y
        if kx == "t" and ky == "t":
            lcp = 0
            for a, b in zip(px, py):
                if a != b:
                    break
                lcp += 1
            return len(px) + len(py) - 2 * lcp
        if kx == "r" and ky == "r":
            return abs(px - py)
        path = px if kx == "t" else py
        n = px if kx == "r" else py
        return n + len(path)

    def neighbors(self, p):
        kind, val = p
        if kind == "r":
            yield ("r", val + 1), 1
            yield (("t", ()) if val == 1 else ("r", val - 1)), 1
            return
        path = val
        if path:
            yield ("t", path[:-1]), 1
        else:
            yield ("r", 1), 1
        branching = self.degree if not path else self.degree - 1
        for i in range(branching):
            yield ("t", path + (i,)), 1

    def point_key(self, p):
        kind, val = p
        if kind == "t":
            return (0, len(val), val)
        return (1, val, ())

    def point_label(self, p):
        kind, val = p
        if kind == "r":
            return f"ray{val}"
        return "t:r" if not val else "t:" + ".".join(str(i) for i in val)

    def parse_point(self, label):
        if label.startswith("ray"):
            return self.ray_point(int(label[3:]))
        text = label[2:] if label.startswith("t:") else label
        if text in ("r", ""):
            return ("t", ())
        return ("t", tuple(int(s) for s in text.split(".")))


# -- weighted rooted trees -------------------------------------------------


class WeightedTreeSpace(SpaceHandle):
    """A rooted tree with fixed branching whose edge weights depend on depth.

    The edge from a depth-k vertex down to its child carries weight
    ``weight_at(k)``.  With branching 2 and weights 10^k this is the rooted
    binary tree that embeds bi-lipschitzly in the real line despite its
    exponential volume growth.
    """

    tree_like = True

    def __init__(self, branching: int, weight_at, id: str = "weighted-tree"):
        if branching < 1:
            raise PreconditionError("branching must be at least 1")
        self.branching = branching
        self.weight_at = weight_at
        self.id = id
        self.base_point = ()
        self._costs = [as_exact(0)]  # cost[n] = distance from root to depth n

    def _cost(self, n: int):
        costs = self._costs
        while len(costs) <= n:
            w = as_exact(self.weight_at(len(costs) - 1))
            if w <= 0:
                raise PreconditionError("tree weights must be positive")
            costs.append(costs[-1] + w)
        return costs[n]

    def distance(self, x, y):
        lcp = 0
        for a, b in zip(x, y):
            if a != b:
                break
            lcp += 1
        return self._cost(len(x)) + self._cost(len(y)) - 2 * self._cost(lcp)

    def neighbors(self, p):
        depth = len(p)
        if p:
            yield p[:-1], self._cost(depth) - self._cost(depth - 1)
        w = self._cost(depth + 1) - self._cost(depth)
        for i in range(self.branching):
            yield p + (i,), w

    def point_key(self, p):
        return (len(p), p)

    def point_label(self, p):
        return "r" if not p else ".".join(str(i) for i in p)

    def parse_point(self, label):
        if label in ("r", ""):
            return ()
        path = tuple(int(s) for s in label.split("."))
        if any(not 0 <= i < self.branching for i in path):
            raise PreconditionError(f"branch index out of range in {label!r}")
        return path


def ivanov_tree() -> WeightedTreeSpace:
    """Rooted binary tree whose depth-k edges weigh 10^k."""
    return WeightedTreeSpace(2, lambda k: 10**k, id="ivanov-tree")


# -- explicit finite metric spaces ----------------------------------------


class FiniteMetricSpace(SpaceHandle):
    """A finite metric space given by an explicit distance matrix.

    Point order as given is the canonical order.  ``check=True`` verifies
    the metric axioms on every pair and triple and raises
    MetricViolationError with a witness otherwise.
    """

    is_finite = True

    def __init__(self, labels, matrix, id="finite", arithmetic="exact",
                 level_tolerance=1e-9, check=True):
        from .errors import MetricViolationError

        self.id = id
        self.points = tuple(labels)
        if len(set(self.points)) != len(self.points):
            raise PreconditionError("duplicate point labels")
        self.size = len(self.points)
        self.arithmetic = arithmetic
        self.level_tolerance = level_tolerance if arithmetic == "float" else 0.0
        self._index = {p: i for i, p in enumerate(self.points)}
        self._m = [list(row) for row in matrix]
        if len(self._m) != self.size or any(len(r) != self.size for r in self._m):
            raise PreconditionError("distance matrix shape mismatch")
        self.base_point = self.points[0]
        if check:
            tol = self.level_tolerance
            n = self.size
            for i in range(n):
                if self._m[i][i] != 0:
                    raise MetricViolationError(
                        f"d(x,x) != 0 at {self.points[i]!r}", (self.points[i],))
                for j in range(i + 1, n):
                    if self._m[i][j] != self._m[j][i]:
                        raise MetricViolationError(
                            "asymmetric distance", (self.points[i], self.points[j]))
                    if self._m[i][j] <= tol:
                        raise MetricViolationError(
                            "zero or negative distance between distinct points",
                            (self.points[i], self.points[j]))
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        if self._m[i][k] > self._m[i][j] + self._m[j][k] + tol:
                            raise MetricViolationError(
                                "triangle inequality fails",
                                (self.points[i], self.points[j], self.points[k]))

    def distance(self, x, y):
        return self._m[self._index[x]][self._index[y]]

    def region_distances(self, seeds, radius):
        rows = [self._m[self._index[a]] for a in seeds]
        out = {}
        for j, p in enumerate(self.points):
            d = min(row[j] for row in rows)
            if d <= radius:
                out[p] = d
        return out

    def point_key(self, p):
        return self._index[p]

    def point_label(self, p):
        return str(p)

    def parse_point(self, label):
        for p in self.points:
            if str(p) == label:
                return p
        raise PreconditionError(f"unknown point {label!r}")


def tripod_space(a1=1, a2=1, a3=1) -> FiniteMetricSpace:
    """The metric tripod: center v at distance a_i from arms with no arm edges."""
    w = [as_exact(a) for a in (a1, a2, a3)]
    if any(a <= 0 for a in w):
        raise PreconditionError("tripod weights must be positive")
    labels = ("v1", "v", "v2", "v3")
    m = {
        ("v", "v1"): w[0], ("v", "v2"): w[1], ("v", "v3"): w[2],
        ("v1", "v2"): w[0] + w[1], ("v1", "v3"): w[0] + w[2],
        ("v2", "v3"): w[1] + w[2],
    }
    matrix = _symmetric_matrix(labels, m)
    return FiniteMetricSpace(labels, matrix, id="tripod", check=False)


def semi_tripod_space(a1=1, a2=1, a3=1, beta=1) -> FiniteMetricSpace:
    """The metric semi-tripod: arms v1, v2 joined by an edge of weight beta.

    Compatibility of the induced metric forces |a1 - a2| < beta < a1 + a2.
    """
    w1, w2, w3, b = (as_exact(v) for v in (a1, a2, a3, beta))
    if any(v <= 0 for v in (w1, w2, w3, b)):
        raise PreconditionError("semi-tripod weights must be positive")
    if not (abs(w1 - w2) < b < w1 + w2):
        raise PreconditionError(
            "semi-tripod needs |a1 - a2| < beta < a1 + a2 for metric compatibility")
    labels = ("v1", "v", "v2", "v3")
    m = {
        ("v", "v1"): w1, ("v", "v2"): w2, ("v", "v3"): w3,
        ("v1", "v2"): b, ("v1", "v3"): w1 + w3, ("v2", "v3"): w2 + w3,
    }
    matrix = _symmetric_matrix(labels, m)
    return FiniteMetricSpace(labels, matrix, id="semi-tripod", check=False)


def _symmetric_matrix(labels, entries):
    z = Fraction(0)

    def lookup(p, q):
        if p == q:
            return z
        if (p, q) in entries:
            return entries[(p, q)]
        return entries[(q, p)]

    return [[lookup(p, q) for q in labels] for p in labels]


# -- box spaces ------------------------------------------------------------


class BoxSpace(SpaceHandle):
    """Disjoint union of finite connected unit graphs with diverging gaps.

    Within a component the metric is the graph metric; between components
    n and m every distance equals R_n + R_m where the offsets R_n are at
    least max(diam(G_n), n) and strictly increase.  Exposes the standard
    small-neighborhood witness family built from a truncated ball in the
    next component.
    """

    is_finite = True

    def __init__(self, components, id="box-space"):
        if not components:
            raise PreconditionError("box space needs at least one component")
        self.id = id
        self._graphs = list(components)
        self._vertices = []
        self._adj = []
        for g in self._graphs:
            if not g.unit_weights:
                raise PreconditionError("box-space components must have unit weights")
            self._vertices.append(g.vertices)
            self._adj.append({v: sorted(g.adjacency(v), key=g.vertex_key) for v in g.vertices})
        self.size = sum(len(vs) for vs in self._vertices)
        self._diam_lower = []
        self._diam_upper = []
        for i, g in enumerate(self._graphs):
            lo, hi = _component_diameter_bounds(self._adj[i], self._vertices[i])
            self._diam_lower.append(lo)
            self._diam_upper.append(hi)
        self.offsets = []
        for i in range(len(self._graphs)):
            guard = self.offsets[i - 1] + 1 if i else 0
            self.offsets.append(max(self._diam_upper[i], i + 1, guard))
        self.base_point = (0, self._vertices[0][0])
        self._bfs_cache = {}

    @property
    def components(self):
        return tuple(self._graphs)

    def component_points(self, i) -> frozenset:
        return frozenset((i, v) for v in self._vertices[i])

    def cross_distance(self, i, j) -> int:
        return self.offsets[i] + self.offsets[j]

    def _hop(self, i, src):
        key = (i, src)
        if key not in self._bfs_cache:
            self._bfs_cache[key] = _bfs_from(self._adj[i], [src])
        return self._bfs_cache[key]

    def distance(self, x, y):
        (i, u), (j, v) = x, y
        if i == j:
            return self._hop(i, u)[v]
        return self.cross_distance(i, j)

    def region_distances(self, seeds, radius):
        by_comp: dict[int, list] = {}
        for i, v in seeds:
            by_comp.setdefault(i, []).append(v)
        out = {}
        for j in range(len(self._graphs)):
            cross = min(
                (self.cross_distance(i, j) for i in by_comp if i != j),
                default=None,
            )
            local = {}
            if j in by_comp:
                local = _bfs_from(self._adj[j], by_comp[j], limit=_as_hops(radius))
            for v in self._vertices[j]:
                d = local.get(v)
                if cross is not None and (d is None or cross < d):
                    d = cross
                if d is not None and d <= radius:
                    out[(j, v)] = d
        return out

    def point_key(self, p):
        i, v = p
        return (i, self._graphs[i].vertex_key(v))

    def point_label(self, p):
        i, v = p
        return f"g{i + 1}:{v}"

    def parse_point(self, label):
        comp, _, v = label.partition(":")
        if not comp.startswith("g"):
            raise PreconditionError(f"bad box-space label {label!r}")
        i = int(comp[1:]) - 1
        if not 0 <= i < len(self._graphs):
            raise PreconditionError(f"component {comp} out of range")
        for u in self._vertices[i]:
            if str(u) == v:
                return (i, u)
        raise PreconditionError(f"unknown vertex {v!r} in component {comp}")

    def witness_family(self, k: int):
        """Yield (n, F, x) for the family F_k^n, starting at the first index
        from which every component has diameter >= k and consecutive gaps
        exceed k.  F_k^n joins the first n components with the (n+1)-st
        stripped of the ball B(x, k) around its canonical vertex x.
        """
        if k < 1:
            raise PreconditionError("k must be at least 1")
        count = len(self._graphs)
        start = None
        for n in range(1, count):
            ok = all(
                self._diam_lower[i] >= k and self.cross_distance(i, i + 1) > k
                for i in range(n - 1, count - 1)
            )
            if ok:
                start = n
                break
        if start is None:
            return
        for n in range(start, count):
            x = self._vertices[n][0]
            ball = _bfs_from(self._adj[n], [x], limit=k)
            points = set()
            for i in range(n):
                points.update(self.component_points(i))
            points.update((n, v) for v in self._vertices[n] if v not in ball)
            yield n, frozenset(points), (n, x)


def _as_hops(radius) -> int:
    if isinstance(radius, int):
        return radius
    if isinstance(radius, Fraction):
        return radius.numerator // radius.denominator
    return int(radius // 1)


def _bfs_from(adj, sources, limit=None):
    dist = {v: 0 for v in sources}
    frontier = list(dist)
    hops = 0
    while frontier and (limit is None or hops < limit):
        hops += 1
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = hops
                    nxt.append(w)
        frontier = nxt
    return dist


def _component_diameter_bounds(adj, vertices):
    n = len(vertices)
    if n == 1:
        return 0, 0
    if n <= 600:
        diam = 0
        for v in vertices:
            ecc = max(_bfs_from(adj, [v]).values())
            diam = max(diam, ecc)
        return diam, diam
    # Double sweep: the eccentricity of a farthest point is a lower bound
    # and twice any eccentricity is an upper bound.
    d0 = _bfs_from(adj, [vertices[0]])
    far = max(d0, key=lambda v: (d0[v], str(v)))
    d1 = _bfs_from(adj, [far])
    ecc = max(d1.values())
    return ecc, 2 * ecc


# -- graph generators and windows -------------------------------------------


def cycle_graph(n: int, id=None) -> WeightedGraph:
    if n < 3:
        raise PreconditionError("cycle needs at least 3 vertices")
    edges = [(i, (i + 1) % n, 1) for i in range(n)]
    return WeightedGraph(edges, id=id or f"C{n}")


def random_regular_graph(n: int, degree: int, seed: int = 0, id=None) -> WeightedGraph:
    """A uniform-ish simple connected d-regular graph via the pairing model.

    Resamples the whole matching until it is simple and connected, so the
    outcome is a function of (n, degree, seed) only.
    """
    if n * degree % 2 != 0:
        raise PreconditionError("n * degree must be even")
    if degree >= n:
        raise PreconditionError("degree must be below the vertex count")
    rng = random.Random(seed)
    for _attempt in range(1000):
        stubs = [v for v in range(n) for _ in range(degree)]
        rng.shuffle(stubs)
        seen = set()
        ok = True
        for a, b in zip(stubs[::2], stubs[1::2]):
            if a == b or (min(a, b), max(a, b)) in seen:
                ok = False
                break
            seen.add((min(a, b), max(a, b)))
        if not ok:
            continue
        adj = {v: [] for v in range(n)}
        for a, b in seen:
            adj[a].append(b)
            adj[b].append(a)
        if len(_bfs_from(adj, [0])) != n:
            continue
        edges = [(a, b, 1) for a, b in sorted(seen)]
        return WeightedGraph(edges, id=id or f"rrg-{n}-{degree}-{seed}")
    raise PreconditionError(
        f"could not sample a simple connected {degree}-regular graph on {n} vertices")


def box_space_of_cycles(count: int = 3, base: int = 4) -> BoxSpace:
    comps = [cycle_graph(base * 2**i) for i in range(count)]
    return BoxSpace(comps, id=f"box-cycles-{count}")


def box_space_random_regular(count: int = 8, degree: int = 4, seed: int = 0) -> BoxSpace:
    """Box space over random d-regular components of sizes 2^(n+3)."""
    comps = [
        random_regular_graph(2 ** (i + 4), degree, seed=seed + i)
        for i in range(count)
    ]
    return BoxSpace(comps, id=f"box-rrg-{count}-{degree}-{seed}")


def graph_window(space: SpaceHandle, root, radius: int, id=None) -> WeightedGraph:
    """Materialize the hop-ball of a graph-backed space as a WeightedGraph.

    Vertices are relabeled with the space's point labels, so the window is
    self-contained and canonically ordered.
    """
    dist = {root: 0}
    frontier = [root]
    hops = 0
    while frontier and hops < radius:
        hops += 1
        nxt = []
        for p in frontier:
            for q, _w in space.neighbors(p):
                if q not in dist:
                    dist[q] = hops
                    nxt.append(q)
        frontier = nxt
    inside = set(dist)
    edges = []
    seen = set()
    for p in inside:
        lp = space.point_label(p)
        for q, w in space.neighbors(p):
            if q in inside:
                lq = space.point_label(q)
                key = (min(lp, lq), max(lp, lq))
                if key not in seen:
                    seen.add(key)
                    edges.append((key[0], key[1], w))
    return WeightedGraph(edges, id=id or f"{space.id}-window-{radius}")


def truncate_space(space: SpaceHandle, n: int, base=None, id=None) -> FiniteMetricSpace:
    """The n points nearest the base as an explicit finite metric space.

    Ties at equal distance break by canonical point order; the restriction
    of a metric is a metric, so no re-validation is needed.
    """
    if n < 1:
        raise PreconditionError("truncation size must be positive")
    base = space.base_point if base is None else base
    radius = 1
    while True:
        region = space.region_distances({base}, radius)
        if len(region) >= n:
            break
        if space.is_finite and space.size is not None and len(region) >= space.size:
            break
        radius *= 2
    chosen = sorted(region, key=lambda p: (region[p], space.point_key(p)))[:n]
    labels = [space.point_label(p) for p in chosen]
    matrix = [[space.distance(p, q) for q in chosen] for p in chosen]
    return FiniteMetricSpace(
        labels, matrix, id=id or f"{space.id}[{len(chosen)}]",
        arithmetic=space.arithmetic, level_tolerance=space.level_tolerance,
        check=False,
    )


# -- registry ----------------------------------------------------------------


def make_space(kind: str, **params) -> SpaceHandle:
    """Build a zoo space by kind name.  See ``zoo_catalog`` for the kinds."""
    kind = kind.replace("_", "-")
    if kind == "harmonic":
        return HarmonicSpace()
    if kind in ("z", "integers"):
        return IntegerLattice(1)
    if kind == "z2":
        return IntegerLattice(2)
    if kind == "integer-lattice":
        return IntegerLattice(int(params.get("dim", 1)))
    if kind == "free-group":
        return FreeGroupSpace(int(params.get("rank", 2)))
    if kind == "regular-tree":
        return RegularTreeSpace(int(params.get("degree", 3)))
    if kind == "tree-plus-ray":
        return TreePlusRaySpace(int(params.get("degree", 3)))
    if kind == "ivanov-tree":
        return ivanov_tree()
    if kind == "weighted-tree":
        branching = int(params.get("branching", 2))
        base = as_exact(params.get("weight_base", 10))
        return WeightedTreeSpace(branching, lambda k: base**k,
                                 id=f"weighted-tree-{branching}")
    if kind == "box-space":
        family = params.get("family", "cycles")
        count = int(params.get("count", 3))
        if family == "cycles":
            return box_space_of_cycles(count)
        if family == "random-regular":
            return box_space_random_regular(
                count, int(params.get("degree", 4)), int(params.get("seed", 0)))
        raise PreconditionError(f"unknown box-space family {family!r}")
    if kind == "tripod":
        w = params.get("weights", (1, 1, 1))
        return tripod_space(*w)
    if kind == "semi-tripod":
        w = params.get("weights", (1, 1, 1, 1))
        return semi_tripod_space(*w)
    raise PreconditionError(f"unknown space kind {kind!r}")


def zoo_catalog() -> list[dict]:
    """Kind names, parameters, and one-line descriptions for the CLI."""
    return [
        {"kind": "harmonic", "params": "", "description":
            "partial sums of the harmonic series with the line metric"},
        {"kind": "z", "params": "", "description": "the integers as a unit path graph"},
        {"kind": "z2", "params": "", "description": "the square lattice with the word metric"},
        {"kind": "integer-lattice", "params": "dim", "description":
            "Z^d with the word metric of the 2d standard generators"},
        {"kind": "free-group", "params": "rank", "description":
            "free group on `rank` letters; its Cayley graph is the 2*rank regular tree"},
        {"kind": "regular-tree", "params": "degree", "description":
            "infinite regular tree with unit edges"},
        {"kind": "tree-plus-ray", "params": "degree", "description":
            "regular tree with a one-sided integer ray glued at the root"},
        {"kind": "ivanov-tree", "params": "", "description":
            "rooted binary tree with depth-k edge weight 10^k"},
        {"kind": "weighted-tree", "params": "branching, weight_base", "description":
            "rooted tree with depth-dependent edge weights weight_base^k"},
        {"kind": "box-space", "params": "family (cycles|random-regular), count, degree, seed",
         "description": "disjoint union of growing finite graphs with diverging gaps"},
        {"kind": "tripod", "params": "weights a1,a2,a3", "description":
            "center with three arms and no arm edges (never Hilbert-embeddable)"},
        {"kind": "semi-tripod", "params": "weights a1,a2,a3,beta", "description":
            "tripod with one arm edge of weight beta"},
        {"kind": "from-file", "params": "path", "description":
            "weighted-graph JSON/edge list or finite-metric JSON"},
    ]
