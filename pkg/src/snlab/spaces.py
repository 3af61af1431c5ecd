"""Locally finite metric spaces and the discrete-neighborhood machinery.

A space is a distance oracle plus an exact bounded-region enumerator:
``region_distances(A, R)`` maps every point at distance at most R from the
finite seed set A to that distance.  Local finiteness (every bounded set is
finite) is what makes these enumerations, and everything built on them,
terminate.

The central reduction implemented here: a complete chain of distance levels
starting at 0 with l+1 entries consists of exactly the l+1 smallest values
of P = {d(y, A) : y in X}, so the discrete k-neighborhood of A is the union
of the first k+1 level sets.  This is not assumed silently; the test suite
checks it against explicit chain enumeration on small spaces.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    HorizonExceededError,
    InsufficientLevelsError,
    PreconditionError,
)

DEFAULT_ENUMERATION_CAP = 1_000_000
DEFAULT_LEVEL_TOLERANCE = 1e-9


class SpaceHandle:
    """A locally finite metric space.

    Subclasses provide ``distance`` and either ``neighbors`` (graph-like
    spaces, enumerated by weighted breadth-first expansion) or a direct
    ``region_distances`` override.  Points are opaque hashable identifiers;
    equality is identifier equality, and ``point_key`` fixes the canonical
    ordering used for all serialized output.  Instances are immutable after
    construction and safe for concurrent reads.
    """

    id: str = "space"
    arithmetic: str = "exact"  # "exact" or "float"
    level_tolerance: float = 0.0  # only consulted in float mode
    is_finite: bool = False
    size: int | None = None
    base_point = None
    unit_graph: bool = False  # metric is the hop metric of a connected graph
    tree_like: bool = False  # breadth-first expansion never revisits a point
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    # -- metric surface -------------------------------------------------

    def distance(self, x, y):
        raise NotImplementedError

    def neighbors(self, p):
        """Yield (neighbor, edge weight) pairs for graph-backed spaces."""
        raise NotImplementedError(f"{self.id} has no adjacency structure")

    def region_distances(self, seeds, radius) -> dict:
        """Map every point y with d(y, seeds) <= radius to that distance.

        Default implementation: multi-source Dijkstra over ``neighbors``
        (plain breadth-first on unit graphs).  Raises HorizonExceededError
        past ``enumeration_cap`` points.
        """
        seeds = list(seeds)
        if not seeds:
            raise PreconditionError("region_distances requires a nonempty seed set")
        if radius < 0:
            return {}
        if self.unit_graph:
            return self._bfs_region(seeds, radius)
        return self._dijkstra_region(seeds, radius)

    def enumerate_within(self, seeds, radius) -> set:
        """The closed neighborhood {y : d(y, seeds) <= radius} as a set."""
        return set(self.region_distances(seeds, radius))

    def distance_to_set(self, x, A):
        """d(x, A) = min over a in A of d(x, a)."""
        values = [self.distance(x, a) for a in A]
        if not values:
            raise PreconditionError("distance to the empty set is undefined")
        return min(values)

    def initial_level_radius(self, A, m):
        """Optional hint: a radius expected to cover the first m+1 levels.

        Purely a performance knob for spaces whose level gaps shrink
        outward (any starting radius gives the same result).
        """
        return None

    # -- canonical identity ----------------------------------------------

    def point_key(self, p):
        """Sort key giving the deterministic canonical point order."""
        return self.point_label(p)

    def point_label(self, p) -> str:
        return str(p)

    def parse_point(self, label: str):
        """Inverse of point_label where supported (used by the CLI)."""
        raise PreconditionError(f"space {self.id!r} cannot parse point labels")

    def sort_points(self, points):
        return sorted(points, key=self.point_key)

    def labels(self, points) -> tuple[str, ...]:
        return tuple(self.point_label(p) for p in self.sort_points(points))

    # -- internals -------------------------------------------------------

    def _bfs_region(self, seeds, radius) -> dict:
        limit = _hop_limit(radius)
        dist = {p: 0 for p in seeds}
        frontier = list(dist)
        hops = 0
        while frontier and hops < limit:
            hops += 1
            nxt = []
            for p in frontier:
                for q, _w in self.neighbors(p):
                    if q not in dist:
                        dist[q] = hops
                        nxt.append(q)
            if len(dist) > self.enumeration_cap:
                raise HorizonExceededError(self.id, radius, self.enumeration_cap)
            frontier = nxt
        return dist

    def _dijkstra_region(self, seeds, radius) -> dict:
        dist = {}
        heap = [(0, i, p) for i, p in enumerate(seeds)]
        counter = len(seeds)
        while heap:
            d, _, p = heapq.heappop(heap)
            if p in dist:
                continue
            if d > radius:
                break
            dist[p] = d
            if len(dist) > self.enumeration_cap:
                raise HorizonExceededError(self.id, radius, self.enumeration_cap)
            for q, w in self.neighbors(p):
                if q not in dist:
                    nd = d + w
                    if nd <= radius:
                        counter += 1
                        heapq.heappush(heap, (nd, counter, q))
        return dist

    def __repr__(self):
        return f"<{type(self).__name__} {self.id!r}>"


def _hop_limit(radius) -> int:
    """Largest hop count within a real radius on a unit-weight graph."""
    if isinstance(radius, int):
        return radius
    if isinstance(radius, Fraction):
        return radius.numerator // radius.denominator
    return int(radius // 1)


# -- distance levels ------------------------------------------------------


@dataclass(frozen=True)
class DistanceLevels:
    """The first levels of P = {d(y, A) : y in X} with their level sets.

    ``levels`` is strictly ascending and starts at 0; ``members[i]`` is the
    finite set realizing ``levels[i]``.  ``exhausted`` is True when the whole
    space was enumerated and P had fewer levels than requested.
    """

    base_set: frozenset
    levels: tuple
    members: tuple
    exhausted: bool

    def level_members(self, i) -> frozenset:
        return self.members[i]

    def __len__(self):
        return len(self.levels)


@dataclass(frozen=True)
class NeighborhoodResult:
    """dN_k(A) together with its boundary dB_k(A) = dN_k(A) minus A."""

    k: int
    dn: frozenset
    db: frozenset
    levels_used: DistanceLevels


def _group_exact(dist_map: dict) -> list[tuple]:
    buckets: dict = {}
    for point, value in dist_map.items():
        buckets.setdefault(value, set()).add(point)
    return sorted(buckets.items())


def _group_with_tolerance(dist_map: dict, tol: float) -> list[tuple]:
    # Values within relative tolerance collapse into one level whose
    # representative is the smallest member; the cluster top is kept so the
    # caller can tell which clusters are provably complete.
    items = sorted(dist_map.items(), key=lambda kv: kv[1])
    grouped: list[tuple] = []
    for point, value in items:
        if grouped:
            rep, members, top = grouped[-1]
            if value - top <= tol * max(1.0, abs(value)):
                members.add(point)
                grouped[-1] = (rep, members, max(top, value))
                continue
        grouped.append((value, {point}, value))
    return grouped


def _levels_cache(space) -> dict:
    cache = getattr(space, "_snlab_levels_cache", None)
    if cache is None:
        cache = {}
        space._snlab_levels_cache = cache
    if len(cache) > 65536:
        cache.clear()
    return cache


def _slice_levels(widest: DistanceLevels, m: int) -> DistanceLevels:
    if len(widest.levels) >= m + 1:
        return DistanceLevels(
            base_set=widest.base_set,
            levels=widest.levels[: m + 1],
            members=widest.members[: m + 1],
            exhausted=False,
        )
    return widest


def distance_levels(space: SpaceHandle, A, m: int) -> DistanceLevels:
    """The m+1 smallest elements of P = {d(y, A) : y in X} with level sets.

    Grows the enumeration radius until at least m+1 distinct levels are
    confirmed complete, i.e. the enumerated region provably covers every
    point with d(y, A) <= p_m.  Finite spaces return fewer levels with
    ``exhausted=True``; infinite spaces either terminate (each level set is
    bounded, hence finite) or hit the enumeration cap loudly.
    """
    base = frozenset(A)
    if not base:
        raise PreconditionError("distance_levels requires a nonempty base set")
    if m < 0:
        raise PreconditionError("level count must be nonnegative")

    cache = _levels_cache(space)
    widest = cache.get(base)
    if widest is not None and (widest.exhausted or len(widest.levels) >= m + 1):
        return _slice_levels(widest, m)

    tol = space.level_tolerance if space.arithmetic == "float" else 0.0
    radius = space.initial_level_radius(base, m) or 1
    while True:
        dist_map = space.region_distances(base, radius)
        if space.arithmetic == "float":
            clusters = _group_with_tolerance(dist_map, tol)
            margin = tol * max(1.0, abs(float(radius)))
            grouped = [(rep, pts) for rep, pts, _top in clusters]
            tops = [top for _rep, _pts, top in clusters]
        else:
            grouped = _group_exact(dist_map)
            tops = [v for v, _ in grouped]
            margin = 0

        whole_space = space.is_finite and space.size is not None and len(dist_map) >= space.size
        if whole_space:
            complete = grouped
        else:
            complete = [gv for gv, top in zip(grouped, tops) if top <= radius - margin]

        if whole_space or len(complete) >= m + 1:
            take = complete if whole_space else complete[: m + 1]
            result = DistanceLevels(
                base_set=base,
                levels=tuple(v for v, _ in take),
                members=tuple(frozenset(pts) for _, pts in take),
                exhausted=whole_space and len(take) < m + 1,
            )
            stored = cache.get(base)
            if stored is None or len(result.levels) > len(stored.levels) or result.exhausted:
                cache[base] = result
            return _slice_levels(result, m) if len(result.levels) > m + 1 else result

        # Growth step: prefer the gap-based estimate of where the missing
        # levels must lie, falling back to doubling so termination is
        # guaranteed even when level gaps keep growing.
        if len(complete) >= 2:
            values = [v for v, _ in complete]
            max_gap = max(b - a for a, b in zip(values, values[1:]))
            needed = (m + 1) - len(complete)
            estimate = values[-1] + needed * max_gap
        else:
            estimate = radius
        radius = estimate if estimate > radius else 2 * radius


def distance_to_set(space: SpaceHandle, x, A):
    """d(x, A), exact in rational mode.  A must be nonempty."""
    if not A:
        raise PreconditionError("distance to the empty set is undefined")
    return space.distance_to_set(x, set(A))


def discrete_neighborhood(space: SpaceHandle, A, k: int) -> NeighborhoodResult:
    """dN_k(A): the union of the first k+1 distance-level sets around A."""
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    levels = distance_levels(space, A, k)
    dn: set = set()
    for members in levels.members:
        dn.update(members)
    base = levels.base_set
    return NeighborhoodResult(k=k, dn=frozenset(dn), db=frozenset(dn - base), levels_used=levels)


def closed_neighborhood(space: SpaceHandle, A, alpha) -> frozenset:
    """cN_alpha(A) = {x : d(x, A) <= alpha}."""
    base = frozenset(A)
    if not base:
        raise PreconditionError("closed_neighborhood requires a nonempty set")
    if alpha < 0:
        raise PreconditionError("alpha must be nonnegative")
    return frozenset(space.enumerate_within(base, alpha))


def closed_boundary(space: SpaceHandle, A, alpha) -> frozenset:
    """cB_alpha(A) = cN_alpha(A) minus A."""
    base = frozenset(A)
    return frozenset(closed_neighborhood(space, base, alpha) - base)


def verify_complete_chain(levels: DistanceLevels, candidate) -> bool:
    """Check a value sequence against the complete-chain conditions.

    True iff the candidate starts at 0, increases strictly, consists of
    stored levels, and skips none of them.  A candidate reaching beyond the
    enumerated levels of a non-exhausted space raises InsufficientLevelsError
    rather than returning a silent False.
    """
    values = list(candidate)
    if not values or values[0] != 0:
        return False
    if any(b <= a for a, b in zip(values, values[1:])):
        return False
    if not levels.exhausted and values[-1] > levels.levels[-1]:
        raise InsufficientLevelsError(
            f"candidate reaches {values[-1]}, enumerated levels stop at {levels.levels[-1]}"
        )
    index = {v: i for i, v in enumerate(levels.levels)}
    try:
        positions = [index[v] for v in values]
    except KeyError:
        return False  # value is not an element of P within the enumerated range
    return all(j == i + 1 for i, j in zip(positions, positions[1:]))


def bfs_ball_sizes(space: SpaceHandle, horizon: int,
                   max_points: int | None = None) -> list[int]:
    """|B(base, n)| for n = 0..horizon by breadth-first expansion.

    Uses the space's adjacency directly; ``tree_like`` spaces skip the
    visited set, which keeps free-group balls affordable in memory.
    ``max_points`` overrides the space's enumeration cap for this walk.
    """
    if space.base_point is None:
        raise PreconditionError(f"space {space.id!r} exposes no base point")
    cap = max_points if max_points is not None else space.enumeration_cap
    sizes = [1]
    frontier = [space.base_point]
    # tree_like spaces encode points as sequences whose length is the hop
    # distance from the base, with a unique parent; outward neighbors are
    # then exactly the longer ones and no visited set is needed.
    seen = None if space.tree_like else {space.base_point}
    total = 1
    for _ in range(horizon):
        nxt = []
        for p in frontier:
            for q, _w in space.neighbors(p):
                if seen is not None:
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
                elif len(q) > len(p):
                    nxt.append(q)
        total += len(nxt)
        if total > cap:
            raise HorizonExceededError(space.id, horizon, cap)
        sizes.append(total)
        frontier = nxt
    return sizes
