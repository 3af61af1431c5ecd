"""Isoperimetric quotients, small-neighborhood witnesses, amenability tests.

Nothing here ever claims a value for an infimum over all finite subsets of
an infinite space: every estimate is window-scoped and carries an explicit
direction and certification status.  Exhaustive searches are capped;
beyond the cap the strategies are nested balls (the families used by the
ball-sequence arguments) plus deterministic greedy single-point moves.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PreconditionError
from .exact import as_exact
from .spaces import (
    SpaceHandle,
    closed_neighborhood,
    discrete_neighborhood,
)

DIRECTION_UPPER = "upper-bound-of-inf"
DIRECTION_LOWER = "lower-bound-of-inf"
DIRECTION_ESTIMATE = "estimate"

EXHAUSTIVE_CAP = 20


@dataclass(frozen=True)
class IsoQuotientRecord:
    """One isoperimetric quotient |dB_k(A)| / |A| with its witness set."""

    k: int
    set_size: int
    boundary_size: int
    quotient: Fraction
    witness: tuple[str, ...]
    points: frozenset = field(repr=False, compare=False, default=frozenset())


@dataclass(frozen=True)
class BoundEstimate:
    """A window-scoped numeric bound with honest direction and certification.

    ``certified`` is True only when the producing search was exhaustive over
    the declared window; the value is then the exact minimum there, hence an
    upper bound for the global infimum and a lower bound for the infimum
    restricted to the window.
    """

    value: Fraction
    direction: str
    certified: bool
    window: str
    k: int
    record: IsoQuotientRecord | None = None


def k_quotient(space: SpaceHandle, A, k: int) -> IsoQuotientRecord:
    """|dB_k(A)| / |A|, exact in rational mode."""
    base = frozenset(A)
    if not base:
        raise PreconditionError("k_quotient requires a nonempty set")
    if k < 1:
        raise PreconditionError("k must be at least 1")
    nb = discrete_neighborhood(space, base, k)
    return IsoQuotientRecord(
        k=k,
        set_size=len(base),
        boundary_size=len(nb.db),
        quotient=Fraction(len(nb.db), len(base)),
        witness=space.labels(base),
        points=base,
    )


def _window_description(space, window, strategy) -> str:
    pts = space.sort_points(window)
    lo, hi = space.point_label(pts[0]), space.point_label(pts[-1])
    return f"{len(pts)} points [{lo} .. {hi}], strategy={strategy}"


def _boundary_size(space, A, k) -> int:
    return len(discrete_neighborhood(space, A, k).db)


def _subset_stream(window_sorted):
    for size in range(1, len(window_sorted) + 1):
        yield from itertools.combinations(window_sorted, size)


def _min_quotient_exhaustive(space, window_sorted, k, jobs=1):
    def evaluate(chunk):
        best = None
        for combo in chunk:
            A = frozenset(combo)
            q = Fraction(_boundary_size(space, A, k), len(A))
            key = (q, tuple(space.point_key(p) for p in combo))
            if best is None or key < best[0]:
                best = (key, A)
        return best

    if jobs and jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        chunks = [list(itertools.combinations(window_sorted, size))
                  for size in range(1, len(window_sorted) + 1)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = [r for r in pool.map(evaluate, chunks) if r is not None]
        return min(results, key=lambda r: r[0])
    return evaluate(_subset_stream(window_sorted))


def _nested_ball_candidates(space, seeds, window=None, max_steps=200, max_points=None):
    """The ball families dN_0, dN_1, ... around each seed."""
    window_set = None if window is None else frozenset(window)
    for seed in seeds:
        for n in itertools.count():
            if n > max_steps:
                break
            ball = discrete_neighborhood(space, {seed}, n)
            A = ball.dn
            if window_set is not None and not A.issubset(window_set):
                break
            if max_points is not None and len(A) > max_points:
                break
            yield A
            if ball.levels_used.exhausted:
                break


def _greedy_minimize(space, score, start: frozenset, pool, max_rounds=60):
    """Deterministic local search: single-point additions and removals,
    accepting the best strictly improving move each round."""
    pool = list(pool)
    current = frozenset(start)
    current_score = score(current)
    for _ in range(max_rounds):
        best = None
        for p in pool:
            if p in current:
                if len(current) > 1:
                    cand = current - {p}
                else:
                    continue
            else:
                cand = current | {p}
            s = score(cand)
            key = (s, tuple(sorted(space.point_key(q) for q in cand)))
            if s < current_score and (best is None or key < best[0]):
                best = (key, cand, s)
        if best is None:
            break
        current, current_score = best[1], best[2]
    return current, current_score


def iso_constant_estimate(space: SpaceHandle, window, k: int,
                          strategy: str = "exhaustive",
                          exhaustive_cap: int = EXHAUSTIVE_CAP,
                          seeds=None, jobs: int = 1) -> BoundEstimate:
    """Estimate inf |dB_k(A)|/|A| over finite sets from a finite window.

    Strategies: ``exhaustive`` (every nonempty subset of the window, exact
    minimum there), ``nested-balls`` (the dN_n families of the seed points),
    ``greedy-local`` (single-point moves from the best nested ball).  All
    results are honest upper bounds of the global infimum.
    """
    window = list(window)
    if not window:
        raise PreconditionError("window must be nonempty")
    if k < 1:
        raise PreconditionError("k must be at least 1")
    window_sorted = space.sort_points(window)

    if strategy == "exhaustive":
        if len(window_sorted) > exhaustive_cap:
            raise PreconditionError(
                f"exhaustive window of {len(window_sorted)} points exceeds cap {exhaustive_cap}")
        (_, best_set) = _min_quotient_exhaustive(space, window_sorted, k, jobs=jobs)
        record = k_quotient(space, best_set, k)
        certified = True
    elif strategy in ("nested-balls", "greedy-local"):
        seeds = list(seeds) if seeds else [space.base_point]
        best_record = None
        for A in _nested_ball_candidates(space, seeds, window=window_sorted):
            rec = k_quotient(space, A, k)
            if best_record is None or (rec.quotient, rec.witness) < (
                    best_record.quotient, best_record.witness):
                best_record = rec
        if best_record is None:
            raise PreconditionError("no nested ball fits inside the window")
        if strategy == "greedy-local":
            score = lambda A: Fraction(_boundary_size(space, A, k), len(A))
            improved, _ = _greedy_minimize(
                space, score, best_record.points, window_sorted)
            rec = k_quotient(space, improved, k)
            if rec.quotient < best_record.quotient:
                best_record = rec
        record = best_record
        certified = False
    else:
        raise PreconditionError(f"unknown strategy {strategy!r}")

    return BoundEstimate(
        value=record.quotient,
        direction=DIRECTION_UPPER,
        certified=certified,
        window=_window_description(space, window_sorted, strategy),
        k=k,
        record=record,
    )


# -- small-neighborhood witness search -----------------------------------------


@dataclass(frozen=True)
class SnSearchResult:
    """Witness sequence for the vanishing of the k-isoperimetric quotient.

    The verdict is about exhibited finite sets only; it never asserts the
    property for the infinite space.
    """

    k: int
    epsilon: Fraction
    records: tuple[IsoQuotientRecord, ...]
    verdict: str  # "witnessed-below" or "inconclusive"
    diagnostics: dict


def sn_witness_search(space: SpaceHandle, k: int, epsilon,
                      seeds=None, max_steps: int = 400,
                      max_points: int = 200_000,
                      candidates=None) -> SnSearchResult:
    """Hunt for finite sets with |dB_k(A)|/|A| below epsilon.

    Walks the nested-ball families of the seed points, then any extra
    candidate sets (e.g. a box space's witness family).  Stops at the first
    record below epsilon.
    """
    if k < 1:
        raise PreconditionError("k must be at least 1")
    epsilon = as_exact(epsilon)
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    seeds = list(seeds) if seeds else [space.base_point]

    records: list[IsoQuotientRecord] = []
    witnessed = False
    steps = 0
    largest = 0

    def push(A) -> bool:
        nonlocal witnessed, largest
        rec = k_quotient(space, A, k)
        records.append(rec)
        largest = max(largest, rec.set_size)
        if rec.quotient < epsilon:
            witnessed = True
        return witnessed

    for A in _nested_ball_candidates(space, seeds, max_steps=max_steps,
                                     max_points=max_points):
        steps += 1
        if push(A):
            break
    if not witnessed and candidates is not None:
        for A in candidates:
            steps += 1
            if push(frozenset(A)):
                break

    return SnSearchResult(
        k=k,
        epsilon=epsilon,
        records=tuple(records),
        verdict="witnessed-below" if witnessed else "inconclusive",
        diagnostics={
            "steps": steps,
            "largest_set": largest,
            "max_steps": max_steps,
            "max_points": max_points,
            "seeds": [space.point_label(s) for s in seeds],
        },
    )


# -- closed-neighborhood (CGH) amenability test ---------------------------------


@dataclass(frozen=True)
class CghResult:
    """Search outcome for a finite set with |cN_k(A)| < factor * |A|."""

    k: object
    factor: Fraction
    verdict: str  # "witness-found", "no-witness-in-window", "budget-exhausted"
    witness: tuple[str, ...] | None
    witness_size: int | None
    neighborhood_size: int | None
    window: str
    certified_disproof: bool
    points: frozenset | None = field(repr=False, compare=False, default=None)


def _ball_union_masks(space, window_sorted, k):
    """Per-point closed k-ball bitmasks over the union universe.

    cN_k(A) is the union of the closed k-balls of the members of A, so
    exhaustive window searches reduce to OR/popcount on small integers.
    """
    balls = {p: space.enumerate_within({p}, k) for p in window_sorted}
    universe = set()
    for ball in balls.values():
        universe.update(ball)
    index = {p: i for i, p in enumerate(space.sort_points(universe))}
    masks = {}
    for p, ball in balls.items():
        m = 0
        for q in ball:
            m |= 1 << index[q]
        masks[p] = m
    return masks


def amenability_cgh_test(space: SpaceHandle, k, factor=2,
                         seeds=None, max_steps: int = 300,
                         max_points: int = 100_000,
                         window=None,
                         exhaustive_cap: int = EXHAUSTIVE_CAP) -> CghResult:
    """Search for a finite A with |cN_k(A)| < factor * |A|.

    With an explicit small window the search is exhaustive and a negative
    answer is a certified disproof scoped to that window (the neighborhood
    is still computed in the full space).  Otherwise nested balls plus a
    greedy refinement are tried, and a negative answer only reports that
    the budget found nothing.
    """
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    factor = Fraction(factor)

    def found(A, size, desc):
        return CghResult(
            k=k, factor=factor, verdict="witness-found",
            witness=space.labels(A), witness_size=len(A),
            neighborhood_size=size, window=desc,
            certified_disproof=False, points=frozenset(A),
        )

    if window is not None:
        window_sorted = space.sort_points(window)
        if len(window_sorted) <= exhaustive_cap:
            # Exhaustive over every nonempty subset; cN_k(A) is the union of
            # the closed k-balls of the members, computed once as bitmasks.
            desc = _window_description(space, window_sorted, "exhaustive")
            masks = _ball_union_masks(space, window_sorted, k)
            for combo in _subset_stream(window_sorted):
                union = 0
                for p in combo:
                    union |= masks[p]
                if union.bit_count() * factor.denominator < factor.numerator * len(combo):
                    return found(combo, union.bit_count(), desc)
            return CghResult(
                k=k, factor=factor, verdict="no-witness-in-window",
                witness=None, witness_size=None, neighborhood_size=None,
                window=desc, certified_disproof=True, points=None,
            )
        # Window too large to exhaust: nested balls and greedy moves
        # restricted to the window; a miss is window-scoped but not a
        # certified disproof.
        desc = _window_description(space, window_sorted, "nested-balls+greedy")
        seeds = list(seeds) if seeds else [space.base_point]
        best = None
        for A in _nested_ball_candidates(space, seeds, window=window_sorted,
                                         max_steps=max_steps, max_points=max_points):
            size = len(closed_neighborhood(space, A, k))
            if size < factor * len(A):
                return found(A, size, desc)
            if best is None or Fraction(size, len(A)) < best[0]:
                best = (Fraction(size, len(A)), A)
        if best is not None:
            score = lambda A: Fraction(len(closed_neighborhood(space, A, k)), len(A))
            improved, _ = _greedy_minimize(space, score, best[1], window_sorted)
            size = len(closed_neighborhood(space, improved, k))
            if size < factor * len(improved):
                return found(improved, size, desc)
        return CghResult(
            k=k, factor=factor, verdict="no-witness-in-window",
            witness=None, witness_size=None, neighborhood_size=None,
            window=desc, certified_disproof=False, points=None,
        )

    seeds = list(seeds) if seeds else [space.base_point]
    desc = f"nested balls around {[space.point_label(s) for s in seeds]}, max_steps={max_steps}"
    best = None
    for A in _nested_ball_candidates(space, seeds, max_steps=max_steps,
                                     max_points=max_points):
        size = len(closed_neighborhood(space, A, k))
        if size < factor * len(A):
            return found(A, size, desc)
        if best is None or Fraction(size, len(A)) < best[0]:
            best = (Fraction(size, len(A)), A)
    if best is not None:
        score = lambda A: Fraction(len(closed_neighborhood(space, A, k)), len(A))
        pool = closed_neighborhood(space, best[1], k)
        improved, _ = _greedy_minimize(space, score, best[1], space.sort_points(pool))
        size = len(closed_neighborhood(space, improved, k))
        if size < factor * len(improved):
            return found(improved, size, desc + " + greedy")
    return CghResult(
        k=k, factor=factor, verdict="budget-exhausted",
        witness=None, witness_size=None, neighborhood_size=None,
        window=desc, certified_disproof=False, points=None,
    )


# -- quasi-lattices and the Folner (BW) test -------------------------------------

FULL_LATTICE = "full"


@dataclass(frozen=True)
class QuasiLattice:
    """A coarsely dense, uniformly discrete subset with its K_r table."""

    gamma: object  # frozenset of points, or FULL_LATTICE
    alpha: Fraction
    k_table: tuple  # ((r, K_r), ...)
    window: str


@dataclass(frozen=True)
class LatticeReport:
    """Validation outcome; a covering failure names the violating point."""

    ok: bool
    lattice: QuasiLattice | None
    failing_point: str | None
    failing_distance: object | None


def quasi_lattice_verify(space: SpaceHandle, gamma, alpha, window,
                         radii=(1, 2, 3)) -> LatticeReport:
    """Check the quasi-lattice conditions over a finite window.

    Covering: every window point lies within alpha of gamma.  Discreteness:
    K_r = max |gamma intersect B_r(x)| over window points, with B_r open.
    """
    window_sorted = space.sort_points(window)
    desc = _window_description(space, window_sorted, "lattice")
    explicit = None if gamma == FULL_LATTICE else frozenset(gamma)

    if explicit is not None:
        gamma_sorted = space.sort_points(explicit)
        for x in window_sorted:
            d = min(space.distance(x, g) for g in gamma_sorted)
            if d > alpha:
                return LatticeReport(False, None, space.point_label(x), d)

    table = []
    for r in radii:
        best = 0
        for x in window_sorted:
            if explicit is not None:
                count = sum(1 for g in explicit if space.distance(x, g) < r)
            else:
                near = space.region_distances({x}, r)
                count = sum(1 for d in near.values() if d < r)
            best = max(best, count)
        table.append((r, best))
    lattice = QuasiLattice(
        gamma=explicit if explicit is not None else FULL_LATTICE,
        alpha=as_exact(alpha),
        k_table=tuple(table),
        window=desc,
    )
    return LatticeReport(True, lattice, None, None)


def identity_lattice(space: SpaceHandle, window=None) -> QuasiLattice:
    """The full point set as a quasi-lattice with alpha = 0 (always valid)."""
    return QuasiLattice(gamma=FULL_LATTICE, alpha=Fraction(0), k_table=(),
                        window="full point set")


def _in_gamma(gamma, p) -> bool:
    return True if gamma == FULL_LATTICE else p in gamma


def folner_boundary(space: SpaceHandle, gamma, U, r) -> frozenset:
    """The r-boundary of U inside gamma: points of gamma strictly within r
    of both U and its complement in gamma."""
    U = frozenset(U)
    if not U:
        raise PreconditionError("the Folner boundary of the empty set is undefined")
    near = space.region_distances(U, r)
    out = set()
    for x, d_to_U in near.items():
        if d_to_U >= r or not _in_gamma(gamma, x):
            continue
        around = space.region_distances({x}, r)
        for y, d in around.items():
            if d < r and y not in U and _in_gamma(gamma, y):
                out.add(x)
                break
    return frozenset(out)


@dataclass(frozen=True)
class BwResult:
    """Search outcome for a Folner set in the Block-Weinberger sense."""

    r: object
    delta: Fraction
    verdict: str  # "witness-found", "no-witness-in-window", "budget-exhausted"
    witness: tuple[str, ...] | None
    witness_size: int | None
    boundary_size: int | None
    window: str
    certified_disproof: bool
    points: frozenset | None = field(repr=False, compare=False, default=None)


def amenability_bw_test(space: SpaceHandle, lattice: QuasiLattice, r, delta,
                        seeds=None, max_steps: int = 300,
                        max_points: int = 100_000,
                        window=None,
                        exhaustive_cap: int = EXHAUSTIVE_CAP) -> BwResult:
    """Search for finite U inside the lattice with |boundary_r(U)|/|U| < delta."""
    if r <= 0 or delta <= 0:
        raise PreconditionError("r and delta must be positive")
    delta = as_exact(delta)
    gamma = lattice.gamma

    def boundary_ratio(U):
        boundary = folner_boundary(space, gamma, U, r)
        return Fraction(len(boundary), len(U)), len(boundary)

    def found(U, boundary_size, desc):
        return BwResult(
            r=r, delta=delta, verdict="witness-found",
            witness=space.labels(U), witness_size=len(U),
            boundary_size=boundary_size, window=desc,
            certified_disproof=False, points=frozenset(U),
        )

    if window is not None:
        pool = [p for p in space.sort_points(window) if _in_gamma(gamma, p)]
        if not pool:
            raise PreconditionError("window contains no lattice points")
        if len(pool) <= exhaustive_cap:
            desc = _window_description(space, pool, "exhaustive")
            for combo in _subset_stream(pool):
                ratio, bsize = boundary_ratio(frozenset(combo))
                if ratio < delta:
                    return found(combo, bsize, desc)
            return BwResult(
                r=r, delta=delta, verdict="no-witness-in-window",
                witness=None, witness_size=None, boundary_size=None,
                window=desc, certified_disproof=True, points=None,
            )
        desc = _window_description(space, pool, "nested-balls+greedy")
        seeds = list(seeds) if seeds else [space.base_point]
        best = None
        for A in _nested_ball_candidates(space, seeds, window=pool,
                                         max_steps=max_steps, max_points=max_points):
            U = frozenset(p for p in A if _in_gamma(gamma, p))
            if not U:
                continue
            ratio, bsize = boundary_ratio(U)
            if ratio < delta:
                return found(U, bsize, desc)
            if best is None or ratio < best[0]:
                best = (ratio, U)
        if best is not None:
            score = lambda U: boundary_ratio(U)[0]
            improved, _ = _greedy_minimize(space, score, best[1], pool, max_rounds=20)
            ratio, bsize = boundary_ratio(improved)
            if ratio < delta:
                return found(improved, bsize, desc)
        return BwResult(
            r=r, delta=delta, verdict="no-witness-in-window",
            witness=None, witness_size=None, boundary_size=None,
            window=desc, certified_disproof=False, points=None,
        )

    seeds = list(seeds) if seeds else [space.base_point]
    desc = f"nested balls around {[space.point_label(s) for s in seeds]}, max_steps={max_steps}"
    for A in _nested_ball_candidates(space, seeds, max_steps=max_steps,
                                     max_points=max_points):
        U = frozenset(p for p in A if _in_gamma(gamma, p))
        if not U:
            continue
        ratio, bsize = boundary_ratio(U)
        if ratio < delta:
            return found(U, bsize, desc)
    return BwResult(
        r=r, delta=delta, verdict="budget-exhausted",
        witness=None, witness_size=None, boundary_size=None,
        window=desc, certified_disproof=False, points=None,
    )
