"""Zoom constants (local expansion seen by an observer) and growth rates.

The zoom profile at x tracks the ratios |dN_nk(x)| / |dN_(n-1)k(x)| of a
step-by-step observer.  Infima are approximated by running minima and
limsups by a tail-window supremum; both are horizon-scoped estimates,
never claims about the limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .spaces import SpaceHandle, bfs_ball_sizes, distance_levels

EXPONENTIAL_MARGIN = 0.05  # nth roots must clear 1 + margin over the tail
POLY_SLOPE_DRIFT = 0.1  # max log-log slope wobble for a polynomial verdict


@dataclass(frozen=True)
class ZoomProfile:
    """Cardinality ratios of the nested discrete neighborhoods of a point."""

    space_id: str
    base_point: str
    k: int
    sizes: tuple[int, ...]  # |dN_{nk}(x)| for n = 0..horizon
    ratios: tuple[Fraction, ...]
    running_inf: tuple[Fraction, ...]
    tail_sup: Fraction
    tail_window: int
    horizon: int
    exhausted: bool


def zoom_profile(space: SpaceHandle, x, k: int, horizon: int,
                 tail_window: int | None = None) -> ZoomProfile:
    """Ratios |dN_nk(x)|/|dN_(n-1)k(x)| for n = 1..horizon around x."""
    if k < 1:
        raise PreconditionError("k must be at least 1")
    if horizon < 1:
        raise PreconditionError("horizon must be at least 1")
    levels = distance_levels(space, {x}, k * horizon)
    cumulative = []
    total = 0
    for members in levels.members:
        total += len(members)
        cumulative.append(total)
    # Finite spaces may run out of levels; the ball then stops growing.
    sizes = []
    for n in range(horizon + 1):
        idx = min(n * k, len(cumulative) - 1)
        sizes.append(cumulative[idx])
    ratios = tuple(Fraction(b, a) for a, b in zip(sizes, sizes[1:]))
    running = []
    best = None
    for r in ratios:
        best = r if best is None or r < best else best
        running.append(best)
    if tail_window is None:
        tail_window = max(1, math.ceil(horizon / 3))
    tail = ratios[-tail_window:]
    return ZoomProfile(
        space_id=space.id,
        base_point=space.point_label(x),
        k=k,
        sizes=tuple(sizes),
        ratios=ratios,
        running_inf=tuple(running),
        tail_sup=max(tail),
        tail_window=tail_window,
        horizon=horizon,
        exhausted=levels.exhausted,
    )


@dataclass(frozen=True)
class ZoomSummary:
    """Suprema of the per-point zoom estimates over the provided profiles."""

    per_point: tuple  # (label, zeta_lower, zeta_tail)
    zeta_lower_plus: Fraction
    zeta_tail_plus: Fraction
    ks: tuple[int, ...]
    horizon: int
    window: str


def zoom_aggregate(profiles) -> ZoomSummary:
    """Combine zoom profiles over k and x into the sup-style constants.

    zeta_lower(x) is the sup over the provided k of the final running
    infimum; the plus versions take the sup over the provided points.  All
    values inherit the horizons of the inputs.
    """
    profiles = list(profiles)
    if not profiles:
        raise PreconditionError("need at least one profile")
    by_point: dict[str, list[ZoomProfile]] = {}
    for p in profiles:
        by_point.setdefault(p.base_point, []).append(p)
    per_point = []
    for label in sorted(by_point):
        group = by_point[label]
        zeta_lower = max(p.running_inf[-1] for p in group)
        zeta_tail = max(p.tail_sup for p in group)
        per_point.append((label, zeta_lower, zeta_tail))
    ks = tuple(sorted({p.k for p in profiles}))
    horizon = min(p.horizon for p in profiles)
    return ZoomSummary(
        per_point=tuple(per_point),
        zeta_lower_plus=max(z for _, z, _t in per_point),
        zeta_tail_plus=max(t for _, _z, t in per_point),
        ks=ks,
        horizon=horizon,
        window=f"{len(per_point)} points, k in {list(ks)}, horizon {horizon}",
    )


# -- growth classification ---------------------------------------------------


@dataclass(frozen=True)
class GrowthClassification:
    """Polynomial/exponential verdict for a Cayley-type space at a horizon."""

    ball_sizes: tuple[int, ...]
    nth_roots: tuple[float, ...]
    verdict: str  # "polynomial", "exponential", "undetermined"
    degree_estimate: float | None
    rate_estimate: float | None
    degenerate: bool
    evidence: dict
    zeta_check: dict
    horizon: int


def _least_squares_slope(xs, ys) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    den = sum((a - mx) ** 2 for a in xs)
    return num / den if den else 0.0


def growth_classify(space: SpaceHandle, horizon: int,
                    max_points: int = 2_000_000) -> GrowthClassification:
    """Classify word-metric ball growth as polynomial or exponential.

    Needs a unit-step space with a base point.  Polynomial means the
    log-log slope is stable over the tail; exponential means the nth roots
    of the ball sizes stay clear of 1.  Both thresholds separate lattices
    from free groups at desk scale without pretending to see asymptotics.
    The zoom consistency fields are reported, not enforced.  The breadth
    first walk stops loudly at ``max_points``.
    """
    if not space.unit_graph or space.base_point is None:
        raise PreconditionError(
            "growth classification needs a unit-step space with a base point")
    if horizon < 4:
        raise PreconditionError("horizon too small for a stable fit")
    sizes = bfs_ball_sizes(space, horizon, max_points=max_points)
    nth_roots = tuple(sizes[n] ** (1.0 / n) for n in range(1, horizon + 1))

    ratios = [Fraction(b, a) for a, b in zip(sizes, sizes[1:])]
    tail_third = max(1, math.ceil(horizon / 3))
    zeta_check = {
        "zeta_lower_estimate": float(min(ratios)),
        "zeta_tail_sup": float(max(ratios[-tail_third:])),
    }

    degenerate = sizes[-1] == sizes[-min(4, horizon)]
    if degenerate:
        return GrowthClassification(
            ball_sizes=tuple(sizes), nth_roots=nth_roots, verdict="undetermined",
            degree_estimate=None, rate_estimate=None, degenerate=True,
            evidence={"reason": "ball sizes saturated within the horizon"},
            zeta_check=zeta_check, horizon=horizon,
        )

    # Log-log slopes over the tail half.
    tail_start = max(2, horizon // 2)
    slopes = [
        (math.log(sizes[n]) - math.log(sizes[n - 1]))
        / (math.log(n) - math.log(n - 1))
        for n in range(tail_start, horizon + 1)
    ]
    drift = max(slopes) - min(slopes)
    xs = [math.log(n) for n in range(tail_start, horizon + 1)]
    ys = [math.log(sizes[n]) for n in range(tail_start, horizon + 1)]
    degree = _least_squares_slope(xs, ys)

    sphere = [sizes[n] - sizes[n - 1] for n in range(1, horizon + 1)]
    sphere_ratios = [
        sphere[n] / sphere[n - 1]
        for n in range(1, len(sphere))
        if sphere[n - 1] > 0
    ]
    rate = (
        sum(sphere_ratios[-tail_third:]) / len(sphere_ratios[-tail_third:])
        if sphere_ratios
        else None
    )

    evidence = {
        "loglog_slope_drift": drift,
        "tail_start": tail_start,
        "nth_root_tail_min": min(nth_roots[-tail_third:]),
    }

    if drift < POLY_SLOPE_DRIFT:
        verdict, degree_est, rate_est = "polynomial", degree, None
    elif min(nth_roots[-tail_third:]) >= 1 + EXPONENTIAL_MARGIN:
        verdict, degree_est, rate_est = "exponential", None, rate
    else:
        verdict, degree_est, rate_est = "undetermined", None, None

    return GrowthClassification(
        ball_sizes=tuple(sizes),
        nth_roots=nth_roots,
        verdict=verdict,
        degree_estimate=degree_est,
        rate_estimate=rate_est,
        degenerate=False,
        evidence=evidence,
        zeta_check=zeta_check,
        horizon=horizon,
    )
