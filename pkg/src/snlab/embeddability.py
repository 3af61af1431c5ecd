"""Hilbert embeddability certificates, ball growth, covering and doubling.

A finite metric space embeds isometrically into a Hilbert space exactly
when the Gram-style matrix built from squared distances around a base
point is positive semidefinite.  For the tiny instances that matter here
(tripods and semi-tripods) the verdict is additionally confirmed in exact
rational arithmetic via principal minors, which removes any floating-point
doubt precisely where it would be embarrassing.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import MetricViolationError, PreconditionError
from .spaces import SpaceHandle, discrete_neighborhood, distance_levels

POLY_FIT_GRID = [Fraction(i, 4) for i in range(1, 33)]  # 0.25 .. 8.0


# -- Schoenberg-style embeddability test ---------------------------------------


@dataclass(frozen=True)
class GramCheckResult:
    """PSD verdict for the base-point Gram matrix of a finite metric."""

    base_point: str
    labels: tuple[str, ...]
    gram: tuple
    min_eigenvalue: float
    verdict: str  # "embeddable", "not-embeddable", "marginal"
    exact_check: str  # "confirms-psd", "confirms-not-psd", "skipped"
    tolerance: float


def _as_matrix(points, distance):
    n = len(points)
    if callable(distance):
        return [[distance(points[i], points[j]) for j in range(n)] for i in range(n)]
    m = [list(row) for row in distance]
    if len(m) != n or any(len(row) != n for row in m):
        raise PreconditionError("distance matrix shape mismatch")
    return m


def _check_metric(labels, m):
    n = len(labels)
    for i in range(n):
        if m[i][i] != 0:
            raise MetricViolationError(f"d(x,x) != 0 at {labels[i]}", (labels[i],))
        for j in range(i + 1, n):
            if m[i][j] != m[j][i]:
                raise MetricViolationError("asymmetric distance", (labels[i], labels[j]))
            if m[i][j] <= 0:
                raise MetricViolationError(
                    "distinct points at nonpositive distance", (labels[i], labels[j]))
    for i, j, k in itertools.permutations(range(n), 3):
        if m[i][k] > m[i][j] + m[j][k]:
            raise MetricViolationError(
                "triangle inequality fails", (labels[i], labels[j], labels[k]))


def _det(mat) -> Fraction:
    # Fraction-exact determinant by Laplace expansion; matrices here are
    # at most 5x5.
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = Fraction(0)
    for j in range(n):
        if mat[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        sign = -1 if j % 2 else 1
        total += sign * mat[0][j] * _det(minor)
    return total


def _exact_psd_check(gram) -> str:
    """PSD iff every principal minor is nonnegative (symmetric matrices)."""
    n = len(gram)
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            sub = [[gram[i][j] for j in subset] for i in subset]
            if _det(sub) < 0:
                return "confirms-not-psd"
    return "confirms-psd"


def schoenberg_test(points, distance, tolerance: float = 1e-8) -> GramCheckResult:
    """Certify isometric Hilbert embeddability of a finite metric.

    ``points`` fixes the canonical order; the first point is the Gram base.
    ``distance`` is a callable or a full symmetric matrix.  For exact
    rational inputs with at most six points the float verdict is replaced
    by an exact principal-minor decision; "marginal" is reserved for the
    disagreement zone where the exact check finds a violation too small for
    the float tolerance to see.
    """
    points = list(points)
    if len(points) < 2:
        raise PreconditionError("need at least two points")
    labels = tuple(str(p) for p in points)
    m = _as_matrix(points, distance)
    _check_metric(labels, m)

    n = len(points)
    exact_inputs = all(
        isinstance(m[i][j], (int, Fraction)) for i in range(n) for j in range(n)
    )
    gram = [
        [
            (m[0][i] ** 2 + m[0][j] ** 2 - m[i][j] ** 2) / (2 if not exact_inputs else Fraction(2))
            for j in range(1, n)
        ]
        for i in range(1, n)
    ]

    arr = np.array([[float(x) for x in row] for row in gram], dtype=float)
    eigenvalues = np.linalg.eigvalsh(arr)
    min_eig = float(eigenvalues[0])
    scale = max(1.0, float(np.max(np.abs(arr))))
    threshold = tolerance * scale

    exact_check = "skipped"
    if exact_inputs and n <= 6:
        exact_check = _exact_psd_check(gram)

    if exact_check == "confirms-psd":
        verdict = "embeddable"
    elif exact_check == "confirms-not-psd":
        verdict = "not-embeddable" if min_eig < -threshold else "marginal"
    else:
        verdict = "not-embeddable" if min_eig < -threshold else "embeddable"

    return GramCheckResult(
        base_point=labels[0],
        labels=labels,
        gram=tuple(tuple(row) for row in gram),
        min_eigenvalue=min_eig,
        verdict=verdict,
        exact_check=exact_check,
        tolerance=tolerance,
    )


def schoenberg_test_space(space, tolerance: float = 1e-8) -> GramCheckResult:
    """Run the embeddability test on an explicit finite metric space."""
    if not getattr(space, "is_finite", False):
        raise PreconditionError("embeddability certificates need a finite space")
    return schoenberg_test(space.points, space.distance, tolerance=tolerance)


# -- ball growth profiles --------------------------------------------------------


@dataclass(frozen=True)
class BallGrowthProfile:
    """The radii where the ball around x strictly grows, with cardinalities.

    ``radii`` lists the distinct positive distances from x in order (with
    closed balls those are exactly the growth radii); ``dyadic_counts``
    counts radii in each closed band [2^r, 2^(r+1)]; ``poly_fit`` is the
    smallest grid exponent C with r_n <= n^C for every computed n, or None
    when no grid value works within the horizon.
    """

    base_point: str
    radii: tuple
    counts: tuple[int, ...]
    dyadic_counts: tuple
    poly_fit: float | None
    horizon: int
    exhausted: bool


def _dyadic_band_range(value):
    """All integers r with 2^r <= value <= 2^(r+1), by exact comparison."""
    assert value > 0
    r = 0
    if value >= 1:
        while _pow2(r + 1) <= value:
            r += 1
    else:
        while _pow2(r) > value:
            r -= 1
    bands = [r]
    if value == _pow2(r + 1):
        bands.append(r + 1)
    return bands


def _pow2(r: int):
    return 2**r if r >= 0 else Fraction(1, 2 ** (-r))


def ball_growth_profile(space: SpaceHandle, x, horizon: int) -> BallGrowthProfile:
    """First ``horizon`` growth radii around x with ball sizes and diagnostics."""
    if horizon < 1:
        raise PreconditionError("horizon must be positive")
    levels = distance_levels(space, {x}, horizon)
    radii = levels.levels[1:]
    counts = []
    total = 0
    for members in levels.members:
        total += len(members)
        counts.append(total)
    counts = counts[1:]

    bands: dict[int, int] = {}
    for r_value in radii:
        for band in _dyadic_band_range(r_value):
            bands[band] = bands.get(band, 0) + 1

    fit = None
    for c in POLY_FIT_GRID:
        c_float = float(c)
        ok = True
        for n, r_value in enumerate(radii, start=1):
            if n == 1:
                if r_value > 1:
                    ok = False
                    break
            elif float(r_value) > n**c_float:
                ok = False
                break
        if ok:
            fit = c_float
            break

    return BallGrowthProfile(
        base_point=space.point_label(x),
        radii=radii,
        counts=tuple(counts),
        dyadic_counts=tuple(sorted(bands.items())),
        poly_fit=fit,
        horizon=horizon,
        exhausted=levels.exhausted,
    )


# -- covering and packing ---------------------------------------------------------


@dataclass(frozen=True)
class CoverEstimate:
    """Greedy cover and packing numbers for B(x, 2t) at scale t.

    The greedy cover (largest-marginal-coverage rule) upper-bounds the
    minimal number of t-balls covering B(x, 2t); the farthest-first packing
    (pairwise distances > 2t) lower-bounds it.
    """

    center: str
    t: object
    greedy_cover_size: int
    packing_size: int
    ball_size: int
    ratio_to_ball: float


def covering_estimate(space: SpaceHandle, x, t) -> CoverEstimate:
    """Deterministic cover/packing estimates for the doubling diagnostics."""
    if t <= 0:
        raise PreconditionError("t must be positive")
    ball = space.sort_points(space.enumerate_within({x}, 2 * t))
    n = len(ball)
    index = {p: i for i, p in enumerate(ball)}

    masks_t = [0] * n
    masks_2t = [0] * n
    dist_from_x = [space.distance(x, p) for p in ball]
    for i in range(n):
        for j in range(i, n):
            d = space.distance(ball[i], ball[j])
            if d <= t:
                masks_t[i] |= 1 << j
                masks_t[j] |= 1 << i
            if d <= 2 * t:
                masks_2t[i] |= 1 << j
                masks_2t[j] |= 1 << i

    uncovered = (1 << n) - 1
    cover = 0
    while uncovered:
        best_i = None
        best_gain = -1
        for i in range(n):
            gain = (masks_t[i] & uncovered).bit_count()
            if gain > best_gain:
                best_gain = gain
                best_i = i
        uncovered &= ~masks_t[best_i]
        cover += 1

    # Farthest-first order; the stable sort breaks distance ties by the
    # canonical point order of the ball.
    order = sorted(range(n), key=lambda i: dist_from_x[i], reverse=True)
    chosen = 0
    packing = 0
    for i in order:
        if masks_2t[i] & chosen == 0:
            chosen |= 1 << i
            packing += 1

    return CoverEstimate(
        center=space.point_label(x),
        t=t,
        greedy_cover_size=cover,
        packing_size=packing,
        ball_size=n,
        ratio_to_ball=cover / n if n else 0.0,
    )


# -- uniform bounded geometry ------------------------------------------------------


@dataclass(frozen=True)
class UBGReport:
    """Sampled ball-cardinality ratios |B(x,r)| / |B(y,r)|."""

    rows: tuple  # (label, r, ball_size)
    max_ratio: Fraction
    constant_estimate: Fraction
    window: str


def ubg_report(space: SpaceHandle, sample_points, radii) -> UBGReport:
    """Window-scoped estimate of the uniform bounded geometry constant."""
    pts = space.sort_points(sample_points)
    if not pts or not radii:
        raise PreconditionError("need sample points and radii")
    rows = []
    max_ratio = Fraction(1)
    for r in radii:
        sizes = []
        for p in pts:
            size = len(space.enumerate_within({p}, r))
            sizes.append(size)
            rows.append((space.point_label(p), r, size))
        ratio = Fraction(max(sizes), min(sizes))
        max_ratio = max(max_ratio, ratio)
    return UBGReport(
        rows=tuple(rows),
        max_ratio=max_ratio,
        constant_estimate=max_ratio,
        window=f"{len(pts)} sample points, radii {list(radii)}",
    )


# -- growth vs doubling: the finite-dimensional obstruction as data ---------------


@dataclass(frozen=True)
class DyadicBandRow:
    """One dyadic band of the expansion-versus-covering comparison.

    ``expansion_min`` is the smallest |dN_k(B)| / |B| over the growth balls
    whose radii fall in [2^r, 2^(r+1)]; ``cover_bound`` is the product of
    the greedy cover size at scale 2^r with the sampled ball-size maximum,
    which caps |B(x, 2^(r+1))| for doubling spaces.
    """

    r: int
    band_count: int
    expansion_min: Fraction | None
    k_r_surrogate: int
    cover_greedy: int
    cover_packing: int
    next_ball: int
    cover_bound: int


@dataclass(frozen=True)
class SnVsDoublingReport:
    base_point: str
    k: int
    rows: tuple[DyadicBandRow, ...]
    window: str


def sn_vs_doubling_report(space: SpaceHandle, x, r_range, k: int = 1,
                          sample_centers=None) -> SnVsDoublingReport:
    """Juxtapose ball expansion against covering bounds per dyadic band.

    For a space without small-neighborhood witnesses the left column grows
    like (1+eps)^s with the band count s, while a doubling space caps the
    same quantity linearly; watching both columns is the entire
    contradiction mechanism rendered as data.
    """
    r_values = list(r_range)
    if not r_values:
        raise PreconditionError("empty dyadic range")
    top = 2 ** (max(r_values) + 1)
    centers = list(sample_centers) if sample_centers else [x]

    # One enumeration at the top radius gives every growth radius up to it;
    # anything more would enumerate balls the caller never asked about.
    region = space.region_distances({x}, top)
    by_value: dict = {}
    for p, d in region.items():
        by_value.setdefault(d, set()).add(p)
    values = sorted(by_value)
    radii = [v for v in values if v > 0]
    balls = []
    acc: set = set()
    for v in values:
        acc |= by_value[v]
        if v > 0:
            balls.append(frozenset(acc))

    rows = []
    for r in r_values:
        lo, hi = 2**r, 2 ** (r + 1)
        in_band = [i for i, rv in enumerate(radii) if lo <= rv <= hi]
        expansion = None
        for i in in_band:
            ball = balls[i]
            ratio = Fraction(len(discrete_neighborhood(space, ball, k).dn), len(ball))
            if expansion is None or ratio < expansion:
                expansion = ratio
        k_r = max(len(space.enumerate_within({c}, lo)) for c in centers)
        cover = covering_estimate(space, x, lo)
        next_ball = sum(1 for d in region.values() if d <= hi)
        rows.append(DyadicBandRow(
            r=r,
            band_count=len(in_band),
            expansion_min=expansion,
            k_r_surrogate=k_r,
            cover_greedy=cover.greedy_cover_size,
            cover_packing=cover.packing_size,
            next_ball=next_ball,
            cover_bound=cover.greedy_cover_size * k_r,
        ))
    return SnVsDoublingReport(
        base_point=space.point_label(x),
        k=k,
        rows=tuple(rows),
        window=f"dyadic r in {r_values}, centers {[space.point_label(c) for c in centers]}",
    )
