"""Shared numeric oracles and generators for the test suite.

Everything here is deliberately independent of the production algorithms:
dense sampling, brute-force enumeration, and direct numerical integration.
Slower and cruder, but with failure modes unrelated to the code under test.
"""

from __future__ import annotations

import math
import random
from typing import Callable, List, Optional, Sequence, Tuple

from cdtw.curves import Curve, build_curve, height, point_at


# ---------------------------------------------------------------------------
# random instances


def random_values(
    rng: random.Random, n: int, lo: float = 0.0, hi: float = 2.0
) -> List[float]:
    """n values with distinct consecutive entries (valid curve input)."""
    vals = [rng.uniform(lo, hi)]
    while len(vals) < n:
        v = rng.uniform(lo, hi)
        if abs(v - vals[-1]) > 1e-3:
            vals.append(v)
    return vals


def random_curve(rng: random.Random, n: int, lo: float = 0.0, hi: float = 2.0) -> Curve:
    return build_curve(random_values(rng, n, lo, hi))


# ---------------------------------------------------------------------------
# numeric integration of the height along paths


def integrate_height_on_leg(
    P: Curve,
    Q: Curve,
    a: Tuple[float, float],
    b: Tuple[float, float],
    samples: int = 512,
) -> float:
    """Integral of h along the straight leg a -> b, in L1 arc length.

    Uses midpoint sampling; exact enough at the default density for the
    1e-6-relative certificates because h is piecewise linear along any
    straight leg.
    """
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    length = abs(dx) + abs(dy)
    if length == 0.0:
        return 0.0
    total = 0.0
    for k in range(samples):
        t = (k + 0.5) / samples
        total += height(P, Q, a[0] + t * dx, a[1] + t * dy)
    return total * length / samples


def path_cost(
    P: Curve,
    Q: Curve,
    points: Sequence[Tuple[float, float]],
    samples_per_leg: int = 512,
) -> float:
    """Numerically integrate h along a polyline path in parameter space."""
    total = 0.0
    for a, b in zip(points, points[1:]):
        total += integrate_height_on_leg(P, Q, a, b, samples_per_leg)
    return total


def random_staircase(
    rng: random.Random,
    start: Tuple[float, float],
    end: Tuple[float, float],
    steps: int = 12,
) -> List[Tuple[float, float]]:
    """Random monotone axis-parallel staircase from start to end."""
    xs = sorted(rng.uniform(start[0], end[0]) for _ in range(steps))
    ys = sorted(rng.uniform(start[1], end[1]) for _ in range(steps))
    pts = [start]
    for x, y in zip(xs, ys):
        # Alternate horizontal/vertical moves through the waypoint.
        pts.append((x, pts[-1][1]))
        pts.append((x, y))
    pts.append((end[0], pts[-1][1]))
    pts.append(end)
    return pts


# ---------------------------------------------------------------------------
# closed-form through-cost inside one cell (independent of the solver)


def cell_through_cost(
    cell_offset: float,
    same_direction: bool,
    a: Tuple[float, float],
    b: Tuple[float, float],
) -> float:
    """Optimal cost of any monotone path from a to b inside one cell.

    For same-direction cells (h = |x - y - c|) write u = x - y - c and
    z = x + y; along any monotone path z increases at unit L1 speed and u
    may change at rate at most 1, so the problem is: minimise the integral
    of |u| over z with |du/dz| <= 1.  The optimum dips towards u = 0 as
    fast as allowed, giving

        cost = (u_a^2 + u_b^2) / 2 - m^2,
        m = max(0, (|u_a| + |u_b| - dz) / 2).

    For opposite-direction cells (h = |x + y - c'|) the height along every
    monotone path is the same function of z, so the cost is the fixed
    integral of |z - c'| between the endpoints.
    """
    if b[0] < a[0] - 1e-12 or b[1] < a[1] - 1e-12:
        raise ValueError("b must dominate a componentwise")
    if same_direction:
        ua = a[0] - a[1] - cell_offset
        ub = b[0] - b[1] - cell_offset
        dz = (b[0] + b[1]) - (a[0] + a[1])
        m = max(0.0, (abs(ua) + abs(ub) - dz) / 2.0)
        return (ua * ua + ub * ub) / 2.0 - m * m

    def s_halfsq(u: float) -> float:
        return u * abs(u) / 2.0

    ua = a[0] + a[1] - cell_offset
    ub = b[0] + b[1] - cell_offset
    return s_halfsq(ub) - s_halfsq(ua)


# ---------------------------------------------------------------------------
# dense-sampling oracles for piecewise functions


def dense_min(
    funcs: Sequence[Callable[[float], float]], lo: float, hi: float, n: int = 1000
) -> List[Tuple[float, float]]:
    """(s, min over funcs at s) at n uniform samples."""
    out = []
    for k in range(n):
        s = lo + (hi - lo) * (k + 0.5) / n
        out.append((s, min(f(s) for f in funcs)))
    return out


def numeric_cumulative_min(
    f: Callable[[float], float], lo: float, hi: float, t: float, n: int = 4000
) -> float:
    """min over s in [lo, t] of f(s) via dense sampling."""
    best = f(t)
    span = t - lo
    for k in range(n + 1):
        s = lo + span * k / n
        v = f(s)
        if v < best:
            best = v
    return best


def quad_min_on(a: float, b: float, c: float, lo: float, hi: float) -> float:
    """Exact minimum of a*s^2 + b*s + c on [lo, hi]."""
    cands = [lo, hi]
    if a > 0:
        v = -b / (2.0 * a)
        if lo < v < hi:
            cands.append(v)
    return min((a * s + b) * s + c for s in cands)


def pwq_prefix_min(pieces, t: float) -> float:
    """Exact min over s <= t of a piecewise quadratic given as objects with
    a, b, c, lo, hi attributes (closed-form per-piece minima, no sampling)."""
    best = math.inf
    for p in pieces:
        if p.lo > t:
            continue
        hi = min(p.hi, t)
        if hi < p.lo:
            continue
        best = min(best, quad_min_on(p.a, p.b, p.c, p.lo, hi))
    return best


def numeric_integral(f: Callable[[float], float], lo: float, hi: float, n: int = 4000) -> float:
    """Midpoint-rule integral, for validating closed-form integrals."""
    if hi <= lo:
        return 0.0
    h = (hi - lo) / n
    return h * sum(f(lo + (k + 0.5) * h) for k in range(n))


# ---------------------------------------------------------------------------
# brute-force alignment enumeration (DTW / discrete Frechet ground truth)


def enumerate_alignments(n: int, m: int) -> List[List[Tuple[int, int]]]:
    """All monotone alignments of [0..n-1] and [0..m-1] with step moves
    (1,0), (0,1), (1,1), starting at (0,0) and ending at (n-1, m-1)."""
    out: List[List[Tuple[int, int]]] = []

    def rec(i: int, j: int, acc: List[Tuple[int, int]]) -> None:
        if i == n - 1 and j == m - 1:
            out.append(list(acc))
            return
        if i + 1 < n:
            acc.append((i + 1, j))
            rec(i + 1, j, acc)
            acc.pop()
        if j + 1 < m:
            acc.append((i, j + 1))
            rec(i, j + 1, acc)
            acc.pop()
        if i + 1 < n and j + 1 < m:
            acc.append((i + 1, j + 1))
            rec(i + 1, j + 1, acc)
            acc.pop()

    rec(0, 0, [(0, 0)])
    return out


def brute_dtw(p: Sequence[float], q: Sequence[float]) -> float:
    best = math.inf
    for al in enumerate_alignments(len(p), len(q)):
        cost = sum(abs(p[i] - q[j]) for i, j in al)
        best = min(best, cost)
    return best


def brute_discrete_frechet(p: Sequence[float], q: Sequence[float]) -> float:
    best = math.inf
    for al in enumerate_alignments(len(p), len(q)):
        cost = max(abs(p[i] - q[j]) for i, j in al)
        best = min(best, cost)
    return best
