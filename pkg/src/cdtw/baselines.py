"""Reference measures: discrete DTW, discrete Frechet distance, and a
sampled-grid approximation of the continuous warping distance.

The grid oracle restricts alignment paths to a lattice and uses exact
closed-form integrals of the height along each lattice edge, so its value
is always an upper bound on the continuous optimum and its only error is
discretisation.  Per-segment subdivision counts are rounded up to powers
of two, which makes every coarse lattice an exact subgraph of any lattice
whose resolution is a power-of-two multiple (diagonal edges included,
because each coarse diagonal is a chain of finer diagonals on the same
straight line).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .curves import Curve
from .errors import EmptyInput, ResolutionZero, TooLarge


def dtw(p_vertices: Sequence[float], q_vertices: Sequence[float]) -> float:
    """Discrete dynamic time warping: min over monotone vertex alignments
    of the summed pointwise distances."""
    if len(p_vertices) == 0 or len(q_vertices) == 0:
        raise EmptyInput("dtw needs nonempty vertex lists")
    n, m = len(p_vertices), len(q_vertices)
    inf = float("inf")
    prev = [inf] * m
    for i in range(n):
        cur = [inf] * m
        for j in range(m):
            c = abs(p_vertices[i] - q_vertices[j])
            if i == 0 and j == 0:
                best = 0.0
            else:
                best = inf
                if i > 0:
                    best = min(best, prev[j], prev[j - 1] if j > 0 else inf)
                if j > 0:
                    best = min(best, cur[j - 1])
            cur[j] = c + best
        prev = cur
    return prev[m - 1]


def discrete_frechet(p_vertices: Sequence[float], q_vertices: Sequence[float]) -> float:
    """Discrete Frechet distance: min over monotone vertex alignments of
    the maximum pointwise distance."""
    if len(p_vertices) == 0 or len(q_vertices) == 0:
        raise EmptyInput("discrete_frechet needs nonempty vertex lists")
    n, m = len(p_vertices), len(q_vertices)
    inf = float("inf")
    prev = [inf] * m
    for i in range(n):
        cur = [inf] * m
        for j in range(m):
            c = abs(p_vertices[i] - q_vertices[j])
            if i == 0 and j == 0:
                best = 0.0
            else:
                best = inf
                if i > 0:
                    best = min(best, prev[j], prev[j - 1] if j > 0 else inf)
                if j > 0:
                    best = min(best, cur[j - 1])
            cur[j] = max(c, best)
        prev = cur
    return prev[m - 1]


@dataclass(frozen=True)
class GridConfig:
    """Lattice density for the sampled approximation.

    resolution counts lattice points per unit of arc length before
    rounding each segment's subdivision up to a power of two; moves lists
    the admissible steps between adjacent lattice nodes.
    """

    resolution: int
    moves: Tuple[str, ...] = ("right", "up", "diagonal")


def _pow2_at_least(x: float) -> int:
    k = 1
    while k < x - 1e-12:
        k *= 2
    return k


def _axis_ticks(curve: Curve, res: float, pow2: bool) -> np.ndarray:
    parts: List[np.ndarray] = [np.zeros(1)]
    for i in range(1, curve.num_segments + 1):
        lo, hi = curve.prefix_lengths[i - 1], curve.prefix_lengths[i]
        w = hi - lo
        if pow2:
            k = _pow2_at_least(w * res)
        else:
            k = max(1, int(np.ceil(w * res - 1e-12)))
        parts.append(np.linspace(lo, hi, k + 1)[1:])
    return np.concatenate(parts)


def _seg_weight(a0: np.ndarray, a1: np.ndarray, length) -> np.ndarray:
    """Exact integral of |linear| along a segment with endpoint signed
    heights a0, a1 and L1 length given."""
    s = np.abs(a0) + np.abs(a1)
    same = a0 * a1 >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        crossing = (a0 * a0 + a1 * a1) / (2.0 * s)
    crossing = np.where(s > 0, crossing, 0.0)
    return length * np.where(same, 0.5 * s, crossing)


def _lattice_value(P: Curve, Q: Curve, xs: np.ndarray, ys: np.ndarray) -> float:
    """Shortest monotone path value on the lattice, column by column."""
    pv = np.interp(xs, P.prefix_lengths, P.vertices)
    qv = np.interp(ys, Q.prefix_lengths, Q.vertices)
    dy = np.diff(ys)
    m = len(ys)

    h_left = pv[0] - qv
    w_up = _seg_weight(h_left[:-1], h_left[1:], dy)
    cum_up = np.concatenate(([0.0], np.cumsum(w_up)))
    cand = np.full(m, np.inf)
    cand[0] = 0.0
    dp = cum_up + np.minimum.accumulate(cand - cum_up)

    for a in range(len(xs) - 1):
        h_right = pv[a + 1] - qv
        dx = xs[a + 1] - xs[a]
        w_h = _seg_weight(h_left, h_right, dx)
        w_d = _seg_weight(h_left[:-1], h_right[1:], dx + dy)
        cand = dp + w_h
        cand[1:] = np.minimum(cand[1:], dp[:-1] + w_d)
        w_up = _seg_weight(h_right[:-1], h_right[1:], dy)
        cum_up = np.concatenate(([0.0], np.cumsum(w_up)))
        dp = cum_up + np.minimum.accumulate(cand - cum_up)
        h_left = h_right
    return float(dp[-1])


def cdtw_grid(P: Curve, Q: Curve, cfg: GridConfig) -> float:
    """Sampled-grid approximation of the continuous warping distance.

    Always >= the exact value (grid paths are a subset of all monotone
    paths) and nonincreasing as the resolution grows through powers of
    two times the same base.
    """
    if cfg.resolution < 1:
        raise ResolutionZero(f"resolution must be >= 1, got {cfg.resolution}")
    xs = _axis_ticks(P, float(cfg.resolution), pow2=True)
    ys = _axis_ticks(Q, float(cfg.resolution), pow2=True)
    return _lattice_value(P, Q, xs, ys)


def cdtw_bruteforce_small(P: Curve, Q: Curve, segments: int) -> float:
    """Independent fine-lattice oracle for tiny instances.

    Uses a uniform staircase lattice with the given subdivisions per unit
    of arc length; no power-of-two rounding, no shared configuration with
    the main grid entry point beyond the lattice solver itself.
    """
    if len(P.vertices) > 4 or len(Q.vertices) > 4:
        raise TooLarge("bruteforce oracle accepts at most 4 vertices per curve")
    if segments > 2048:
        raise TooLarge("bruteforce oracle accepts at most 2048 segments per unit")
    if segments < 1:
        raise ResolutionZero(f"segments must be >= 1, got {segments}")
    xs = _axis_ticks(P, float(segments), pow2=False)
    ys = _axis_ticks(Q, float(segments), pow2=False)
    return _lattice_value(P, Q, xs, ys)
