"""Dynamic program over the whole parameter space.

Cells are solved in nondecreasing level order (level = i + j), so both
input edges of a cell are ready when it is visited.  The final distance is
the boundary cost at the top-right corner, read from both output edges of
the last cell and cross-checked.  Per-piece provenance collected during
propagation supports exact path reconstruction by backtracking.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .curves import Cell, Curve, cell_info
from .errors import InvariantViolation, ProvenanceMissing
from . import piecewise as pw
from .propagation import (
    BoundaryCost,
    CellRecord,
    Prov,
    base_case,
    solve_cell,
)

# Bucket width for counting distinct leading-coefficient pairs; exact float
# equality would fragment counts meaninglessly.
AB_BUCKET = 1e-7


@dataclass
class EngineConfig:
    record_path: bool = True
    validate: bool = False


@dataclass
class SolveStats:
    """Piece-count bookkeeping for the complexity bounds.

    total_pieces counts quadratic pieces over all edge cost functions;
    pieces_per_level groups them by cell level (base-case edges count
    towards the level of the only cell they feed).
    """

    total_pieces: int = 0
    pieces_per_level: Dict[int, int] = field(default_factory=dict)
    max_distinct_ab_per_edge: Dict[str, int] = field(default_factory=dict)
    wall_time: float = 0.0
    cells_solved: int = 0
    flags: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "total_pieces": self.total_pieces,
            "pieces_per_level": {str(k): v for k, v in sorted(self.pieces_per_level.items())},
            "max_distinct_ab_per_edge": dict(sorted(self.max_distinct_ab_per_edge.items())),
            "wall_time": self.wall_time,
            "cells_solved": self.cells_solved,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class WarpPath:
    """Monotone polyline from (0,0) to (p,q) realising the optimal cost.

    annotations has one label per leg: 'axis-parallel', 'valley-ride', or
    'diagonal'.
    """

    points: Tuple[Tuple[float, float], ...]
    annotations: Tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "points": [[x, y] for x, y in self.points],
            "annotations": list(self.annotations),
        }


@dataclass
class SolveRun:
    """Everything produced by one solve, kept for backtracking and stats."""

    P: Curve
    Q: Curve
    config: EngineConfig
    top: Dict[Tuple[int, int], BoundaryCost]
    right: Dict[Tuple[int, int], BoundaryCost]
    bottoms: List[BoundaryCost]
    lefts: List[BoundaryCost]
    records: Dict[Tuple[int, int], Optional[CellRecord]]
    stats: SolveStats


@dataclass
class CdtwResult:
    value: float
    stats: SolveStats
    path: Optional[WarpPath] = None
    run: Optional[SolveRun] = None

    def to_json(self) -> dict:
        out = {"value": self.value, "stats": self.stats.to_json()}
        if self.path is not None:
            out["path"] = self.path.to_json()
        return out


def _distinct_ab(f: pw.PiecewiseQuadratic) -> int:
    return len({(round(p.a / AB_BUCKET), round(p.b / AB_BUCKET)) for p in f.pieces})


def _count_edge(stats: SolveStats, key: str, level: int, f: pw.PiecewiseQuadratic) -> None:
    n = len(f.pieces)
    stats.total_pieces += n
    stats.pieces_per_level[level] = stats.pieces_per_level.get(level, 0) + n
    stats.max_distinct_ab_per_edge[key] = _distinct_ab(f)


def cdtw_exact(P: Curve, Q: Curve, config: Optional[EngineConfig] = None) -> CdtwResult:
    """Exact continuous warping distance between two 1D polygonal curves.

    Propagates boundary cost functions cell by cell; the returned value is
    the cost of the cheapest monotone unit-speed alignment path through the
    whole parameter space.  Symmetric in its arguments up to tolerance.
    """
    cfg = config if config is not None else EngineConfig()
    t_start = time.perf_counter()
    stats = SolveStats()
    bottoms, lefts = base_case(P, Q)
    n, m = P.num_segments, Q.num_segments
    for i, bc in enumerate(bottoms, start=1):
        _count_edge(stats, f"bottom:{i},1", i + 1, bc.cost)
    for j, bc in enumerate(lefts, start=1):
        _count_edge(stats, f"left:1,{j}", j + 1, bc.cost)

    top: Dict[Tuple[int, int], BoundaryCost] = {}
    right: Dict[Tuple[int, int], BoundaryCost] = {}
    records: Dict[Tuple[int, int], Optional[CellRecord]] = {}
    for k in range(2, n + m + 1):
        for i in range(max(1, k - m), min(n, k - 1) + 1):
            j = k - i
            cell = cell_info(P, Q, i, j)
            b_in = top[(i, j - 1)] if j > 1 else bottoms[i - 1]
            l_in = right[(i - 1, j)] if i > 1 else lefts[j - 1]
            try:
                t_bc, r_bc, rec = solve_cell(
                    cell, b_in, l_in, record=cfg.record_path, validate=cfg.validate
                )
            except InvariantViolation as exc:
                raise InvariantViolation(f"cell ({i},{j}): {exc}") from exc
            top[(i, j)] = t_bc
            right[(i, j)] = r_bc
            records[(i, j)] = rec
            stats.cells_solved += 1
            _count_edge(stats, f"top:{i},{j}", k, t_bc.cost)
            _count_edge(stats, f"right:{i},{j}", k, r_bc.cost)

    p_len, q_len = P.length, Q.length
    v_right = right[(n, m)].cost.value(q_len)
    v_top = top[(n, m)].cost.value(p_len)
    if abs(v_right - v_top) > 1e-6 * (1.0 + abs(v_right)):
        raise InvariantViolation(
            f"corner disagreement: right gives {v_right}, top gives {v_top}"
        )
    value = min(v_right, v_top)
    if value < -1e-6 * (1.0 + p_len + q_len):
        raise InvariantViolation(f"negative distance {value}")
    value = max(value, 0.0)

    run = SolveRun(P, Q, cfg, top, right, bottoms, lefts, records, stats)
    stats.wall_time = time.perf_counter() - t_start
    result = CdtwResult(value=value, stats=stats, run=run)
    if cfg.record_path:
        result.path = _trace(run)
        stats.wall_time = time.perf_counter() - t_start
    return result


# ---------------------------------------------------------------------------
# path reconstruction


def _trace(run: SolveRun) -> WarpPath:
    """Backtrack provenance from the top-right corner to the origin.

    Each step interprets the winning fragment at one edge coordinate: it
    appends that fragment's in-cell legs (in reverse) and continues from
    the fragment's source point on an input edge.  The level i + j drops
    by one per cell, so the walk terminates.
    """
    P, Q = run.P, run.Q
    n, m = P.num_segments, Q.num_segments
    pts: List[Tuple[float, float]] = [(P.length, Q.length)]
    edge, i, j, t = "right", n, m, Q.length

    while True:
        bc = run.right[(i, j)] if edge == "right" else run.top[(i, j)]
        cell = cell_info(P, Q, i, j)
        x0, x1 = cell.x_range
        y0, y1 = cell.y_range
        c = cell.offset
        k, _ = pw.piece_at(bc.cost, t)
        prov: Prov = bc.prov[k][1]

        if prov.kind == "travel":
            s_star = prov.data[0]
            pts.append((x1, s_star) if edge == "right" else (s_star, y1))
            t = s_star
            prov = prov.inner
            if prov is None or prov.kind == "travel":
                raise ProvenanceMissing("malformed travel provenance")

        if prov.kind in ("Av", "C1T"):
            pts.append((t, y0))
            nxt = ("bottom", t)
        elif prov.kind in ("Ah", "C1"):
            pts.append((x0, t))
            nxt = ("left", t)
        elif prov.kind == "corner":
            if prov.side == "bottom":
                pts.append((x1, y0))
                nxt = ("bottom", x1)
            else:
                pts.append((x0, y1))
                nxt = ("left", y1)
        elif prov.kind == "C2":
            alpha, beta = prov.data
            s = alpha * t + beta
            pts.append((s, t))
            pts.append((s, y0))
            nxt = ("bottom", s)
        elif prov.kind == "C2T":
            alpha, beta = prov.data
            sig = alpha * t + beta
            pts.append((t, sig))
            pts.append((x0, sig))
            nxt = ("left", sig)
        elif prov.kind == "B":
            rec = run.records.get((i, j))
            if rec is None or rec.b is None:
                raise ProvenanceMissing(f"no valley record for cell ({i},{j})")
            brec = rec.b
            v_exit = t if prov.data[0] == "top" else t + c
            pts.append((v_exit, v_exit - c))
            kb, _ = pw.piece_at(brec.b2, v_exit)
            arg = brec.argmins[kb]
            v_in = v_exit if arg is None else min(arg, v_exit)
            if v_in < v_exit:
                pts.append((v_in, v_in - c))
            kv, _ = pw.piece_at(brec.valley_env, v_in)
            if brec.vtags[kv][1].side == "bottom":
                pts.append((v_in, y0))
                nxt = ("bottom", v_in)
            else:
                pts.append((x0, v_in - c))
                nxt = ("left", v_in - c)
        else:
            raise ProvenanceMissing(f"unknown provenance kind {prov.kind!r}")

        side, s = nxt
        if side == "bottom":
            if j > 1:
                edge, j, t = "top", j - 1, s
            else:
                pts.append((0.0, 0.0))
                break
        else:
            if i > 1:
                edge, i, t = "right", i - 1, s
            else:
                pts.append((0.0, 0.0))
                break

    return _polish_path(P, Q, pts)


def _polish_path(P: Curve, Q: Curve, rev_pts: List[Tuple[float, float]]) -> WarpPath:
    """Reverse, deduplicate, clamp drift, and annotate the legs."""
    scale = 1.0 + P.length + Q.length
    tol = 1e-9 * scale
    pts = list(reversed(rev_pts))
    pts[0] = (0.0, 0.0)
    pts[-1] = (P.length, Q.length)
    clean: List[Tuple[float, float]] = [pts[0]]
    for x, y in pts[1:]:
        px, py = clean[-1]
        if x - px < -1e-6 * scale or y - py < -1e-6 * scale:
            raise InvariantViolation(f"non-monotone path leg ({px},{py}) -> ({x},{y})")
        x, y = max(x, px), max(y, py)
        if abs(x - px) <= tol and abs(y - py) <= tol:
            continue
        clean.append((x, y))
    if len(clean) == 1:
        clean.append((P.length, Q.length))
    clean[-1] = (P.length, Q.length)

    annots: List[str] = []
    from .curves import height

    for (ax, ay), (bx, by) in zip(clean, clean[1:]):
        dx, dy = bx - ax, by - ay
        if dx <= tol or dy <= tol:
            annots.append("axis-parallel")
        elif abs(dx - dy) <= 1e-6 * scale and height(
            P, Q, 0.5 * (ax + bx), 0.5 * (ay + by)
        ) <= 1e-6 * scale:
            annots.append("valley-ride")
        else:
            annots.append("diagonal")
    return WarpPath(tuple(clean), tuple(annots))


def reconstruct_path(result: CdtwResult) -> WarpPath:
    """Optimal warping path for a finished solve.

    Requires the solve to have run with path recording enabled; among
    equal-cost paths the construction prefers sources with the larger
    y coordinate and direct fragments over edge travel.
    """
    if result.path is not None:
        return result.path
    if result.run is None or not result.run.config.record_path:
        raise ProvenanceMissing("solve ran without path recording")
    return _trace(result.run)


# ---------------------------------------------------------------------------
# complexity statistics


def collect_stats(run: SolveRun) -> SolveStats:
    """Finalize the run's statistics and flag any complexity-bound breach.

    The checker flags (rather than raises) because the bounds describe
    worst-case growth; a flag in normal operation indicates a bug.
    """
    stats = run.stats
    n, m = run.P.num_segments, run.Q.num_segments
    flags = []
    for k, cnt in sorted(stats.pieces_per_level.items()):
        if cnt > 2 * k**4:
            flags.append(f"level {k}: {cnt} pieces exceeds 2k^4 = {2 * k**4}")
    cap = 2 * (n + m) ** 5
    if stats.total_pieces > cap:
        flags.append(f"total pieces {stats.total_pieces} exceeds 2(n+m)^5 = {cap}")
    stats.flags = flags
    return stats
