"""Per-cell propagation of boundary cost functions.

The dynamic program keeps, for every cell edge, the cost-to-reach function
(a continuous piecewise quadratic over the edge coordinate).  This module
computes a cell's output-edge functions (top, right) from its input-edge
functions (bottom, left) by generating candidate cost fragments from every
optimal path shape, merging them with a lower envelope, and finishing with
a travel pass along each output edge.

Path shapes inside one cell:

* opposite-direction cells: the height along every monotone path is the
  same function of x + y, so a straight transport (vertical, horizontal,
  or through the corner) represents all paths between two boundary points;
* same-direction cells: write u = x - y - c (the signed offset from the
  zero-height valley line).  Along a monotone path, u changes at rate at
  most 1 per unit of L1 arc length, so optimal paths dip towards u = 0 as
  fast as allowed: ride the valley if reachable (the B family), otherwise
  turn once at the dip (the C2 families), or transport straight across
  (C1 families).  The final edge-travel pass accounts for continuing along
  an output edge past any of these exits.

Every emitted fragment is the exact cost of a realisable path family, so
the envelope is a true upper bound everywhere and tight where some family
is optimal; the families above cover all optimal shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import piecewise as pw
from .curves import Cell, Curve, cell_info
from .errors import InvariantViolation, WrongCellType
from .piecewise import PiecewiseQuadratic, Quadratic

# Tie-break preferences: fragments sourced from the left edge beat fragments
# sourced from the bottom edge (the optimal-path convention keeps the largest
# y coordinate among equal-cost paths).
PREF_BOTTOM = 1.0
PREF_B = 1.5
PREF_LEFT = 2.0

# A fragment derived from one input piece stays below this many pieces.
MAX_FRAGMENT_PIECES = 6


@dataclass(frozen=True)
class Prov:
    """Per-piece provenance: which path family produced the winning cost.

    kind is one of 'base', 'Av', 'Ah', 'corner', 'B', 'C1', 'C1T', 'C2',
    'C2T', 'travel'.  data holds family parameters (for C2 kinds the linear
    map t -> source coordinate; for corners the corner point; for travel
    the departure coordinate).  inner nests the pre-travel provenance.
    """

    kind: str
    side: str
    data: Tuple = ()
    inner: Optional["Prov"] = None


@dataclass(frozen=True)
class BoundaryCost:
    """Cost function along one cell edge plus per-piece provenance."""

    edge: Tuple
    cost: PiecewiseQuadratic
    prov: Tuple


@dataclass(frozen=True)
class BRecord:
    """Valley data kept for path reconstruction through the B family."""

    valley_env: PiecewiseQuadratic
    vtags: Tuple
    b2: PiecewiseQuadratic
    argmins: Tuple


@dataclass(frozen=True)
class CellRecord:
    cell: Cell
    b: Optional[BRecord]


Fragment = Tuple[PiecewiseQuadratic, List[Tuple[float, Prov]]]


def _frag(pwq: PiecewiseQuadratic, pref: float, prov: Prov, src_pieces: int) -> Fragment:
    if len(pwq.pieces) > src_pieces + MAX_FRAGMENT_PIECES:
        raise InvariantViolation(
            f"fragment with {len(pwq.pieces)} pieces from {src_pieces} source pieces"
        )
    return (pwq, [(pref, prov)] * len(pwq.pieces))


# ---------------------------------------------------------------------------
# closed-form height integrals


def _s_halfsq(u: float) -> float:
    """Signed half square: integral of |w| from 0 to u."""
    return u * abs(u) / 2.0


def s_combination(
    terms: Sequence[Tuple[float, float, float]],
    const: float,
    lo: float,
    hi: float,
) -> PiecewiseQuadratic:
    """Piecewise quadratic sum(coef * S(sgn*t + p)) + const on [lo, hi],
    where S(u) = u|u|/2.  Each term contributes one potential breakpoint."""
    tol = pw.TOLERANCE * (1.0 + abs(lo) + abs(hi))
    cuts = {lo, hi}
    for _, sgn, p in terms:
        t_star = -p * sgn  # sgn is +1 or -1, so this solves sgn*t + p = 0
        if lo + tol < t_star < hi - tol:
            cuts.add(t_star)
    xs = sorted(cuts)
    pieces = []
    for a0, b0 in zip(xs, xs[1:]):
        mid = 0.5 * (a0 + b0)
        qa = qb = 0.0
        qc = const
        for coef, sgn, p in terms:
            sig = 1.0 if sgn * mid + p >= 0 else -1.0
            qa += coef * sig / 2.0
            qb += coef * sig * sgn * p
            qc += coef * sig * p * p / 2.0
        pieces.append(Quadratic(qa, qb, qc, a0, b0))
    return pw.build(pieces)


def abs_band(sgn: float, p0: float, p1: float, lo: float, hi: float) -> PiecewiseQuadratic:
    """F(t) = S(sgn*t + p0) - S(sgn*t + p1) with p0 >= p1: the integral of
    the in-cell height across a full edge band, as a function of the
    transported coordinate t."""
    return s_combination([(1.0, sgn, p0), (-1.0, sgn, p1)], 0.0, lo, hi)


def edge_height_running(cell: Cell, side: str) -> PiecewiseQuadratic:
    """Running integral of h along one cell edge, from the edge's start."""
    x0, x1 = cell.x_range
    y0, y1 = cell.y_range
    c = cell.offset
    if cell.same_direction:
        if side == "right":  # h(x1, y) = |x1 - y - c|, y in [y0, y1]
            return pw.integrate_abs_linear(-1.0, x1 - c, y0, y1)
        if side == "left":
            return pw.integrate_abs_linear(-1.0, x0 - c, y0, y1)
        if side == "top":  # h(x, y1) = |x - y1 - c|, x in [x0, x1]
            return pw.integrate_abs_linear(1.0, -(y1 + c), x0, x1)
        if side == "bottom":
            return pw.integrate_abs_linear(1.0, -(y0 + c), x0, x1)
    else:
        if side == "right":  # h(x1, y) = |x1 + y - c'|
            return pw.integrate_abs_linear(1.0, x1 - c, y0, y1)
        if side == "left":
            return pw.integrate_abs_linear(1.0, x0 - c, y0, y1)
        if side == "top":  # h(x, y1) = |x + y1 - c'|
            return pw.integrate_abs_linear(1.0, y1 - c, x0, x1)
        if side == "bottom":
            return pw.integrate_abs_linear(1.0, y0 - c, x0, x1)
    raise ValueError(f"unknown side {side!r}")


# ---------------------------------------------------------------------------
# base case


def base_case(P: Curve, Q: Curve) -> Tuple[List[BoundaryCost], List[BoundaryCost]]:
    """Boundary costs along the two axes.

    The only monotone path to (x, 0) runs along the x axis, so the cost is
    the running integral of h(z, 0); the y axis is symmetric.  Returns one
    BoundaryCost per bottom edge of row 1 and per left edge of column 1.
    """
    bottoms: List[BoundaryCost] = []
    acc = 0.0
    q0 = Q.vertices[0]
    for i in range(1, P.num_segments + 1):
        x0, x1 = P.prefix_lengths[i - 1], P.prefix_lengths[i]
        d = P.segment_dir(i)
        # h(z, 0) = |d*z + (P_{i-1} - d*x0 - Q(0))| on this segment
        beta = P.vertices[i - 1] - d * x0 - q0
        f = pw.integrate_abs_linear(float(d), beta, x0, x1)
        pieces = tuple(p.shifted(acc) for p in f.pieces)
        cost = PiecewiseQuadratic(pieces)
        acc = cost.value(x1)
        prov = tuple((PREF_BOTTOM, Prov("base", "bottom")) for _ in pieces)
        bottoms.append(BoundaryCost(("bottom", i, 1), cost, prov))

    lefts: List[BoundaryCost] = []
    acc = 0.0
    p0 = P.vertices[0]
    for j in range(1, Q.num_segments + 1):
        y0, y1 = Q.prefix_lengths[j - 1], Q.prefix_lengths[j]
        d = Q.segment_dir(j)
        beta = p0 - (Q.vertices[j - 1] - d * y0)
        f = pw.integrate_abs_linear(float(-d), beta, y0, y1)
        pieces = tuple(p.shifted(acc) for p in f.pieces)
        cost = PiecewiseQuadratic(pieces)
        acc = cost.value(y1)
        prov = tuple((PREF_LEFT, Prov("base", "left")) for _ in pieces)
        lefts.append(BoundaryCost(("left", 1, j), cost, prov))
    return bottoms, lefts


# ---------------------------------------------------------------------------
# type A: opposite-direction cells


def propagate_type_a(
    cell: Cell, input_bc: BoundaryCost, side: str
) -> Dict[str, List[Fragment]]:
    """Fragments from one input edge of an opposite-direction cell.

    All monotone paths between two fixed boundary points cost the same
    here, so a vertical transport (bottom to top), a horizontal transport
    (left to right), and the corner route (bottom to right through the
    bottom-right corner, left to top through the top-left corner)
    represent every optimum.
    """
    if cell.same_direction:
        raise WrongCellType("type A applies to opposite-direction cells")
    x0, x1 = cell.x_range
    y0, y1 = cell.y_range
    cp = cell.offset
    f = input_bc.cost
    out: Dict[str, List[Fragment]] = {"top": [], "right": []}
    if side == "bottom":
        band = abs_band(1.0, y1 - cp, y0 - cp, x0, x1)
        lifted = pw.add_quadratic(f, band)
        out["top"].append(
            _frag(lifted, PREF_BOTTOM, Prov("Av", "bottom"), len(f.pieces))
        )
        corner_val = f.value(x1)
        ride = edge_height_running(cell, "right")
        cost = PiecewiseQuadratic(tuple(p.shifted(corner_val) for p in ride.pieces))
        out["right"].append(
            _frag(cost, PREF_BOTTOM, Prov("corner", "bottom", (x1, y0)), 1)
        )
    elif side == "left":
        band = abs_band(1.0, x1 - cp, x0 - cp, y0, y1)
        lifted = pw.add_quadratic(f, band)
        out["right"].append(
            _frag(lifted, PREF_LEFT, Prov("Ah", "left"), len(f.pieces))
        )
        corner_val = f.value(y1)
        ride = edge_height_running(cell, "top")
        cost = PiecewiseQuadratic(tuple(p.shifted(corner_val) for p in ride.pieces))
        out["top"].append(
            _frag(cost, PREF_LEFT, Prov("corner", "left", (x0, y1)), 1)
        )
    else:
        raise ValueError(f"unknown input side {side!r}")
    return out


# ---------------------------------------------------------------------------
# type B: valley riding


def _valley_span(cell: Cell) -> Optional[Tuple[float, float]]:
    if cell.valley is None:
        return None
    (vx0, _), (vx1, _) = cell.valley
    if vx1 - vx0 <= pw.TOLERANCE * (1.0 + abs(vx0) + abs(vx1)):
        return None  # point valley: no riding possible, handled as type C
    return vx0, vx1


def propagate_type_b(
    cell: Cell, bottom: BoundaryCost, left: BoundaryCost
) -> Tuple[Dict[str, List[Fragment]], BRecord]:
    """Valley-riding fragments: transport both inputs to the valley,
    take the cumulative minimum along it, and transport to the outputs.

    The transport cost from the valley to an output point does not depend
    on where the path leaves the valley (any reachable exit gives the same
    dip integral), so the cumulative minimum captures every entry point.
    """
    span = _valley_span(cell)
    if not cell.same_direction or span is None:
        raise WrongCellType("type B needs a same-direction cell with a valley")
    vx0, vx1 = span
    x0, x1 = cell.x_range
    y0, y1 = cell.y_range
    c = cell.offset

    # Entry from the bottom edge at (v, y0), climbing to the valley.
    fb = pw.restrict(bottom.cost, vx0, vx1)
    climb = Quadratic(0.5, -(y0 + c), (y0 + c) ** 2 / 2.0, vx0, vx1)
    b1_bottom = pw.add_quadratic(fb, climb)
    tags_b = [(PREF_BOTTOM, Prov("B1", "bottom")) for _ in b1_bottom.pieces]

    # Entry from the left edge at (x0, v - c), moving right to the valley.
    fl = pw.affine_substitute(left.cost, 1.0, -c)
    fl = pw.restrict(fl, vx0, vx1)
    walk = Quadratic(0.5, -x0, x0 * x0 / 2.0, vx0, vx1)
    b1_left = pw.add_quadratic(fl, walk)
    tags_l = [(PREF_LEFT, Prov("B1", "left")) for _ in b1_left.pieces]

    valley_env, vtags = pw.lower_envelope_tagged(
        [(b1_bottom, tags_b), (b1_left, tags_l)], vx0, vx1
    )
    b2, argmins = pw.cumulative_min_annotated(valley_env)

    out: Dict[str, List[Fragment]] = {"top": [], "right": []}
    src = len(b2.pieces)
    # Exit upward to the top edge at (t, y1): transport (y1 - t + c)^2 / 2.
    up = Quadratic(0.5, -(y1 + c), (y1 + c) ** 2 / 2.0, vx0, vx1)
    b3_top = pw.add_quadratic(b2, up)
    out["top"].append(_frag(b3_top, PREF_B, Prov("B", "", ("top",)), src))
    # Exit rightward to (x1, tau): valley coordinate tau + c.
    shifted = pw.affine_substitute(b2, 1.0, c)
    t_lo, t_hi = vx0 - c, vx1 - c
    side = Quadratic(0.5, -(x1 - c), (x1 - c) ** 2 / 2.0, t_lo, t_hi)
    b3_right = pw.add_quadratic(shifted, side)
    out["right"].append(_frag(b3_right, PREF_B, Prov("B", "", ("right",)), src))

    record = BRecord(valley_env, tuple(vtags), b2, tuple(argmins))
    return out, record


# ---------------------------------------------------------------------------
# type C: straight transports and single-turn paths


def _compose_quad_linear(
    qa: float, qb: float, qc: float, alpha: float, beta: float
) -> Tuple[float, float, float]:
    """Coefficients of q(alpha*t + beta) as a quadratic in t."""
    a = qa * alpha * alpha
    b = 2.0 * qa * alpha * beta + qb * alpha
    c = (qa * beta + qb) * beta + qc
    return a, b, c


def _c2_catalogue(
    f: PiecewiseQuadratic,
    X0: float,
    X1: float,
    Y0: float,
    Y1: float,
    C: float,
) -> List[Tuple[PiecewiseQuadratic, float, float]]:
    """Single-turn path costs from the bottom edge to the right edge,
    in normalised frame coordinates.

    A path enters at (s, Y0-edge), runs "up" to level t, then "right" to
    the output edge; its cost is

        pathcost(s, t) = f(s) + S(s - Y0 - C) + S(X1 - t - C) - 2 S(s - t - C)

    with S(u) = u|u|/2.  For each input piece this emits: the interior
    stationary solution s(t) of d pathcost / d s = 0 (linear per sign
    region), the fixed-endpoint candidates, and the valley-grazing
    diagonal s = t + C.  Each returned entry is (cost fragment over t,
    alpha, beta) with source coordinate s = alpha * t + beta.

    The transposed frame (swap axes, negate C) yields the left-to-top
    family, which is required for exactness and symmetric to this one.
    """
    tol = pw.TOLERANCE * (1.0 + abs(X0) + abs(X1) + abs(Y0) + abs(Y1))
    out: List[Tuple[PiecewiseQuadratic, float, float]] = []

    def pathcost_at(s: float) -> float:
        return f.value(s) + _s_halfsq(s - Y0 - C)

    def endpoint_fragment(s_hat: float) -> None:
        const = pathcost_at(s_hat)
        frag = s_combination(
            [(1.0, -1.0, X1 - C), (-2.0, -1.0, s_hat - C)], const, Y0, Y1
        )
        out.append((frag, 0.0, s_hat))

    # Fixed entry coordinates: piece boundaries plus the sign breakline.
    s_candidates = {p.lo for p in f.pieces}
    s_candidates.add(f.hi)
    if X0 + tol < Y0 + C < X1 - tol:
        s_candidates.add(Y0 + C)
    for s_hat in sorted(s_candidates):
        endpoint_fragment(s_hat)

    for p in f.pieces:
        # Valley-grazing diagonal: turn exactly on the zero line.
        d_lo = max(p.lo - C, Y0)
        d_hi = min(p.hi - C, Y1)
        if d_hi - d_lo > tol:
            qa, qb, qc = _compose_quad_linear(p.a, p.b, p.c, 1.0, C)
            # add (t - Y0)^2 / 2 for the climb to the turn
            qa += 0.5
            qb += -Y0
            qc += Y0 * Y0 / 2.0
            base = s_combination([(1.0, -1.0, X1 - C)], 0.0, d_lo, d_hi)
            pieces = [
                Quadratic(q.a + qa, q.b + qb, q.c + qc, q.lo, q.hi)
                for q in base.pieces
            ]
            out.append((pw.build(pieces), 1.0, C))

        # Interior stationary solutions, split by the sign of s - Y0 - C
        # (entry side) and of s - t - C (turn side).
        s_splits = [p.lo, p.hi]
        if p.lo + tol < Y0 + C < p.hi - tol:
            s_splits = [p.lo, Y0 + C, p.hi]
        for sl, sh in zip(s_splits, s_splits[1:]):
            if sh - sl <= tol:
                continue
            sig_s = 1.0 if 0.5 * (sl + sh) - Y0 - C >= 0 else -1.0
            for sig_d in (1.0, -1.0):
                kappa = 2.0 * p.a + sig_s - 2.0 * sig_d
                if kappa <= pw.TOLERANCE:
                    continue  # not a minimum in s
                alpha = -2.0 * sig_d / kappa
                beta = (sig_s * (Y0 + C) - 2.0 * sig_d * C - p.b) / kappa
                # t range where s(t) stays in [sl, sh] and on the sig_d side
                t_lo, t_hi = Y0, Y1
                for (g0, g1, sense) in (
                    (alpha, beta - sl, +1.0),   # s(t) >= sl
                    (-alpha, sh - beta, +1.0),  # s(t) <= sh
                    (
                        sig_d * (alpha - 1.0),
                        sig_d * (beta - C),
                        +1.0,
                    ),  # sig_d * (s(t) - t - C) >= 0
                ):
                    # keep t with g0 * t + g1 >= 0
                    if abs(g0) <= pw.TOLERANCE:
                        if g1 < -pw.TOLERANCE:
                            t_lo, t_hi = 1.0, 0.0
                            break
                        continue
                    bound = -g1 / g0
                    if g0 > 0:
                        t_lo = max(t_lo, bound)
                    else:
                        t_hi = min(t_hi, bound)
                if t_hi - t_lo <= tol:
                    continue
                qa, qb, qc = _compose_quad_linear(p.a, p.b, p.c, alpha, beta)
                ea, eb, ec = _compose_quad_linear(
                    sig_s * 0.5, -sig_s * (Y0 + C), sig_s * (Y0 + C) ** 2 / 2.0,
                    alpha, beta,
                )
                # -2 * sig_d * (s(t) - t - C)^2 / 2 with s(t) linear
                da, db, dc = _compose_quad_linear(
                    -sig_d, 0.0, 0.0, alpha - 1.0, beta - C
                )
                base = s_combination(
                    [(1.0, -1.0, X1 - C)],
                    0.0,
                    t_lo,
                    t_hi,
                )
                pieces = [
                    Quadratic(
                        q.a + qa + ea + da,
                        q.b + qb + eb + db,
                        q.c + qc + ec + dc,
                        q.lo,
                        q.hi,
                    )
                    for q in base.pieces
                ]
                out.append((pw.build(pieces), alpha, beta))
    return out


def propagate_type_c(
    cell: Cell, bottom: BoundaryCost, left: BoundaryCost
) -> Dict[str, List[Fragment]]:
    """Straight transports (C1 families) and single-turn paths (C2 families)
    for a same-direction cell; valid with or without a valley."""
    if not cell.same_direction:
        raise WrongCellType("type C applies to same-direction cells")
    x0, x1 = cell.x_range
    y0, y1 = cell.y_range
    c = cell.offset
    out: Dict[str, List[Fragment]] = {"top": [], "right": []}

    # C1: left to right, horizontal transport across the full cell width.
    band = abs_band(-1.0, x1 - c, x0 - c, y0, y1)
    lifted = pw.add_quadratic(left.cost, band)
    out["right"].append(
        _frag(lifted, PREF_LEFT, Prov("C1", "left"), len(left.cost.pieces))
    )

    # C1 transposed: bottom to top, vertical transport.
    band = abs_band(1.0, -(y0 + c), -(y1 + c), x0, x1)
    lifted = pw.add_quadratic(bottom.cost, band)
    out["top"].append(
        _frag(lifted, PREF_BOTTOM, Prov("C1T", "bottom"), len(bottom.cost.pieces))
    )

    # C2: bottom to right, single turn.
    for frag, alpha, beta in _c2_catalogue(bottom.cost, x0, x1, y0, y1, c):
        out["right"].append(
            _frag(frag, PREF_BOTTOM, Prov("C2", "bottom", (alpha, beta)), 1)
        )
    # C2 transposed: left to top (swap axes, negate the valley offset).
    for frag, alpha, beta in _c2_catalogue(left.cost, y0, y1, x0, x1, -c):
        out["top"].append(
            _frag(frag, PREF_LEFT, Prov("C2T", "left", (alpha, beta)), 1)
        )
    return out


# ---------------------------------------------------------------------------
# travel along an output edge, envelope merge, cell driver


def apply_edge_travel(
    env: PiecewiseQuadratic,
    tags: Sequence[Tuple[float, Prov]],
    q_edge: PiecewiseQuadratic,
) -> Tuple[PiecewiseQuadratic, List[Tuple[float, Prov]]]:
    """Allow paths to continue along the output edge after any exit.

    g(t) = min over s <= t of (env(s) + integral of h between s and t along
    the edge), computed as an offset cumulative minimum against the running
    edge integral.  Ties prefer the direct fragment (no travel).
    """
    diff, dtags = pw.add_tagged(env, tags, q_edge, sign=-1.0)
    dmin, args = pw.cumulative_min_annotated(diff)
    # The untagged cumulative minimum can merge equal-coefficient spans that
    # carry different provenance; split follow pieces back at the source
    # breakpoints so every sub-piece gets the tag it actually follows.
    tol = pw.TOLERANCE * (1.0 + abs(diff.lo) + abs(diff.hi))
    pieces: List[Quadratic] = []
    new_tags: List[Tuple[float, Prov]] = []
    for piece, arg in zip(dmin.pieces, args):
        if arg is None:
            cuts = [piece.lo]
            cuts += [p.hi for p in diff.pieces if piece.lo + tol < p.hi < piece.hi - tol]
            cuts.append(piece.hi)
            for a, b in zip(cuts, cuts[1:]):
                pieces.append(piece.with_domain(a, b))
                k, _ = pw.piece_at(diff, 0.5 * (a + b))
                new_tags.append(dtags[k])
        else:
            pieces.append(piece)
            k, _ = pw.piece_at(diff, arg)
            pref, prov = dtags[k]
            new_tags.append((pref, Prov("travel", "", (arg,), prov)))
    refined = PiecewiseQuadratic(tuple(pieces))
    g, gtags = pw.add_tagged(refined, new_tags, q_edge, sign=1.0)
    return g, list(gtags or [])


def _pin_end(
    f: PiecewiseQuadratic, where: str, target: float
) -> PiecewiseQuadratic:
    """Nudge an end piece so the endpoint value matches target exactly.

    Suppresses sub-tolerance drift at cell corners; a genuine mismatch is
    an invariant violation.
    """
    pieces = list(f.pieces)
    if where == "lo":
        cur = pieces[0].value(f.lo)
        idx = 0
    else:
        cur = pieces[-1].value(f.hi)
        idx = -1
    delta = target - cur
    if delta == 0.0:
        return f
    if abs(delta) > 1e-6 * (1.0 + abs(target)):
        raise InvariantViolation(
            f"corner value mismatch: {cur} vs {target} at {where} end"
        )
    pieces[idx] = pieces[idx].shifted(delta)
    return PiecewiseQuadratic(tuple(pieces))


def solve_cell(
    cell: Cell,
    bottom: BoundaryCost,
    left: BoundaryCost,
    record: bool = False,
    validate: bool = False,
) -> Tuple[BoundaryCost, BoundaryCost, Optional[CellRecord]]:
    """Output-edge boundary costs of one cell from its input-edge costs."""
    x0, x1 = cell.x_range
    y0, y1 = cell.y_range
    frags_top: List[Fragment] = []
    frags_right: List[Fragment] = []
    b_rec: Optional[BRecord] = None

    if cell.same_direction:
        cands = propagate_type_c(cell, bottom, left)
        frags_top.extend(cands["top"])
        frags_right.extend(cands["right"])
        if _valley_span(cell) is not None:
            bcands, b_rec = propagate_type_b(cell, bottom, left)
            frags_top.extend(bcands["top"])
            frags_right.extend(bcands["right"])
    else:
        for bc, side in ((bottom, "bottom"), (left, "left")):
            cands = propagate_type_a(cell, bc, side)
            frags_top.extend(cands["top"])
            frags_right.extend(cands["right"])

    env_top, tags_top = pw.lower_envelope_tagged(frags_top, x0, x1)
    env_right, tags_right = pw.lower_envelope_tagged(frags_right, y0, y1)

    fin_top, prov_top = apply_edge_travel(
        env_top, tags_top, edge_height_running(cell, "top")
    )
    fin_right, prov_right = apply_edge_travel(
        env_right, tags_right, edge_height_running(cell, "right")
    )

    # Corner continuity: the output functions meet known values at three
    # corners; pin away sub-tolerance drift.
    fin_right = _pin_end(fin_right, "lo", min(fin_right.value(y0), bottom.cost.value(x1)))
    fin_top = _pin_end(fin_top, "lo", min(fin_top.value(x0), left.cost.value(y1)))
    shared = min(fin_top.value(x1), fin_right.value(y1))
    fin_top = _pin_end(fin_top, "hi", shared)
    fin_right = _pin_end(fin_right, "hi", shared)

    if validate:
        pw.validate(fin_top)
        pw.validate(fin_right)

    top_bc = BoundaryCost(("top", cell.i, cell.j), fin_top, tuple(prov_top))
    right_bc = BoundaryCost(("right", cell.i, cell.j), fin_right, tuple(prov_right))
    rec = CellRecord(cell, b_rec) if record else None
    return top_bc, right_bc, rec
