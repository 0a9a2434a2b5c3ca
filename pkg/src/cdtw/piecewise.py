"""Algebra of continuous piecewise-quadratic functions on an interval.

Boundary cost functions of the warping dynamic program are continuous
piecewise quadratics.  This module implements the operations the solver
needs: evaluation, affine substitution of the argument, pointwise addition
of quadratics, integrals of |linear| functions, the cumulative minimum
g(t) = min_{s <= t} f(s), an offset variant of it, and the lower envelope
(pointwise minimum) of a set of partially overlapping fragments.

All arithmetic is binary64 with a configurable tolerance used for
breakpoint merging, continuity checks, and quadratic-intersection roots.
Exact rational arithmetic is not an option here: envelope breakpoints are
roots of quadratics and irrational in general.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import CoverageGap, InvariantViolation, OutOfDomain

TOLERANCE = 1e-9


def set_tolerance(value: float) -> None:
    """Set the global numeric tolerance (breakpoints, roots, continuity)."""
    global TOLERANCE
    if value <= 0:
        raise ValueError("tolerance must be positive")
    TOLERANCE = float(value)


def get_tolerance() -> float:
    return TOLERANCE


@dataclass(frozen=True, slots=True)
class Quadratic:
    """a*s^2 + b*s + c restricted to the closed interval [lo, hi]."""

    a: float
    b: float
    c: float
    lo: float
    hi: float

    def value(self, s: float) -> float:
        return (self.a * s + self.b) * s + self.c

    def deriv(self, s: float) -> float:
        return 2.0 * self.a * s + self.b

    def with_domain(self, lo: float, hi: float) -> "Quadratic":
        return Quadratic(self.a, self.b, self.c, lo, hi)

    def shifted(self, dc: float) -> "Quadratic":
        return Quadratic(self.a, self.b, self.c + dc, self.lo, self.hi)

    def min_on(self, lo: Optional[float] = None, hi: Optional[float] = None) -> float:
        """Minimum value over [lo, hi] (defaults to the piece's domain)."""
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        best = min(self.value(lo), self.value(hi))
        if self.a > 0.0:
            v = -self.b / (2.0 * self.a)
            if lo < v < hi:
                best = min(best, self.value(v))
        return best


@dataclass(frozen=True, slots=True)
class PiecewiseQuadratic:
    """Ordered abutting Quadratic pieces tiling one closed interval."""

    pieces: Tuple[Quadratic, ...]

    @property
    def lo(self) -> float:
        return self.pieces[0].lo

    @property
    def hi(self) -> float:
        return self.pieces[-1].hi

    def __len__(self) -> int:
        return len(self.pieces)

    def value(self, s: float) -> float:
        return evaluate(self, s)

    def breakpoints(self) -> List[float]:
        return [p.lo for p in self.pieces] + [self.pieces[-1].hi]


PwqLike = Union[Quadratic, PiecewiseQuadratic]


def as_pwq(g: PwqLike) -> PiecewiseQuadratic:
    if isinstance(g, Quadratic):
        return PiecewiseQuadratic((g,))
    return g


def constant(value: float, lo: float, hi: float) -> PiecewiseQuadratic:
    return PiecewiseQuadratic((Quadratic(0.0, 0.0, value, lo, hi),))


# ---------------------------------------------------------------------------
# construction hygiene


def _coeffs_close(p: Quadratic, q: Quadratic, tol: float) -> bool:
    return (
        abs(p.a - q.a) <= tol * (1.0 + abs(p.a) + abs(q.a))
        and abs(p.b - q.b) <= tol * (1.0 + abs(p.b) + abs(q.b))
        and abs(p.c - q.c) <= tol * (1.0 + abs(p.c) + abs(q.c))
    )


def normalize(
    pieces: Sequence[Quadratic],
    tags: Optional[Sequence[Any]] = None,
) -> Tuple[List[Quadratic], Optional[List[Any]]]:
    """Snap abutting domains, drop sub-tolerance slivers, merge equal pieces.

    When tags are supplied (one per piece) merging only happens between
    pieces with equal tags, and the surviving tag list is returned.
    """
    tol = TOLERANCE
    if not pieces:
        return [], ([] if tags is not None else None)
    work = [(p, None if tags is None else tags[k]) for k, p in enumerate(pieces)]

    # Drop slivers, widening a neighbour to keep the tiling gap-free.
    kept: List[Tuple[Quadratic, Any]] = []
    pending_lo: Optional[float] = None
    for p, t in work:
        lo = p.lo if pending_lo is None else min(p.lo, pending_lo)
        if p.hi - lo <= tol and len(work) > 1:
            pending_lo = lo
            continue
        kept.append((p.with_domain(lo, p.hi), t))
        pending_lo = None
    if pending_lo is not None:
        if kept:
            last, t = kept[-1]
            hi = max(last.hi, max(q.hi for q, _ in work))
            kept[-1] = (last.with_domain(last.lo, hi), t)
        else:
            kept.append(work[-1])

    # Snap each piece to start exactly where the previous one ends.
    snapped: List[Tuple[Quadratic, Any]] = []
    for p, t in kept:
        if snapped:
            prev = snapped[-1][0]
            if p.lo != prev.hi:
                p = p.with_domain(prev.hi, max(p.hi, prev.hi))
        snapped.append((p, t))

    # Merge runs of coefficient-equal pieces with equal tags.
    merged: List[Tuple[Quadratic, Any]] = []
    for p, t in snapped:
        if merged:
            prev, pt = merged[-1]
            if pt == t and _coeffs_close(prev, p, tol):
                merged[-1] = (prev.with_domain(prev.lo, p.hi), pt)
                continue
        merged.append((p, t))

    out_pieces = [p for p, _ in merged]
    out_tags = [t for _, t in merged] if tags is not None else None
    return out_pieces, out_tags


def build(pieces: Sequence[Quadratic]) -> PiecewiseQuadratic:
    """Normalise a sorted piece list into a PiecewiseQuadratic."""
    clean, _ = normalize(pieces)
    if not clean:
        raise InvariantViolation("cannot build an empty piecewise function")
    return PiecewiseQuadratic(tuple(clean))


def validate(f: PiecewiseQuadratic, tol: Optional[float] = None) -> None:
    """Check tiling, continuity, and the concave-kink rule.

    The kink rule requires the left derivative at every interior breakpoint
    to be at least the right derivative (minus tolerance): boundary cost
    functions never kink convexly.
    """
    tol = TOLERANCE if tol is None else tol
    if not f.pieces:
        raise InvariantViolation("empty piecewise function")
    span = abs(f.hi - f.lo) + 1.0
    for k, p in enumerate(f.pieces):
        if not (math.isfinite(p.a) and math.isfinite(p.b) and math.isfinite(p.c)):
            raise InvariantViolation(f"non-finite coefficients in piece {k}")
        if p.hi < p.lo:
            raise InvariantViolation(f"inverted domain in piece {k}")
        if k == 0:
            continue
        prev = f.pieces[k - 1]
        if abs(p.lo - prev.hi) > tol * span:
            raise InvariantViolation(
                f"gap between pieces {k - 1} and {k}: {prev.hi} vs {p.lo}"
            )
        x = prev.hi
        vl, vr = prev.value(x), p.value(x)
        if abs(vl - vr) > 1e3 * tol * (1.0 + abs(vl) + abs(vr)):
            raise InvariantViolation(
                f"discontinuity at breakpoint {x}: {vl} vs {vr}"
            )
        dl, dr = prev.deriv(x), p.deriv(x)
        if dl < dr - 1e4 * tol * (1.0 + abs(dl) + abs(dr)):
            raise InvariantViolation(
                f"convex kink at breakpoint {x}: left deriv {dl} < right deriv {dr}"
            )


# ---------------------------------------------------------------------------
# evaluation


def evaluate(f: PiecewiseQuadratic, s: float) -> float:
    """Value of the covering piece at s; OutOfDomain outside [lo, hi]."""
    tol = TOLERANCE * (1.0 + abs(f.lo) + abs(f.hi))
    if s < f.lo - tol or s > f.hi + tol:
        raise OutOfDomain(f"{s} outside [{f.lo}, {f.hi}]")
    s = min(max(s, f.lo), f.hi)
    for p in f.pieces:
        if s <= p.hi or p is f.pieces[-1]:
            return p.value(s)
    return f.pieces[-1].value(s)  # pragma: no cover


def piece_at(f: PiecewiseQuadratic, s: float) -> Tuple[int, Quadratic]:
    """Index and piece covering s (breakpoints resolve to the left piece)."""
    tol = TOLERANCE * (1.0 + abs(f.lo) + abs(f.hi))
    if s < f.lo - tol or s > f.hi + tol:
        raise OutOfDomain(f"{s} outside [{f.lo}, {f.hi}]")
    s = min(max(s, f.lo), f.hi)
    for k, p in enumerate(f.pieces):
        if s <= p.hi:
            return k, p
    return len(f.pieces) - 1, f.pieces[-1]


def minimum(f: PiecewiseQuadratic) -> Tuple[float, float]:
    """(min value, argmin) over the whole domain."""
    best, arg = math.inf, f.lo
    for p in f.pieces:
        for x in (p.lo, p.hi):
            v = p.value(x)
            if v < best:
                best, arg = v, x
        if p.a > 0.0:
            v = -p.b / (2.0 * p.a)
            if p.lo < v < p.hi and p.value(v) < best:
                best, arg = p.value(v), v
    return best, arg


# ---------------------------------------------------------------------------
# affine substitution and addition


def affine_substitute(
    f: PiecewiseQuadratic, alpha: float, beta: float
) -> PiecewiseQuadratic:
    """g(t) = f(alpha * t + beta); piece count unchanged, order flips if alpha < 0."""
    g, _ = affine_substitute_tagged(f, None, alpha, beta)
    return g


def affine_substitute_tagged(
    f: PiecewiseQuadratic,
    tags: Optional[Sequence[Any]],
    alpha: float,
    beta: float,
) -> Tuple[PiecewiseQuadratic, Optional[List[Any]]]:
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    out: List[Quadratic] = []
    for p in f.pieces:
        a = p.a * alpha * alpha
        b = 2.0 * p.a * alpha * beta + p.b * alpha
        c = (p.a * beta + p.b) * beta + p.c
        t0 = (p.lo - beta) / alpha
        t1 = (p.hi - beta) / alpha
        out.append(Quadratic(a, b, c, min(t0, t1), max(t0, t1)))
    new_tags = None if tags is None else list(tags)
    if alpha < 0:
        out.reverse()
        if new_tags is not None:
            new_tags.reverse()
    pieces, new_tags = normalize(out, new_tags)
    return PiecewiseQuadratic(tuple(pieces)), new_tags


def _cuts_union(f: PiecewiseQuadratic, g: PiecewiseQuadratic, lo: float, hi: float) -> List[float]:
    tol = TOLERANCE * (1.0 + abs(lo) + abs(hi))
    cuts = sorted(
        set([lo, hi])
        | {p.hi for p in f.pieces if lo + tol < p.hi < hi - tol}
        | {p.hi for p in g.pieces if lo + tol < p.hi < hi - tol}
    )
    merged = [cuts[0]]
    for x in cuts[1:]:
        if x - merged[-1] > tol:
            merged.append(x)
    merged[-1] = hi
    return merged


def add_quadratic(f: PiecewiseQuadratic, g: PwqLike) -> PiecewiseQuadratic:
    """Pointwise sum; breakpoints are the union of both breakpoint sets."""
    h, _ = add_tagged(f, None, g)
    return h


def add_tagged(
    f: PiecewiseQuadratic,
    tags: Optional[Sequence[Any]],
    g: PwqLike,
    sign: float = 1.0,
) -> Tuple[PiecewiseQuadratic, Optional[List[Any]]]:
    """f + sign * g, carrying f's per-piece tags through breakpoint refinement."""
    gp = as_pwq(g)
    lo, hi = f.lo, f.hi
    span_tol = TOLERANCE * (1.0 + abs(lo) + abs(hi))
    if abs(gp.lo - lo) > 1e3 * span_tol or abs(gp.hi - hi) > 1e3 * span_tol:
        raise InvariantViolation(
            f"domain mismatch in addition: [{lo},{hi}] vs [{gp.lo},{gp.hi}]"
        )
    cuts = _cuts_union(f, gp, lo, hi)
    out: List[Quadratic] = []
    out_tags: Optional[List[Any]] = [] if tags is not None else None
    for a, b in zip(cuts, cuts[1:]):
        mid = 0.5 * (a + b)
        kf, pf = piece_at(f, mid)
        _, pg = piece_at(gp, mid)
        out.append(
            Quadratic(
                pf.a + sign * pg.a, pf.b + sign * pg.b, pf.c + sign * pg.c, a, b
            )
        )
        if out_tags is not None:
            out_tags.append(tags[kf])
    pieces, out_tags = normalize(out, out_tags)
    return PiecewiseQuadratic(tuple(pieces)), out_tags


def restrict(f: PiecewiseQuadratic, lo: float, hi: float) -> PiecewiseQuadratic:
    g, _ = restrict_tagged(f, None, lo, hi)
    return g


def restrict_tagged(
    f: PiecewiseQuadratic,
    tags: Optional[Sequence[Any]],
    lo: float,
    hi: float,
) -> Tuple[PiecewiseQuadratic, Optional[List[Any]]]:
    """Restriction of f to [lo, hi] (must lie inside f's domain up to tolerance)."""
    span_tol = TOLERANCE * (1.0 + abs(f.lo) + abs(f.hi))
    if lo < f.lo - 1e3 * span_tol or hi > f.hi + 1e3 * span_tol:
        raise OutOfDomain(f"[{lo},{hi}] not inside [{f.lo},{f.hi}]")
    lo = max(lo, f.lo)
    hi = min(hi, f.hi)
    out: List[Quadratic] = []
    out_tags: Optional[List[Any]] = [] if tags is not None else None
    for k, p in enumerate(f.pieces):
        a, b = max(p.lo, lo), min(p.hi, hi)
        if b - a <= 0:
            continue
        out.append(p.with_domain(a, b))
        if out_tags is not None:
            out_tags.append(tags[k])
    if not out:
        # Degenerate (point) restriction: keep the covering piece.
        k, p = piece_at(f, 0.5 * (lo + hi))
        out = [p.with_domain(lo, hi)]
        if out_tags is not None:
            out_tags = [tags[k]]
    pieces, out_tags = normalize(out, out_tags)
    return PiecewiseQuadratic(tuple(pieces)), out_tags


# ---------------------------------------------------------------------------
# integral of |linear|


def integrate_abs_linear(
    alpha: float, beta: float, u0: float, u1: float
) -> PiecewiseQuadratic:
    """F(x) = integral from u0 to x of |alpha*u + beta| du, on [u0, u1].

    At most two pieces, with a breakpoint at the zero crossing of the
    linear function if it falls strictly inside the interval.  F(u0) = 0
    and F is nondecreasing.
    """
    if u1 < u0:
        raise ValueError("empty interval")
    tol = TOLERANCE * (1.0 + abs(u0) + abs(u1))
    if u1 - u0 <= tol:
        return constant(0.0, u0, u1)

    def anti(sig: float) -> Tuple[float, float]:
        # antiderivative of sig*(alpha*u + beta) is sig*(alpha/2 u^2 + beta u)
        return sig * alpha / 2.0, sig * beta

    if abs(alpha) <= TOLERANCE:
        m = abs(beta)
        return PiecewiseQuadratic((Quadratic(0.0, m, -m * u0, u0, u1),))
    r = -beta / alpha
    mid = 0.5 * (u0 + u1)
    if r <= u0 + tol or r >= u1 - tol:
        sig = 1.0 if alpha * mid + beta >= 0 else -1.0
        a, b = anti(sig)
        c = -(a * u0 + b) * u0
        return PiecewiseQuadratic((Quadratic(a, b, c, u0, u1),))
    sig1 = 1.0 if alpha * 0.5 * (u0 + r) + beta >= 0 else -1.0
    a1, b1 = anti(sig1)
    c1 = -(a1 * u0 + b1) * u0
    f_r = (a1 * r + b1) * r + c1
    a2, b2 = anti(-sig1)
    c2 = f_r - (a2 * r + b2) * r
    return PiecewiseQuadratic(
        (Quadratic(a1, b1, c1, u0, r), Quadratic(a2, b2, c2, r, u1))
    )


# ---------------------------------------------------------------------------
# roots


def stable_roots(a: float, b: float, c: float) -> Tuple[float, ...]:
    """Real roots of a*x^2 + b*x + c with the numerically stable formula."""
    if abs(a) <= TOLERANCE:
        if abs(b) <= TOLERANCE:
            return ()
        return (-c / b,)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return ()
    sq = math.sqrt(disc)
    if b >= 0.0:
        qv = -0.5 * (b + sq)
    else:
        qv = -0.5 * (b - sq)
    roots = []
    if qv != 0.0:
        roots.append(qv / a)
        roots.append(c / qv)
    else:
        roots.append(0.0)
        if a != 0.0:
            roots.append(-b / a)
    roots = sorted(set(roots))
    return tuple(roots)


def _root_of_piece(p: Quadratic, target: float, lo: float, hi: float) -> float:
    """Solve p(x) = target for x in [lo, hi]; falls back to bisection."""
    for r in stable_roots(p.a, p.b, p.c - target):
        if lo - TOLERANCE <= r <= hi + TOLERANCE:
            return min(max(r, lo), hi)
    f_lo = p.value(lo) - target
    f_hi = p.value(hi) - target
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        # No sign change: report the endpoint closer to the target.
        return lo if abs(f_lo) <= abs(f_hi) else hi
    a, b = lo, hi
    for _ in range(80):
        m = 0.5 * (a + b)
        fm = p.value(m) - target
        if fm == 0.0:
            return m
        if (fm > 0.0) == (f_lo > 0.0):
            a = m
        else:
            b = m
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# cumulative minimum


def cumulative_min(f: PiecewiseQuadratic) -> PiecewiseQuadratic:
    """g(t) = min over s <= t of f(s)."""
    g, _ = cumulative_min_annotated(f)
    return g


def cumulative_min_annotated(
    f: PiecewiseQuadratic,
) -> Tuple[PiecewiseQuadratic, List[Optional[float]]]:
    """Cumulative minimum plus per-piece argmin annotations.

    Annotation None means the output piece follows f itself (the minimum at
    t is attained at t); a float s* means the piece is flat and the minimum
    was attained earlier, at s*.
    """
    tol = TOLERANCE
    out: List[Quadratic] = []
    tags: List[Optional[float]] = []
    m = math.inf
    m_arg = f.lo

    def emit(piece: Quadratic, tag: Optional[float]) -> None:
        if piece.hi - piece.lo < 0:
            return
        out.append(piece)
        tags.append(tag)

    for p in f.pieces:
        # Split the piece into monotone stages of its own prefix minimum:
        # 'follow' stages where the prefix minimum is the piece itself
        # (nonincreasing stretches) and 'const' stages where it is flat.
        stages: List[Tuple[str, float, float, float]] = []  # kind, lo, hi, arg
        l, h = p.lo, p.hi
        if p.a > tol:
            v = -p.b / (2.0 * p.a)
            if v <= l + tol:
                stages.append(("const", l, h, l))
            elif v >= h - tol:
                stages.append(("follow", l, h, 0.0))
            else:
                stages.append(("follow", l, v, 0.0))
                stages.append(("const", v, h, v))
        elif p.a < -tol:
            v = -p.b / (2.0 * p.a)
            if l >= v - tol:
                stages.append(("follow", l, h, 0.0))
            elif h <= v + tol:
                stages.append(("const", l, h, l))
            else:
                x2 = 2.0 * v - l  # where the concave arc returns to its start value
                if x2 >= h - tol:
                    stages.append(("const", l, h, l))
                else:
                    stages.append(("const", l, x2, l))
                    stages.append(("follow", x2, h, 0.0))
        else:
            if p.b > tol:
                stages.append(("const", l, h, l))
            else:
                # Constant or decreasing linear pieces follow themselves;
                # constants count as 'follow' so no-op travel keeps direct
                # provenance on ties.
                stages.append(("follow", l, h, 0.0))

        for kind, sl, sh, arg in stages:
            if kind == "const":
                w = p.value(arg)
                if w < m:
                    m, m_arg = w, arg
                emit(Quadratic(0.0, 0.0, m, sl, sh), m_arg)
                continue
            v_start = p.value(sl)
            v_end = p.value(sh)
            if v_start <= m + tol:
                emit(p.with_domain(sl, sh), None)
                if v_end < m:
                    m, m_arg = v_end, sh
            elif v_end >= m - tol:
                emit(Quadratic(0.0, 0.0, m, sl, sh), m_arg)
            else:
                x = _root_of_piece(p, m, sl, sh)
                emit(Quadratic(0.0, 0.0, m, sl, x), m_arg)
                emit(p.with_domain(x, sh), None)
                m, m_arg = v_end, sh

    pieces, tags = normalize(out, tags)
    distinct = {(round(p.a / 1e-7), round(p.b / 1e-7)) for p in f.pieces}
    if len(pieces) > len(f.pieces) + len(distinct) + 1:
        raise InvariantViolation(
            f"cumulative minimum grew from {len(f.pieces)} to {len(pieces)} pieces "
            f"with only {len(distinct)} distinct coefficient pairs"
        )
    return PiecewiseQuadratic(tuple(pieces)), tags


def offset_cumulative_min(
    f: PiecewiseQuadratic, qc: PwqLike
) -> PiecewiseQuadratic:
    """g(t) = min over s <= t of (f(s) - qc(s)) + qc(t).

    With qc constant 0 this is the plain cumulative minimum.  qc may be a
    single Quadratic or a piecewise one (edge height integrals have a
    breakpoint where the zero line crosses the edge).
    """
    g, _ = offset_cumulative_min_annotated(f, qc)
    return g


def offset_cumulative_min_annotated(
    f: PiecewiseQuadratic, qc: PwqLike
) -> Tuple[PiecewiseQuadratic, List[Optional[float]]]:
    diff, _ = add_tagged(f, None, qc, sign=-1.0)
    dmin, args = cumulative_min_annotated(diff)
    g, args = add_tagged(dmin, args, qc, sign=1.0)
    return g, list(args or [])


# ---------------------------------------------------------------------------
# lower envelope


def _tag_pref(tag: Any) -> float:
    if isinstance(tag, tuple) and tag and isinstance(tag[0], (int, float)):
        return float(tag[0])
    return 0.0


def _compare_span(
    e: Quadratic,
    et: Any,
    q: Quadratic,
    qt: Any,
    a: float,
    b: float,
) -> List[Tuple[Quadratic, Any]]:
    """Pointwise minimum of two pieces on [a, b], as a piece/tag list."""
    tol = TOLERANCE
    da, db, dc = q.a - e.a, q.b - e.b, q.c - e.c
    cuts = [a]
    for r in stable_roots(da, db, dc):
        if a + tol < r < b - tol:
            cuts.append(r)
    cuts.append(b)
    cuts.sort()
    out: List[Tuple[Quadratic, Any]] = []
    for s0, s1 in zip(cuts, cuts[1:]):
        if s1 - s0 <= 0:
            continue
        mid = 0.5 * (s0 + s1)
        d = (da * mid + db) * mid + dc
        scale = 1.0 + abs(e.value(mid)) + abs(q.value(mid))
        if abs(d) <= tol * scale:
            winner = (q, qt) if _tag_pref(qt) > _tag_pref(et) else (e, et)
        elif d < 0.0:
            winner = (q, qt)
        else:
            winner = (e, et)
        out.append((winner[0].with_domain(s0, s1), winner[1]))
    return out


def _env_insert(
    env: List[Tuple[Quadratic, Any]],
    q: Quadratic,
    tag: Any,
) -> List[Tuple[Quadratic, Any]]:
    tol = TOLERANCE
    ql, qh = q.lo, q.hi
    if qh - ql <= tol:
        return env
    out: List[Tuple[Quadratic, Any]] = []
    cur = ql
    for e, et in env:
        if e.hi <= ql or e.lo >= qh:
            out.append((e, et))
            continue
        if e.lo > cur + tol:
            out.append((q.with_domain(cur, e.lo), tag))
            cur = e.lo
        a = max(e.lo, cur)
        b = min(e.hi, qh)
        if e.lo < a - tol:
            out.append((e.with_domain(e.lo, a), et))
        if b > a:
            out.extend(_compare_span(e, et, q, tag, a, b))
            cur = b
        if e.hi > b + tol:
            out.append((e.with_domain(b, e.hi), et))
    if cur < qh - tol:
        out.append((q.with_domain(cur, qh), tag))
    out.sort(key=lambda it: it[0].lo)
    return out


def lower_envelope_tagged(
    items: Sequence[Tuple[PiecewiseQuadratic, Sequence[Any]]],
    lo: Optional[float] = None,
    hi: Optional[float] = None,
) -> Tuple[PiecewiseQuadratic, List[Any]]:
    """Pointwise minimum of fragments with per-piece tags.

    Fragments may cover only parts of [lo, hi]; jointly they must cover it
    (CoverageGap otherwise).  Ties go to the tag with the larger leading
    preference number.
    """
    if not items:
        raise CoverageGap("no candidate fragments")
    if lo is None:
        lo = min(f.lo for f, _ in items)
    if hi is None:
        hi = max(f.hi for f, _ in items)
    env: List[Tuple[Quadratic, Any]] = []
    for f, tags in items:
        for k, p in enumerate(f.pieces):
            a = max(p.lo, lo)
            b = min(p.hi, hi)
            if b - a <= 0:
                continue
            env = _env_insert(env, p.with_domain(a, b), tags[k])
    if not env:
        raise CoverageGap(f"no coverage of [{lo}, {hi}]")
    span_tol = 1e3 * TOLERANCE * (1.0 + abs(lo) + abs(hi))
    cur = lo
    for e, _ in env:
        if e.lo > cur + span_tol:
            raise CoverageGap(f"gap [{cur}, {e.lo}] in envelope coverage")
        cur = max(cur, e.hi)
    if cur < hi - span_tol:
        raise CoverageGap(f"gap [{cur}, {hi}] in envelope coverage")
    pieces = [p for p, _ in env]
    tags = [t for _, t in env]
    if pieces:
        pieces[0] = pieces[0].with_domain(lo, pieces[0].hi)
        pieces[-1] = pieces[-1].with_domain(pieces[-1].lo, hi)
    pieces, tags = normalize(pieces, tags)
    return PiecewiseQuadratic(tuple(pieces)), list(tags or [])


def lower_envelope_ordered(
    candidates: Sequence[PiecewiseQuadratic],
    lo: Optional[float] = None,
    hi: Optional[float] = None,
) -> PiecewiseQuadratic:
    """Pointwise minimum of candidate fragments over their joint interval."""
    items = [
        (f, [(-float(k), None)] * len(f.pieces)) for k, f in enumerate(candidates)
    ]
    env, _ = lower_envelope_tagged(items, lo, hi)
    return env


# ---------------------------------------------------------------------------
# serialisation


def to_json(f: PiecewiseQuadratic) -> List[dict]:
    """Debug serialisation: list of {a, b, c, lo, hi} dicts."""
    return [
        {"a": p.a, "b": p.b, "c": p.c, "lo": p.lo, "hi": p.hi} for p in f.pieces
    ]


def from_json(data: Iterable[dict]) -> PiecewiseQuadratic:
    pieces = tuple(
        Quadratic(d["a"], d["b"], d["c"], d["lo"], d["hi"]) for d in data
    )
    if not pieces:
        raise InvariantViolation("empty serialised piecewise function")
    return PiecewiseQuadratic(pieces)
