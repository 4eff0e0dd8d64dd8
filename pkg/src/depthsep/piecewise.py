"""Piecewise-polynomial functions on the line: the package's normal form.

A :class:`PiecewisePoly` pairs a :class:`~depthsep.partition.Partition` with
one exact polynomial per piece.  Everything a gate network computes along a
line lives in this form, so the module supplies the full calculus: pointwise
evaluation, linear combination, polynomial composition, semi-algebraic gate
application, the 1/2-threshold classifier, sign-alternation counting, exact
piece-wise disagreement, and L1 distance as a certified enclosure.

Piece merging is always explicit (:func:`merge_equal`): gate application and
the classifier invoke it to keep their documented piece-count guarantees,
while refinement-producing operations leave their partitions untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence

from .exact import (
    AlgebraicReal,
    IntegralEnclosure,
    MPoly,
    Point,
    Poly,
    RatLike,
    integrate_abs,
    isolate_roots,
    point_cmp,
    point_sign_of,
    poly_at_algebraic,
    rat,
    rat_str,
)
from .gates import SaGate, input_names
from .partition import Interval, Partition, join_adjacent, locate, refine

__all__ = [
    "PiecewisePoly",
    "CrossingReport",
    "IntegralEnclosure",
    "pwp_eval",
    "pwp_linear",
    "pwp_compose_poly",
    "pwp_apply_sa_gate",
    "merge_equal",
    "classifier",
    "crossing_number",
    "disagreement",
    "l1_distance",
]


@dataclass(frozen=True)
class PiecewisePoly:
    """One exact polynomial per piece of a partition of the line.

    Nothing forces continuity across pieces: gates are free to jump, and
    isolated points may carry their own polynomial.
    """

    partition: Partition
    polys: tuple[Poly, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "polys", tuple(self.polys))
        if len(self.polys) != len(self.partition.pieces):
            raise ValueError("need exactly one polynomial per piece")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def const(c: RatLike) -> "PiecewisePoly":
        return PiecewisePoly(Partition.whole(), (Poly.const(c),))

    @staticmethod
    def of_poly(p: Poly) -> "PiecewisePoly":
        return PiecewisePoly(Partition.whole(), (p,))

    @staticmethod
    def identity() -> "PiecewisePoly":
        return PiecewisePoly(Partition.whole(), (Poly.x(),))

    # -- structure -----------------------------------------------------------

    @property
    def piece_count(self) -> int:
        return len(self.polys)

    @property
    def max_degree(self) -> int:
        """Largest piece degree (0 for an all-zero function)."""
        return max((max(p.degree, 0) for p in self.polys), default=0)

    def pieces(self) -> tuple[tuple[Interval, Poly], ...]:
        return tuple(zip(self.partition.pieces, self.polys))

    def to_json(self) -> dict:
        return {
            "pieces": [iv.to_json() for iv in self.partition.pieces],
            "polys": [[rat_str(c) for c in p.coeffs] for p in self.polys],
        }

    @staticmethod
    def from_json(obj: dict) -> "PiecewisePoly":
        part = Partition(tuple(Interval.from_json(iv) for iv in obj["pieces"]))
        polys = tuple(Poly.of(*(rat(c) for c in cs)) for cs in obj["polys"])
        return PiecewisePoly(part, polys)


@dataclass(frozen=True)
class CrossingReport:
    """Exact classifier-piece counts for a pair of functions.

    ``disagree`` counts the pieces of the first classifier on which the two
    classifiers differ everywhere.
    """

    s_f: int
    s_g: int
    disagree: int

    def __post_init__(self) -> None:
        if self.s_f < 1 or self.s_g < 1:
            raise ValueError("classifiers always have at least one piece")
        if not 0 <= self.disagree <= self.s_f:
            raise ValueError("disagreement count out of range")


def pwp_eval(f: PiecewisePoly, x: "Point | RatLike") -> Point:
    """Value at a point; rational in, rational out (for rational pieces)."""
    p = f.polys[locate(f.partition, x)]
    if isinstance(x, AlgebraicReal):
        if not x.is_rational:
            y = poly_at_algebraic(p, x)
            return y.as_rational() if y.is_rational else y
        x = x.as_rational()
    return p(rat(x))


def _piece_polys(f: PiecewisePoly, parts: Partition, samples: Sequence[Point]) -> list[Poly]:
    """f's polynomial on each piece of a partition refining f's own."""
    return [f.polys[locate(f.partition, s)] for s in samples]


def pwp_linear(coeffs: Sequence[RatLike], fs: Sequence[PiecewisePoly]) -> PiecewisePoly:
    """Pointwise sum of scaled functions on the common refinement."""
    if len(coeffs) != len(fs):
        raise ValueError("one coefficient per function")
    if not fs:
        raise ValueError("need at least one function")
    cs = [rat(c) for c in coeffs]
    part = refine([f.partition for f in fs])
    samples = [piece.sample() for piece in part.pieces]
    per_input = [_piece_polys(f, part, samples) for f in fs]
    polys = tuple(
        sum((c * polys_i[j] for c, polys_i in zip(cs, per_input)), Poly.zero())
        for j in range(len(part.pieces))
    )
    return PiecewisePoly(part, polys)


def pwp_compose_poly(F: MPoly, gs: Sequence[PiecewisePoly]) -> PiecewisePoly:
    """The polynomial F applied to k piecewise-polynomial arguments."""
    names = input_names(len(gs))
    stray = F.used_variables() - set(names)
    if stray:
        raise ValueError(f"unbound variables in composition: {sorted(stray)}")
    if not gs:
        return PiecewisePoly.const(F.eval({}))
    part = refine([g.partition for g in gs])
    samples = [piece.sample() for piece in part.pieces]
    per_input = [_piece_polys(g, part, samples) for g in gs]
    polys = tuple(
        F.compose_univariate(
            {name: polys_i[j] for name, polys_i in zip(names, per_input)}
        )
        for j in range(len(part.pieces))
    )
    return PiecewisePoly(part, polys)


def _split_piece(piece: Interval, cuts: Sequence[Point]) -> list[Interval]:
    """Cut a piece at ascending points, isolating each cut as a singleton.

    Cuts must lie inside the piece (closed endpoints allowed).
    """
    if not cuts:
        return [piece]
    out: list[Interval] = []
    pending_lo, pending_closed = piece.lo, piece.lo_closed
    for c in cuts:
        if pending_lo is None or point_cmp(c, pending_lo) != 0:
            out.append(Interval(pending_lo, c, pending_closed, False))
        out.append(Interval.point(c))
        pending_lo, pending_closed = c, False
    if piece.hi is None or point_cmp(pending_lo, piece.hi) != 0:
        out.append(Interval(pending_lo, piece.hi, pending_closed, piece.hi_closed))
    return out


def _sign_cuts(q: Poly, piece: Interval) -> list[Point]:
    """Roots of q inside the piece (constant-sign regions meet at these)."""
    if q.is_zero or q.degree == 0:
        return []
    if piece.is_singleton:
        return []
    return [
        r.as_rational() if r.is_rational else r for r in isolate_roots(q, piece)
    ]


def merge_equal(f: PiecewisePoly) -> PiecewisePoly:
    """Explicitly coalesce pieces: join neighbors carrying the same polynomial
    and absorb isolated points whose value agrees with a neighbor there."""

    def value_matches(poly: Poly, other: Poly, at: Point) -> bool:
        return point_sign_of(at, poly - other) == 0

    ivs: list[Interval] = []
    pls: list[Poly] = []
    for iv, p in zip(f.partition.pieces, f.polys):
        if ivs:
            prev_iv, prev_p = ivs[-1], pls[-1]
            if p == prev_p:
                ivs[-1] = join_adjacent(prev_iv, iv)
                continue
            if iv.is_singleton and value_matches(p, prev_p, iv.lo):
                ivs[-1] = join_adjacent(prev_iv, iv)
                continue
            if prev_iv.is_singleton and value_matches(prev_p, p, prev_iv.lo):
                ivs[-1] = join_adjacent(prev_iv, iv)
                pls[-1] = p
                continue
        ivs.append(iv)
        pls.append(p)
    return PiecewisePoly(Partition(tuple(ivs)), tuple(pls))


def pwp_apply_sa_gate(gate: SaGate, gs: Sequence[PiecewisePoly]) -> PiecewisePoly:
    """Feed piecewise-polynomial inputs through a semi-algebraic gate.

    Every predicate is composed with the inputs on their common refinement and
    sign-partitioned at its roots; on each resulting region the indicator
    products are constant, so the gate is the plain sum of its firing term
    polynomials there.  Adjacent regions that end up with the same polynomial
    are merged, which keeps the output within the documented piece bound of
    (number of predicates) x (refined input pieces) x (1 + pred degree x
    input degree).
    """
    gate = gate.bind() if gate.params else gate
    if len(gs) != gate.arity:
        raise ValueError(f"gate expects {gate.arity} inputs, got {len(gs)}")
    if gs:
        base = refine([g.partition for g in gs])
    else:
        base = Partition.whole()
    names = input_names(gate.arity)
    base_samples = [piece.sample() for piece in base.pieces]
    per_input = [_piece_polys(g, base, base_samples) for g in gs]
    assigns = [
        {name: polys_i[j] for name, polys_i in zip(names, per_input)}
        for j in range(len(base.pieces))
    ]
    # predicate polynomials per base piece
    pred_on_piece = [
        [q.compose_univariate(assigns[j]) for q in gate.preds]
        for j in range(len(base.pieces))
    ]
    term_on_piece = [
        [t.poly.compose_univariate(assigns[j]) for t in gate.terms]
        for j in range(len(base.pieces))
    ]

    out_ivs: list[Interval] = []
    out_polys: list[Poly] = []
    for j, piece in enumerate(base.pieces):
        cuts: list[Point] = []
        for q in pred_on_piece[j]:
            cuts.extend(_sign_cuts(q, piece))
        cuts.sort(key=cmp_to_key(point_cmp))
        deduped: list[Point] = []
        for c in cuts:
            if not deduped or point_cmp(deduped[-1], c) != 0:
                deduped.append(c)
        for region in _split_piece(piece, deduped):
            at = region.sample()
            signs = [point_sign_of(at, q) for q in pred_on_piece[j]]
            total = Poly.zero()
            for term, tp in zip(gate.terms, term_on_piece[j]):
                if all(signs[i] < 0 for i in term.lt) and all(
                    signs[i] >= 0 for i in term.ge
                ):
                    total = total + tp
            out_ivs.append(region)
            out_polys.append(total)
    return merge_equal(PiecewisePoly(Partition(tuple(out_ivs)), tuple(out_polys)))


def classifier(f: PiecewisePoly) -> PiecewisePoly:
    """The 0/1 function 1[f(x) >= 1/2], on its coarsest partition.

    Breakpoints are roots of the piece polynomials minus 1/2 (or original
    piece boundaries); exact ties classify as 1.
    """
    half = Poly.const(Fraction(1, 2))
    out_ivs: list[Interval] = []
    out_polys: list[Poly] = []
    for piece, p in zip(f.partition.pieces, f.polys):
        gap = p - half
        if gap.is_zero:
            out_ivs.append(piece)
            out_polys.append(Poly.const(1))
            continue
        cuts = _sign_cuts(gap, piece)
        for region in _split_piece(piece, cuts):
            sign = point_sign_of(region.sample(), gap)
            out_ivs.append(region)
            out_polys.append(Poly.const(1) if sign >= 0 else Poly.zero())
    return merge_equal(PiecewisePoly(Partition(tuple(out_ivs)), tuple(out_polys)))


def crossing_number(f: PiecewisePoly) -> int:
    """Number of maximal intervals on which the classifier of f is constant."""
    return classifier(f).piece_count


def _const_value(p: Poly) -> Fraction:
    if p.degree > 0:
        raise ValueError("expected a constant piece")
    return p.coeffs[0] if p.coeffs else Fraction(0)


def disagreement(f: PiecewisePoly, g: PiecewisePoly) -> CrossingReport:
    """Count classifier pieces of f on which the two classifiers differ
    everywhere, by exact refinement."""
    fc = classifier(f)
    gc = classifier(g)
    common = refine([fc.partition, gc.partition])
    fvals = [_const_value(p) for p in fc.polys]
    gvals = [_const_value(p) for p in gc.polys]
    differs_everywhere = [True] * fc.piece_count
    for sub in common.pieces:
        at = sub.sample()
        fi = locate(fc.partition, at)
        gi = locate(gc.partition, at)
        if fvals[fi] == gvals[gi]:
            differs_everywhere[fi] = False
    return CrossingReport(
        s_f=fc.piece_count,
        s_g=gc.piece_count,
        disagree=sum(differs_everywhere),
    )


def l1_distance(
    f: PiecewisePoly,
    g: PiecewisePoly,
    lo: RatLike,
    hi: RatLike,
    width: RatLike | None = None,
) -> IntegralEnclosure:
    """Certified enclosure of the integral of |f - g| over [lo, hi].

    Exact (zero-width) whenever every breakpoint and sign change involved is
    rational; otherwise the enclosure narrows below ``width``.
    """
    lo_q, hi_q = rat(lo), rat(hi)
    if lo_q >= hi_q:
        raise ValueError("window must satisfy lo < hi")
    w = rat(width) if width is not None else Fraction(1, 10**9)
    if w <= 0:
        raise ValueError("width must be positive")
    part = refine([f.partition, g.partition])
    samples = [piece.sample() for piece in part.pieces]
    f_polys = _piece_polys(f, part, samples)
    g_polys = _piece_polys(g, part, samples)

    spans: list[tuple[Point, Point, Poly]] = []
    for piece, pf, pg in zip(part.pieces, f_polys, g_polys):
        a: Point = lo_q if piece.lo is None else piece.lo
        b: Point = hi_q if piece.hi is None else piece.hi
        if point_cmp(a, lo_q) < 0:
            a = lo_q
        if point_cmp(b, hi_q) > 0:
            b = hi_q
        if point_cmp(a, b) >= 0:
            continue
        spans.append((a, b, pf - pg))
    total = IntegralEnclosure.point(0)
    if not spans:
        return total
    per_span = w / len(spans)
    for a, b, diff in spans:
        total = total + integrate_abs(diff, a, b, per_span)
    return total
