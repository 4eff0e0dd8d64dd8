"""Reference constructions around the unit tent: three one-bump generators,
network stacking and iteration, the dyadic closed form of the iterated tent,
certification of alternating bump shapes, the deep hard-instance network, and
exact repetition of a symmetric signal.

Everything here is exact: networks are built from the gate encoders, shapes
are certified by root isolation of derivatives, and compositions are carried
out on the piecewise-polynomial representations themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Optional, Sequence

from .exact import (
    AlgebraicReal,
    MPoly,
    Point,
    Poly,
    RatLike,
    isolate_roots,
    point_cmp,
    point_sign_of,
    poly_at_algebraic,
    rat,
)
from .gates import encode_min, encode_poly_activation, encode_relu
from .network import NetworkGraph, Node, compile_net
from .partition import Interval, Partition, locate
from .piecewise import PiecewisePoly, merge_equal, pwp_eval, _split_piece

__all__ = [
    "TriangleCert",
    "ShapeIndex",
    "triangle_relu",
    "triangle_min",
    "triangle_quad",
    "compose_nets",
    "iterate",
    "shape_index",
    "closed_form_fk",
    "triangle_check",
    "hard_network",
    "repeat_signal",
]


# ---------------------------------------------------------------------------
# certification records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriangleCert:
    """Certificate that a function alternates strictly 0 -> 1 -> 0 -> ...
    across ``2 * peaks`` intervals of a window.

    ``breakpoints`` holds the 2*peaks + 1 turning points in ascending order,
    starting and ending at the window edges; the function is 0 at
    even-indexed breakpoints, 1 at odd-indexed ones, and strictly monotone
    between neighbors.
    """

    peaks: int
    breakpoints: tuple[Point, ...]
    window: tuple[Point, Point]

    def __post_init__(self) -> None:
        if self.peaks < 1:
            raise ValueError("a certificate needs at least one peak")
        if len(self.breakpoints) != 2 * self.peaks + 1:
            raise ValueError("breakpoint count must be 2*peaks + 1")
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            if point_cmp(a, b) >= 0:
                raise ValueError("breakpoints must be strictly ascending")
        lo, hi = self.window
        if point_cmp(self.breakpoints[0], lo) != 0 or (
            point_cmp(self.breakpoints[-1], hi) != 0
        ):
            raise ValueError("breakpoints must span the window exactly")


@dataclass(frozen=True)
class ShapeIndex:
    """Dyadic coordinates of a point of [0,1] at iteration ``level``:
    the point is ``(segment + offset) * 2**(1 - level)`` with ``offset`` in
    [0, 1), and the ``level``-fold tent iterate depends only on ``offset``.
    """

    level: int
    segment: int
    offset: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "offset", rat(self.offset))
        if self.level < 1:
            raise ValueError("level must be at least 1")
        if not 0 <= self.offset < 1:
            raise ValueError("offset must lie in [0, 1)")
        if not 0 <= self.segment <= 2 ** (self.level - 1):
            raise ValueError("segment out of range for the level")
        if self.segment + self.offset > 2 ** (self.level - 1):
            raise ValueError("the encoded point exceeds 1")

    @property
    def point(self) -> Fraction:
        """The encoded input point."""
        return (self.segment + self.offset) * Fraction(2) ** (1 - self.level)

    @property
    def value(self) -> Fraction:
        """The level-fold tent iterate at the encoded point."""
        if self.offset <= Fraction(1, 2):
            return 2 * self.offset
        return 2 * (1 - self.offset)


def shape_index(z: RatLike, k: int) -> ShapeIndex:
    """Split z in [0,1] as (segment + offset) * 2**(1-k), offset in [0,1)."""
    if k < 1:
        raise ValueError("need k >= 1")
    zq = rat(z)
    if not 0 <= zq <= 1:
        raise ValueError("the closed form covers [0, 1] only")
    scaled = zq * 2 ** (k - 1)
    segment = scaled.numerator // scaled.denominator
    return ShapeIndex(k, segment, scaled - segment)


def closed_form_fk(z: RatLike, k: int) -> Fraction:
    """The k-fold iterate of the unit tent at z in [0,1], in closed form.

    The tent folds [0,1] in half k-1 times, so the iterate at z depends only
    on the position of z within its dyadic segment of width 2**(1-k): it
    rises 0 -> 1 on the first half of the segment and falls back on the
    second.
    """
    return shape_index(z, k).value


# ---------------------------------------------------------------------------
# the three one-bump generators
# ---------------------------------------------------------------------------


def triangle_relu() -> NetworkGraph:
    """The unit tent as a two-layer rectifier net.

    Layer one computes r1 = max(0, z) and r2 = max(0, z - 1/2); the output
    rectifier max(0, 2*r1 - 4*r2) then rises 0 -> 1 on [0, 1/2], falls back
    to 0 on [1/2, 1], and vanishes outside [0, 1].
    """
    return NetworkGraph(
        1,
        (
            (
                Node(encode_relu([1]), ((0, 0),)),
                Node(encode_relu([1], Fraction(-1, 2)), ((0, 0),)),
            ),
            (Node(encode_relu([2, -4]), ((1, 0), (1, 1))),),
        ),
    )


def triangle_min() -> NetworkGraph:
    """The unit tent as the minimum of two rectified lines.

    Layer one computes max(0, 2z) and max(0, 2 - 2z); their pointwise
    minimum agrees with :func:`triangle_relu` everywhere.
    """
    return NetworkGraph(
        1,
        (
            (
                Node(encode_relu([2]), ((0, 0),)),
                Node(encode_relu([-2], 2), ((0, 0),)),
            ),
            (
                Node(
                    encode_min([MPoly.var("v1"), MPoly.var("v2")], arity=2),
                    ((1, 0), (1, 1)),
                ),
            ),
        ),
    )


def triangle_quad() -> NetworkGraph:
    """The downward unit parabola 4z(1-z) as a single polynomial gate.

    One bump on [0, 1] like the rectifier tent, but smooth: iterating it
    squares the degree instead of adding layers of kinks.
    """
    v = MPoly.var("v1")
    gate = encode_poly_activation(
        [(Interval.whole(), Poly.x())], 4 * v - 4 * v * v, arity=1
    )
    return NetworkGraph(1, ((Node(gate, ((0, 0),)),),))


# ---------------------------------------------------------------------------
# stacking networks
# ---------------------------------------------------------------------------


def _append_net(layers: list[tuple[Node, ...]], net: NetworkGraph) -> None:
    """Append a univariate net so its first layer reads the current output."""
    offset = len(layers)
    for layer in net.layers:
        layers.append(
            tuple(
                Node(nd.gate, tuple((offset + lyr, idx) for lyr, idx in nd.parents))
                for nd in layer
            )
        )


def _merged_params(nets: Sequence[NetworkGraph]) -> dict:
    merged: dict = {}
    for net in nets:
        for name, value in net.params.items():
            if name in merged and merged[name] != value:
                raise ValueError(f"parameter {name!r} bound to two values")
            merged[name] = value
    return merged


def compose_nets(outer: NetworkGraph, inner: NetworkGraph) -> NetworkGraph:
    """The network computing outer(inner(x)); outer must be univariate."""
    if outer.dim != 1:
        raise ValueError("the outer network must be univariate")
    layers = list(inner.layers)
    _append_net(layers, outer)
    return NetworkGraph(inner.dim, tuple(layers), _merged_params((inner, outer)))


def iterate(net: NetworkGraph, k: int) -> NetworkGraph:
    """The k-fold self-composition of a univariate network.

    Layers are stacked k times; parameter slots keep their names, so the
    distinct-parameter count of the iterate equals that of the base net.
    """
    if net.dim != 1:
        raise ValueError("iteration needs a univariate network")
    if k < 1:
        raise ValueError("need k >= 1")
    if k == 1:
        return net
    layers = list(net.layers)
    for _ in range(k - 1):
        _append_net(layers, net)
    return NetworkGraph(1, tuple(layers), dict(net.params))


# ---------------------------------------------------------------------------
# shape certification
# ---------------------------------------------------------------------------


def _clipped_spans(
    f: PiecewisePoly, lo: Fraction, hi: Fraction
) -> list[tuple[Point, Point, Poly]]:
    """The pieces of f meeting [lo, hi], as closed hulls [a, b] with polys."""
    spans: list[tuple[Point, Point, Poly]] = []
    for piece, poly in zip(f.partition.pieces, f.polys):
        a: Point = lo if piece.lo is None or point_cmp(piece.lo, lo) < 0 else piece.lo
        b: Point = hi if piece.hi is None or point_cmp(piece.hi, hi) > 0 else piece.hi
        order = point_cmp(a, b)
        if order > 0:
            continue
        if order == 0 and not piece.contains(a):
            continue
        spans.append((a, b, poly))
    return spans


def triangle_check(
    f: PiecewisePoly, window: tuple[RatLike, RatLike]
) -> Optional[TriangleCert]:
    """Certify that f alternates strictly 0 -> 1 -> ... -> 0 on the window.

    Accepts exactly the continuous functions that rise from 0 to 1 and fall
    back some whole number of times, strictly monotone between turning
    points.  Turning points are found by isolating the roots of each piece's
    derivative; a failed requirement returns None rather than raising.
    """
    lo, hi = rat(window[0]), rat(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")

    spans = _clipped_spans(f, lo, hi)
    for (_, b0, p0), (_, _, p1) in zip(spans, spans[1:]):
        if point_sign_of(b0, p0 - p1) != 0:
            return None  # jump between neighboring pieces

    gaps: list[tuple[Point, Point, int]] = []
    for a, b, poly in spans:
        if point_cmp(a, b) == 0:
            continue
        deriv = poly.derivative()
        if deriv.is_zero:
            return None  # flat stretch cannot be strictly monotone
        marks = [a] + list(isolate_roots(deriv, Interval(a, b, False, False))) + [b]
        for u, v in zip(marks, marks[1:]):
            sign = point_sign_of(Interval(u, v, False, False).sample(), deriv)
            gaps.append((u, v, sign))

    runs: list[list] = []  # [start, end, direction]
    for u, v, sign in gaps:
        if runs and runs[-1][2] == sign:
            runs[-1][1] = v
        else:
            runs.append([u, v, sign])
    if len(runs) < 2 or len(runs) % 2 or runs[0][2] != 1:
        return None

    breakpoints = [runs[0][0]] + [r[1] for r in runs]
    for i, bp in enumerate(breakpoints):
        want = Fraction(i % 2)
        if point_cmp(pwp_eval(f, bp), want) != 0:
            return None
    return TriangleCert(len(runs) // 2, tuple(breakpoints), (lo, hi))


# ---------------------------------------------------------------------------
# the hard instance
# ---------------------------------------------------------------------------


def hard_network(k: int, d: int) -> NetworkGraph:
    """The deep oscillator over d inputs: k**3 + 4 stacked tents on x1.

    The first tent's input layer reads all d coordinates through named
    selection slots (1, 0, ..., 0), so the whole net has 4 + d distinct
    parameter slots, 2*(k**3 + 4) layers, and 3*(k**3 + 4) nodes.
    """
    if k < 1 or d < 1:
        raise ValueError("need k >= 1 and d >= 1")
    copies = k**3 + 4
    sel = [(f"sel_{j + 1}", 1 if j == 0 else 0) for j in range(d)]
    fan = tuple((0, j) for j in range(d))
    layers: list[tuple[Node, ...]] = [
        (
            Node(encode_relu(sel), fan),
            Node(encode_relu(sel, Fraction(-1, 2)), fan),
        ),
        (Node(encode_relu([2, -4]), ((1, 0), (1, 1))),),
    ]
    tent = triangle_relu()
    for _ in range(copies - 1):
        _append_net(layers, tent)
    return NetworkGraph(d, tuple(layers))


# ---------------------------------------------------------------------------
# exact composition of piecewise polynomials and signal repetition
# ---------------------------------------------------------------------------


def _rational_breakpoints(f: PiecewisePoly) -> list[Fraction]:
    out = []
    for bp in f.partition.breakpoints():
        if isinstance(bp, AlgebraicReal):
            if not bp.is_rational:
                raise ValueError(
                    "exact pre-composition needs rational breakpoints "
                    "in the outer function"
                )
            out.append(bp.as_rational())
        else:
            out.append(bp)
    return out


def _compose_pwp(outer: PiecewisePoly, inner: PiecewisePoly) -> PiecewisePoly:
    """The piecewise polynomial computing outer(inner(z)), exactly.

    Each inner piece is cut at every preimage of an outer breakpoint, so the
    inner value stays within a single outer piece between cuts.
    """
    targets = _rational_breakpoints(outer)
    pieces: list[Interval] = []
    polys: list[Poly] = []
    for piece, q in zip(inner.partition.pieces, inner.polys):
        if piece.is_singleton or q.degree < 1:
            subs = [piece]
        else:
            cuts: list[Point] = []
            for b in targets:
                cuts.extend(isolate_roots(q - b, piece))
            cuts.sort(key=cmp_to_key(point_cmp))
            deduped: list[Point] = []
            for c in cuts:
                if not deduped or point_cmp(deduped[-1], c) != 0:
                    deduped.append(c)
            subs = _split_piece(piece, deduped)
        for sub in subs:
            x = sub.sample()
            value = q(x) if not isinstance(x, AlgebraicReal) else poly_at_algebraic(q, x)
            host = outer.polys[locate(outer.partition, value)]
            pieces.append(sub)
            polys.append(host.compose(q))
    return merge_equal(PiecewisePoly(Partition(tuple(pieces)), tuple(polys)))


def _require_symmetric(g: PiecewisePoly) -> None:
    """Check g(z) = g(1-z) for all z in [0,1], exactly; raise if it fails."""
    cuts = {Fraction(0), Fraction(1)}
    for bp in g.partition.breakpoints():
        if point_cmp(bp, 0) < 0 or point_cmp(bp, 1) > 0:
            continue
        if isinstance(bp, AlgebraicReal):
            if not bp.is_rational:
                raise ValueError(
                    "the symmetry check needs rational breakpoints on [0, 1]"
                )
            bp = bp.as_rational()
        cuts.add(bp)
        cuts.add(1 - bp)
    grid = sorted(cuts)
    flip = Poly.of(1, -1)
    for a, b in zip(grid, grid[1:]):
        mid = (a + b) / 2
        left = g.polys[locate(g.partition, mid)]
        right = g.polys[locate(g.partition, 1 - mid)].compose(flip)
        if left != right:
            raise ValueError("the signal is not symmetric about 1/2 on [0, 1]")
    for e in grid:
        if point_cmp(pwp_eval(g, e), pwp_eval(g, 1 - e)) != 0:
            raise ValueError("the signal is not symmetric about 1/2 on [0, 1]")


def repeat_signal(g: PiecewisePoly, k: int) -> PiecewisePoly:
    """Tile 2**k shrunken copies of a symmetric signal across [0, 1].

    Pre-composing g with the k-fold tent iterate maps each dyadic cell
    [i*2**-k, (i+1)*2**-k] onto [0, 1] back and forth; symmetry of g about
    1/2 makes the reflected copies equal to the forward ones, so the result
    restricted to any cell is g compressed by 2**k.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    _require_symmetric(g)
    inner = compile_net(iterate(triangle_relu(), k))
    return _compose_pwp(g, inner)
