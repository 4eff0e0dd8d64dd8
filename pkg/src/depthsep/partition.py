"""Intervals with open/closed endpoints and finite partitions of the real line.

An :class:`Interval` may be unbounded on either side, may be a single point
``[a, a]``, and carries explicit closedness flags for both endpoints.  A
:class:`Partition` is an ascending list of such intervals that tile the whole
line with no gaps and no overlaps: every real number, including every
breakpoint, belongs to exactly one piece.

The central operation is :func:`refine`, the common refinement of several
partitions.  At each shared breakpoint the construction keeps the side the
inputs agree on, and when two inputs attach the breakpoint to opposite sides
(or an input already isolates it) the point is split off as a singleton piece.
The result never invents breakpoints and its size is at most the sum of the
input sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Iterator, Sequence, Union

from .exact import AlgebraicReal, Point, Poly, RatLike, point_cmp, rat, rat_str

__all__ = [
    "Endpoint",
    "Interval",
    "Partition",
    "refine",
    "locate",
    "join_adjacent",
]

# An endpoint is a finite exact point or None, which stands for -oo in the
# ``lo`` slot and +oo in the ``hi`` slot.
Endpoint = Union[Fraction, AlgebraicReal, None]


def _as_endpoint(x: object) -> Endpoint:
    """Normalize an endpoint: rational-valued algebraics collapse to Fraction."""
    if x is None:
        return None
    if isinstance(x, AlgebraicReal):
        return x.as_rational() if x.is_rational else x
    return rat(x)  # type: ignore[arg-type]


def _as_point(x: object) -> Point:
    p = _as_endpoint(x)
    if p is None:
        raise TypeError("expected a finite point, got None")
    return p


def _point_str(p: Point) -> str:
    if isinstance(p, Fraction):
        return rat_str(p)
    return repr(p)


def _point_to_json(p: Point) -> object:
    if isinstance(p, Fraction):
        return f"{p.numerator}/{p.denominator}"
    lo, hi = p.enclosure()
    return {
        "poly": [int(c) for c in p.defining.coeffs],
        "lo": f"{lo.numerator}/{lo.denominator}",
        "hi": f"{hi.numerator}/{hi.denominator}",
    }


def _point_from_json(obj: object) -> Point:
    if isinstance(obj, str):
        return rat(obj)
    if isinstance(obj, dict):
        poly = Poly.of(*obj["poly"])
        x = AlgebraicReal.root_in(poly, rat(obj["lo"]), rat(obj["hi"]))
        return x.as_rational() if x.is_rational else x
    raise ValueError(f"cannot decode point from {obj!r}")


@dataclass(frozen=True)
class Interval:
    """A nonempty interval of the real line.

    ``lo is None`` means unbounded below, ``hi is None`` unbounded above;
    unbounded ends are necessarily open.  A bounded interval must satisfy
    ``lo < hi``, or ``lo == hi`` with both ends closed (the singleton
    ``[a, a]``).  Instances satisfy the window protocol of
    :func:`depthsep.exact.isolate_roots`.
    """

    lo: Endpoint
    hi: Endpoint
    lo_closed: bool
    hi_closed: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", _as_endpoint(self.lo))
        object.__setattr__(self, "hi", _as_endpoint(self.hi))
        if self.lo is None and self.lo_closed:
            raise ValueError("an unbounded lower end must be open")
        if self.hi is None and self.hi_closed:
            raise ValueError("an unbounded upper end must be open")
        if self.lo is not None and self.hi is not None:
            c = point_cmp(self.lo, self.hi)
            if c > 0:
                raise ValueError("interval endpoints out of order")
            if c == 0 and not (self.lo_closed and self.hi_closed):
                raise ValueError("degenerate interval must be the closed singleton [a, a]")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def whole() -> "Interval":
        return Interval(None, None, False, False)

    @staticmethod
    def point(a: "Point | RatLike") -> "Interval":
        p = _as_point(a)
        return Interval(p, p, True, True)

    @staticmethod
    def below(hi: "Point | RatLike", closed: bool = False) -> "Interval":
        return Interval(None, _as_point(hi), False, closed)

    @staticmethod
    def above(lo: "Point | RatLike", closed: bool = True) -> "Interval":
        return Interval(_as_point(lo), None, closed, False)

    # -- queries -------------------------------------------------------------

    @property
    def is_singleton(self) -> bool:
        return (
            self.lo is not None
            and self.hi is not None
            and point_cmp(self.lo, self.hi) == 0
        )

    def contains(self, x: "Point | RatLike") -> bool:
        p = _as_point(x)
        if self.lo is not None:
            c = point_cmp(p, self.lo)
            if c < 0 or (c == 0 and not self.lo_closed):
                return False
        if self.hi is not None:
            c = point_cmp(p, self.hi)
            if c > 0 or (c == 0 and not self.hi_closed):
                return False
        return True

    def sample(self) -> Point:
        """Some point inside the interval (rational whenever possible)."""
        if self.lo is None and self.hi is None:
            return Fraction(0)
        if self.lo is None:
            hi = self.hi if isinstance(self.hi, Fraction) else self.hi.enclosure()[0]
            return hi - 1
        if self.hi is None:
            lo = self.lo if isinstance(self.lo, Fraction) else self.lo.enclosure()[1]
            return lo + 1
        if self.is_singleton:
            return self.lo
        # Shrink enclosures until a gap strictly between the endpoints shows up.
        width = Fraction(1)
        while True:
            lo_hi = self.lo if isinstance(self.lo, Fraction) else self.lo.enclosure(width)[1]
            hi_lo = self.hi if isinstance(self.hi, Fraction) else self.hi.enclosure(width)[0]
            if lo_hi < hi_lo:
                return (lo_hi + hi_lo) / 2
            width /= 16

    def __repr__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        lo = "-inf" if self.lo is None else _point_str(self.lo)
        hi = "+inf" if self.hi is None else _point_str(self.hi)
        return f"{left}{lo}, {hi}{right}"

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "lo": "-inf" if self.lo is None else _point_to_json(self.lo),
            "lo_closed": self.lo_closed,
            "hi": "+inf" if self.hi is None else _point_to_json(self.hi),
            "hi_closed": self.hi_closed,
        }

    @staticmethod
    def from_json(obj: dict) -> "Interval":
        lo = None if obj["lo"] == "-inf" else _point_from_json(obj["lo"])
        hi = None if obj["hi"] == "+inf" else _point_from_json(obj["hi"])
        return Interval(lo, hi, bool(obj["lo_closed"]), bool(obj["hi_closed"]))


def join_adjacent(a: Interval, b: Interval) -> Interval:
    """Merge two intervals that meet flush at a shared breakpoint.

    ``a`` must end exactly where ``b`` starts, with the breakpoint belonging
    to exactly one of them.  Merging pieces is always this explicit operation;
    no routine in the package coalesces pieces behind the caller's back.
    """
    if a.hi is None or b.lo is None or point_cmp(a.hi, b.lo) != 0:
        raise ValueError(f"intervals {a} and {b} do not meet")
    if a.hi_closed == b.lo_closed:
        raise ValueError(f"intervals {a} and {b} overlap or leave a gap")
    return Interval(a.lo, b.hi, a.lo_closed, b.hi_closed)


@dataclass(frozen=True)
class Partition:
    """An ascending tiling of the real line by intervals.

    Consecutive pieces meet flush: each breakpoint belongs to exactly one of
    its two neighbors.  The first piece is unbounded below and the last is
    unbounded above, so the union is all of R.
    """

    pieces: tuple[Interval, ...]

    def __post_init__(self) -> None:
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise ValueError("a partition needs at least one piece")
        if pieces[0].lo is not None:
            raise ValueError("first piece must be unbounded below")
        if pieces[-1].hi is not None:
            raise ValueError("last piece must be unbounded above")
        for a, b in zip(pieces, pieces[1:]):
            if a.hi is None or b.lo is None or point_cmp(a.hi, b.lo) != 0:
                raise ValueError(f"pieces {a} and {b} do not meet flush")
            if a.hi_closed == b.lo_closed:
                raise ValueError(f"breakpoint of {a} and {b} is covered {'twice' if a.hi_closed else 'zero times'}")

    @staticmethod
    def whole() -> "Partition":
        return Partition((Interval.whole(),))

    def __len__(self) -> int:
        return len(self.pieces)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.pieces)

    def breakpoints(self) -> list[Point]:
        """Distinct breakpoint values, ascending (singletons appear once)."""
        out: list[Point] = []
        for piece in self.pieces[:-1]:
            v = piece.hi
            assert v is not None
            if not out or point_cmp(out[-1], v) != 0:
                out.append(v)
        return out

    def to_json(self) -> dict:
        return {"pieces": [p.to_json() for p in self.pieces]}

    @staticmethod
    def from_json(obj: dict) -> "Partition":
        return Partition(tuple(Interval.from_json(p) for p in obj["pieces"]))


def locate(part: Partition, x: "Point | RatLike") -> int:
    """Index of the unique piece containing ``x`` (binary search)."""
    p = _as_point(x)
    lo, hi = 0, len(part.pieces) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        edge = part.pieces[mid].hi
        if edge is None:
            hi = mid
            continue
        c = point_cmp(p, edge)
        if c > 0 or (c == 0 and not part.pieces[mid].hi_closed):
            lo = mid + 1
        else:
            hi = mid
    return lo


def _gather_cuts(parts: Sequence[Partition]) -> list[tuple[Point, set[str]]]:
    """Breakpoints of all inputs with the set of sides they attach to."""
    marks: list[tuple[Point, str]] = []
    for part in parts:
        for a, b in zip(part.pieces, part.pieces[1:]):
            assert a.hi is not None
            marks.append((a.hi, "left" if a.hi_closed else "right"))
    marks.sort(key=cmp_to_key(lambda u, v: point_cmp(u[0], v[0])))
    groups: list[tuple[Point, set[str]]] = []
    for value, side in marks:
        if groups and point_cmp(groups[-1][0], value) == 0:
            groups[-1][1].add(side)
        else:
            groups.append((value, {side}))
    return groups


def refine(parts: Sequence[Partition]) -> Partition:
    """Common refinement of several partitions.

    Every output piece lies inside one piece of each input, every input piece
    is a union of output pieces, and ``len(result) <= sum(len(p))``.  At each
    breakpoint: if all inputs attach it to the same side, the output does too
    (two-way split); if the inputs disagree, or some input already isolates
    the point, the breakpoint becomes its own singleton piece (three-way
    split).  No new breakpoint values are introduced.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("refine needs at least one partition")
    pieces: list[Interval] = []
    cur_lo: Endpoint = None
    cur_closed = False
    for value, sides in _gather_cuts(parts):
        if sides == {"left"}:
            pieces.append(Interval(cur_lo, value, cur_closed, True))
            cur_lo, cur_closed = value, False
        elif sides == {"right"}:
            pieces.append(Interval(cur_lo, value, cur_closed, False))
            cur_lo, cur_closed = value, True
        else:
            pieces.append(Interval(cur_lo, value, cur_closed, False))
            pieces.append(Interval.point(value))
            cur_lo, cur_closed = value, False
    pieces.append(Interval(cur_lo, None, cur_closed, False))
    return Partition(tuple(pieces))
