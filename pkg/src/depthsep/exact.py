"""Exact scalar and polynomial arithmetic.

Carrier types for everything downstream: arbitrary-precision rationals
(``fractions.Fraction``, aliased ``Rat``), dense univariate polynomials over
the rationals, sparse multivariate polynomials for gate predicates and terms,
and real algebraic numbers given by a square-free integer polynomial plus an
isolating rational interval.

Floats never enter: coercions reject them, comparisons and root isolation are
decided by sign computations over the rationals (Sturm sequences), and
integrals are either exact or returned as two-sided rational enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

Rat = Fraction

RatLike = Union[Fraction, int, str]


def rat(x: RatLike) -> Fraction:
    """Coerce an int, a "num/den" string, or a Fraction to an exact rational.

    Floats are rejected on purpose: every quantity in this package is exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def rat_str(q: Fraction) -> str:
    """Serialize a rational as "num/den", or "num" when the denominator is 1."""
    q = rat(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


# ---------------------------------------------------------------------------
# Dense univariate polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Poly:
    """Dense univariate polynomial; ``coeffs[i]`` multiplies x**i.

    Normal form: no trailing zero coefficients.  The zero polynomial has an
    empty coefficient tuple and degree -1.
    """

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        cs = tuple(rat(c) for c in self.coeffs)
        while cs and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def of(*coeffs: RatLike) -> "Poly":
        return Poly(tuple(rat(c) for c in coeffs))

    @staticmethod
    def zero() -> "Poly":
        return Poly(())

    @staticmethod
    def const(c: RatLike) -> "Poly":
        return Poly((rat(c),))

    @staticmethod
    def x() -> "Poly":
        return Poly((Fraction(0), Fraction(1)))

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, x: RatLike) -> Fraction:
        x = rat(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "Poly | RatLike") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(tuple(out))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly | RatLike") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other: RatLike) -> "Poly":
        return Poly.const(other) - self

    def __mul__(self, other: "Poly | RatLike") -> "Poly":
        if not isinstance(other, Poly):
            c = rat(other)
            return Poly(tuple(c * a for a in self.coeffs))
        if self.is_zero or other.is_zero:
            return Poly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Exact euclidean division over the rationals."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly.zero(), self
        quot = [Fraction(0)] * (dq + 1)
        lead = other.leading
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] / lead
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Poly(tuple(quot)), Poly(tuple(rem[: other.degree if other.degree > 0 else 0]))

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise ValueError("division is not exact")
        return q

    # -- calculus ----------------------------------------------------------

    def derivative(self) -> "Poly":
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def antiderivative(self) -> "Poly":
        return Poly((Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(self.coeffs)))

    def compose(self, inner: "Poly") -> "Poly":
        """The composite self(inner(x)), exactly."""
        acc = Poly.zero()
        for c in reversed(self.coeffs):
            acc = acc * inner + Poly.const(c)
        return acc

    # -- normal forms -------------------------------------------------------

    def primitive_part(self) -> "Poly":
        """Scale by a positive rational so coefficients are coprime integers.

        The sign of the polynomial is preserved (safe inside Sturm sequences).
        """
        if self.is_zero:
            return self
        den = math.lcm(*(c.denominator for c in self.coeffs))
        num = math.gcd(*(abs(c.numerator) for c in self.coeffs))
        scale = Fraction(den, num)
        return Poly(tuple(c * scale for c in self.coeffs))

    def canonical_int(self) -> "Poly":
        """Primitive integer form with positive leading coefficient."""
        p = self.primitive_part()
        if not p.is_zero and p.leading < 0:
            p = -p
        return p

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        return self * (1 / self.leading)

    def gcd(self, other: "Poly") -> "Poly":
        """Monic greatest common divisor over the rationals."""
        a, b = self, other
        while not b.is_zero:
            a, b = b, (a % b).primitive_part()
        if a.is_zero:
            return a
        return a.monic()

    def squarefree(self) -> "Poly":
        """The square-free part self / gcd(self, self')."""
        if self.degree <= 0:
            return self
        g = self.gcd(self.derivative())
        if g.degree == 0:
            return self
        return self.exact_div(g)

    def deflate_root(self, r: Fraction) -> "Poly":
        """Divide out an exact rational root (raises if r is not a root)."""
        q, rem = self.divmod(Poly.of(-rat(r), 1))
        if not rem.is_zero:
            raise ValueError(f"{r} is not a root")
        return q

    # -- bounds --------------------------------------------------------------

    def cauchy_root_bound(self) -> Fraction:
        """B with every real root inside [-B, B]."""
        if self.degree < 1:
            return Fraction(1)
        lead = abs(self.leading)
        return 1 + max(abs(c) for c in self.coeffs[:-1]) / lead

    def bound_on(self, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
        """Crude enclosure of the range over [lo, hi] by interval Horner."""
        lo, hi = rat(lo), rat(hi)
        if lo > hi:
            raise ValueError("empty interval")
        mn = mx = Fraction(0)
        for c in reversed(self.coeffs):
            cands = (mn * lo, mn * hi, mx * lo, mx * hi)
            mn, mx = min(cands) + c, max(cands) + c
        return mn, mx

    def __repr__(self) -> str:
        if self.is_zero:
            return "Poly[0]"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(rat_str(c))
            elif i == 1:
                parts.append(f"{rat_str(c)}*x")
            else:
                parts.append(f"{rat_str(c)}*x^{i}")
        return "Poly[" + " + ".join(parts) + "]"


def poly_compose(outer: Poly, inner: Poly) -> Poly:
    """Exact polynomial composition outer(inner(x))."""
    return outer.compose(inner)


def resultant(f: Poly, g: Poly) -> Fraction:
    """Resultant of two rational polynomials (euclidean-remainder recursion)."""
    if f.is_zero or g.is_zero:
        return Fraction(0)
    if f.degree == 0 and g.degree == 0:
        return Fraction(1)
    if f.degree == 0:
        return f.coeffs[0] ** g.degree
    if g.degree == 0:
        return g.coeffs[0] ** f.degree
    if f.degree < g.degree:
        s = -1 if (f.degree * g.degree) % 2 else 1
        return s * resultant(g, f)
    r = f % g
    if r.is_zero:
        return Fraction(0)
    sign = -1 if (f.degree * g.degree) % 2 else 1
    return sign * g.leading ** (f.degree - r.degree) * resultant(g, r)


def interpolate(points: Sequence[tuple[Fraction, Fraction]]) -> Poly:
    """Lagrange interpolation through distinct rational points."""
    result = Poly.zero()
    for i, (xi, yi) in enumerate(points):
        if yi == 0:
            continue
        num = Poly.const(yi)
        den = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            num = num * Poly.of(-xj, 1)
            den *= xi - xj
        result = result + num * (1 / den)
    return result


# ---------------------------------------------------------------------------
# Sturm sequences and root counting (rational endpoints)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def sturm_sequence(p: Poly) -> tuple[Poly, ...]:
    """Sturm sequence of p, with primitive-part scaling to tame coefficients."""
    if p.is_zero:
        raise ValueError("zero polynomial")
    seq = [p, p.derivative()]
    while not seq[-1].is_zero:
        seq.append((-(seq[-2] % seq[-1])).primitive_part())
    return tuple(seq[:-1])


def _variations(signs: Iterable[int]) -> int:
    last = 0
    count = 0
    for s in signs:
        if s:
            if last and s != last:
                count += 1
            last = s
    return count


def _variations_at(seq: Sequence[Poly], x: Fraction) -> int:
    return _variations(_sign(q(x)) for q in seq)


def count_roots_open(p: Poly, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots of p strictly inside (a, b).

    Endpoint roots are tolerated (they are deflated away first); p may have
    repeated factors (only distinct roots are counted).
    """
    a, b = rat(a), rat(b)
    if a >= b:
        return 0
    s = p.squarefree().primitive_part()
    while not s.is_zero and s.degree >= 1 and s(a) == 0:
        s = s.deflate_root(a)
    while not s.is_zero and s.degree >= 1 and s(b) == 0:
        s = s.deflate_root(b)
    if s.degree < 1:
        return 0
    seq = sturm_sequence(s)
    return _variations_at(seq, a) - _variations_at(seq, b)


def simplest_in(a: Fraction, b: Fraction) -> Fraction:
    """The rational of minimal denominator in the closed interval [a, b].

    Among integers the one closest to zero is returned, which makes the
    choice deterministic.
    """
    a, b = rat(a), rat(b)
    if a > b:
        raise ValueError("empty interval")
    if a == b:
        return a
    lo_int = math.ceil(a)
    hi_int = math.floor(b)
    if lo_int <= hi_int:
        if lo_int <= 0 <= hi_int:
            return Fraction(0)
        return Fraction(lo_int if lo_int > 0 else hi_int)
    n = math.floor(a)
    inner = simplest_in(1 / (b - n), 1 / (a - n))
    return n + 1 / inner


# ---------------------------------------------------------------------------
# Real algebraic numbers
# ---------------------------------------------------------------------------


class AlgebraicReal:
    """An exactly represented real number: rational, or an isolated root.

    Irrational values carry a square-free primitive integer polynomial
    (positive leading coefficient) and an open rational interval (lo, hi)
    containing exactly that one root, with a sign change across it.  The
    interval narrows lazily; narrowing is invisible to every comparison, so
    instances behave as immutable values.

    Rational values are never stored in root form: the factories detect and
    normalize them, which keeps "is_rational" an honest semantic predicate.
    """

    __slots__ = ("_rat", "_def", "_lo", "_hi")

    def __init__(self) -> None:
        raise TypeError("use AlgebraicReal.from_rational or AlgebraicReal.root_in")

    # -- construction --------------------------------------------------------

    @staticmethod
    def _make_rational(q: Fraction) -> "AlgebraicReal":
        self = object.__new__(AlgebraicReal)
        object.__setattr__(self, "_rat", rat(q))
        object.__setattr__(self, "_def", None)
        object.__setattr__(self, "_lo", None)
        object.__setattr__(self, "_hi", None)
        return self

    @staticmethod
    def _make_root(p: Poly, lo: Fraction, hi: Fraction) -> "AlgebraicReal":
        self = object.__new__(AlgebraicReal)
        object.__setattr__(self, "_rat", None)
        object.__setattr__(self, "_def", p)
        object.__setattr__(self, "_lo", lo)
        object.__setattr__(self, "_hi", hi)
        return self

    @staticmethod
    def from_rational(q: RatLike) -> "AlgebraicReal":
        return AlgebraicReal._make_rational(rat(q))

    @staticmethod
    def root_in(p: Poly, lo: RatLike, hi: RatLike) -> "AlgebraicReal":
        """The unique root of p in (lo, hi); validates isolation.

        If that root happens to be rational the result comes back in rational
        form (roots sitting exactly on an endpoint are deflated away first).
        """
        return _root_in_validated(p, lo, hi)

    # -- basic accessors -----------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self._rat is not None

    def as_rational(self) -> Fraction:
        if self._rat is None:
            raise ValueError("not a rational value")
        return self._rat

    @property
    def defining(self) -> Poly:
        """A square-free integer polynomial vanishing at this number."""
        if self._rat is not None:
            return Poly.of(-self._rat.numerator, self._rat.denominator)
        return self._def

    def enclosure(self, width: Fraction | None = None) -> tuple[Fraction, Fraction]:
        """Open rational interval containing the value (narrowed on demand)."""
        if self._rat is not None:
            pad = width / 2 if width is not None else Fraction(1)
            return self._rat - pad, self._rat + pad
        if width is not None:
            self._refine_below(width)
        return self._lo, self._hi

    def _refine_step(self) -> None:
        p, lo, hi = self._def, self._lo, self._hi
        mid = (lo + hi) / 2
        # p is square-free with its only enclosed root irrational, so p(mid) != 0.
        if _sign(p(mid)) == _sign(p(lo)):
            object.__setattr__(self, "_lo", mid)
        else:
            object.__setattr__(self, "_hi", mid)

    def _refine_below(self, width: Fraction) -> None:
        while self._hi - self._lo >= width:
            self._refine_step()

    # -- decision procedures ---------------------------------------------------

    def sign_of_poly(self, q: Poly) -> int:
        """Sign of q evaluated at this number, decided exactly."""
        if self._rat is not None:
            return _sign(q(self._rat))
        if q.is_zero:
            return 0
        g = q.gcd(self._def)
        if g.degree >= 1 and count_roots_open(g, self._lo, self._hi) == 1:
            # every root of g is a root of the defining polynomial, and the
            # enclosure isolates exactly one of those: ours.
            return 0
        while True:
            if count_roots_open(q, self._lo, self._hi) == 0:
                mid = (self._lo + self._hi) / 2
                s = _sign(q(mid))
                if s != 0:
                    return s
            self._refine_step()

    def _cmp_rational(self, r: Fraction) -> int:
        if self._rat is not None:
            return _sign(self._rat - r)
        while True:
            if r <= self._lo:
                return 1
            if r >= self._hi:
                return -1
            self._refine_step()

    def _equals_algebraic(self, other: "AlgebraicReal") -> bool:
        g = self._def.gcd(other._def)
        if g.degree < 1:
            return False
        if count_roots_open(g, self._lo, self._hi) != 1:
            return False
        if count_roots_open(g, other._lo, other._hi) != 1:
            return False
        # both are roots of g; same root iff their hull holds just one.
        while True:
            if self._hi <= other._lo or other._hi <= self._lo:
                return False
            lo = min(self._lo, other._lo)
            hi = max(self._hi, other._hi)
            if count_roots_open(g, lo, hi) == 1:
                return True
            self._refine_step()
            other._refine_step()

    def cmp(self, other: "AlgebraicReal | RatLike") -> int:
        if self is other:
            return 0
        if not isinstance(other, AlgebraicReal):
            return self._cmp_rational(rat(other))
        if other._rat is not None:
            return self._cmp_rational(other._rat)
        if self._rat is not None:
            return -other._cmp_rational(self._rat)
        if self._equals_algebraic(other):
            return 0
        while True:
            if self._hi <= other._lo:
                return -1
            if other._hi <= self._lo:
                return 1
            self._refine_step()
            other._refine_step()

    # -- operators -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (AlgebraicReal, Fraction, int)):
            return self.cmp(other) == 0
        return NotImplemented

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __lt__(self, other) -> bool:
        return self.cmp(other) < 0

    def __le__(self, other) -> bool:
        return self.cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self.cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self.cmp(other) >= 0

    __hash__ = None  # equal values may have different representations

    def __float__(self) -> float:
        if self._rat is not None:
            return float(self._rat)
        lo, hi = self.enclosure(Fraction(1, 10**15))
        return float((lo + hi) / 2)

    def __repr__(self) -> str:
        if self._rat is not None:
            return f"AlgebraicReal({rat_str(self._rat)})"
        return f"AlgebraicReal(root of {self._def!r} in ({rat_str(self._lo)}, {rat_str(self._hi)}) ~ {float(self):.9g})"


Point = Union[Fraction, AlgebraicReal]


def alg(x: "Point | RatLike") -> AlgebraicReal:
    """Coerce rationals (or pass algebraic reals through) to AlgebraicReal."""
    if isinstance(x, AlgebraicReal):
        return x
    return AlgebraicReal.from_rational(rat(x))


def point_cmp(x: "Point | RatLike", y: "Point | RatLike") -> int:
    """Exact three-way comparison between rational / algebraic points."""
    if isinstance(x, AlgebraicReal):
        return x.cmp(y)
    if isinstance(y, AlgebraicReal):
        return -y.cmp(x)
    return _sign(rat(x) - rat(y))


def point_sign_of(x: "Point | RatLike", q: Poly) -> int:
    """Sign of q at a rational or algebraic point."""
    if isinstance(x, AlgebraicReal):
        return x.sign_of_poly(q)
    return _sign(q(rat(x)))


def _resolve_root(s: Poly, a: Fraction, b: Fraction) -> AlgebraicReal:
    """Build the value for the unique root of square-free integer s in (a, b).

    Requires s(a) != 0 != s(b) and exactly one root inside.  Narrows until a
    width below 1/lc^2 proves rationality decidable via the minimal-denominator
    rational of the interval: any rational root u/v has v | lc, and two
    rationals with denominator <= lc are >= 1/lc^2 apart.
    """
    s = s.canonical_int()
    if s(a) == 0 or s(b) == 0:
        raise ValueError("endpoints must not be roots")
    if count_roots_open(s, a, b) != 1:
        raise ValueError("interval does not isolate exactly one root")
    lc = abs(s.leading.numerator)
    gap = Fraction(1, lc * lc)
    sa = _sign(s(a))
    while b - a >= gap:
        m = (a + b) / 2
        vm = s(m)
        if vm == 0:
            return AlgebraicReal._make_rational(m)
        if _sign(vm) == sa:
            a = m
        else:
            b = m
    cand = simplest_in(a, b)
    if s(cand) == 0:
        return AlgebraicReal._make_rational(cand)
    return AlgebraicReal._make_root(s, a, b)


def _root_in_validated(p: Poly, lo: RatLike, hi: RatLike) -> AlgebraicReal:
    lo, hi = rat(lo), rat(hi)
    if lo >= hi:
        raise ValueError("need lo < hi")
    s = p.squarefree().canonical_int()
    if s.degree < 1:
        raise ValueError("polynomial has no roots")
    while s.degree >= 1 and s(lo) == 0:
        s = s.deflate_root(lo)
    while s.degree >= 1 and s(hi) == 0:
        s = s.deflate_root(hi)
    if s.degree < 1:
        raise ValueError("interval does not isolate exactly one root")
    return _resolve_root(s, lo, hi)


# ---------------------------------------------------------------------------
# Root isolation over a window
# ---------------------------------------------------------------------------


def _isolate_squarefree(p: Poly, a: Fraction, b: Fraction) -> list[AlgebraicReal]:
    """All roots of square-free p in the open interval (a, b); p(a),p(b) != 0."""
    if p.degree < 1 or a >= b:
        return []
    seq = sturm_sequence(p)
    out: list[AlgebraicReal] = []

    def rec(lo: Fraction, vlo: int, hi: Fraction, vhi: int) -> None:
        n = vlo - vhi
        if n == 0:
            return
        if n == 1:
            out.append(_resolve_root(p, lo, hi))
            return
        mid = (lo + hi) / 2
        if p(mid) == 0:
            out.append(AlgebraicReal._make_rational(mid))
            q = p.deflate_root(mid).primitive_part()
            out.extend(_isolate_squarefree(q, lo, hi))
            return
        vm = _variations_at(seq, mid)
        rec(lo, vlo, mid, vm)
        rec(mid, vm, hi, vhi)

    rec(a, _variations_at(seq, a), b, _variations_at(seq, b))
    return out


def _quiet_bracket(point: AlgebraicReal, s: Poly) -> tuple[Fraction, Fraction]:
    """Narrow an algebraic point's enclosure until s has no *other* root in it."""
    want = 1 if point.sign_of_poly(s) == 0 else 0
    while True:
        lo, hi = point.enclosure()
        n = count_roots_open(s, lo, hi)
        extra = 1 if (s(lo) == 0 or s(hi) == 0) else 0
        if n <= want and not extra:
            return lo, hi
        point._refine_step()


def _window_contains(window: object, r: Fraction) -> bool:
    """Window-protocol membership of a rational point."""
    lo = getattr(window, "lo", None)
    if lo is not None:
        c = point_cmp(r, lo)
        if c < 0 or (c == 0 and not bool(getattr(window, "lo_closed", False))):
            return False
    hi = getattr(window, "hi", None)
    if hi is not None:
        c = point_cmp(r, hi)
        if c > 0 or (c == 0 and not bool(getattr(window, "hi_closed", False))):
            return False
    return True


def isolate_roots(p: Poly, window: object | None = None) -> list[AlgebraicReal]:
    """Distinct real roots of p inside a window, ascending, exactly represented.

    ``window`` is anything with lo / hi / lo_closed / hi_closed attributes
    (``None`` endpoints meaning unbounded), or None for the whole line.  Roots
    landing on a closed finite endpoint are included; open endpoints exclude
    them.  Rational roots come back in rational form.
    """
    if p.is_zero:
        raise ValueError("zero polynomial vanishes everywhere")
    if p.degree == 1:  # fast path: the bulk of calls are on affine pieces
        root = -p.coeffs[0] / p.coeffs[1]
        if window is not None and not _window_contains(window, root):
            return []
        return [AlgebraicReal._make_rational(root)]
    s = p.squarefree().canonical_int()
    if s.degree < 1:
        return []

    lo = getattr(window, "lo", None) if window is not None else None
    hi = getattr(window, "hi", None) if window is not None else None
    lo_closed = bool(getattr(window, "lo_closed", False)) if window is not None else False
    hi_closed = bool(getattr(window, "hi_closed", False)) if window is not None else False

    if lo is not None and hi is not None:
        order = point_cmp(lo, hi)
        if order > 0:
            return []
        if order == 0:
            if not (lo_closed and hi_closed):
                return []
            x = lo if isinstance(lo, AlgebraicReal) else AlgebraicReal.from_rational(rat(lo))
            return [x] if x.sign_of_poly(s) == 0 else []

    roots: list[AlgebraicReal] = []
    bound = s.cauchy_root_bound() + 1

    # left bracket endpoint: rational, not a root, with no window roots lost
    if lo is None:
        a = -bound
        while s(a) == 0:
            a -= 1
    elif isinstance(lo, AlgebraicReal) and not lo.is_rational:
        if lo_closed and lo.sign_of_poly(s) == 0:
            roots.append(lo)
        # quiet-bracket endpoints are never roots of s, so no boundary work here
        a = _quiet_bracket(lo, s)[1]
    else:
        a = lo.as_rational() if isinstance(lo, AlgebraicReal) else rat(lo)
        if s(a) == 0:
            if lo_closed:
                roots.append(AlgebraicReal._make_rational(a))
            s = s.deflate_root(a).primitive_part()

    if hi is None:
        b = bound
        while s.degree >= 1 and s(b) == 0:
            b += 1
    elif isinstance(hi, AlgebraicReal) and not hi.is_rational:
        if hi_closed and hi.sign_of_poly(s) == 0:
            roots.append(hi)
        b = _quiet_bracket(hi, s)[0]
    else:
        b = hi.as_rational() if isinstance(hi, AlgebraicReal) else rat(hi)
        if s.degree >= 1 and s(b) == 0:
            if hi_closed:
                roots.append(AlgebraicReal._make_rational(b))
            s = s.deflate_root(b).primitive_part()

    if s.degree >= 1 and a < b:
        roots.extend(_isolate_squarefree(s, a, b))

    # the pieces above are disjoint; sort by exact comparison
    roots.sort(key=_PointKey)
    return roots


class _PointKey:
    """functools-free sort key wrapping exact point comparison."""

    __slots__ = ("p",)

    def __init__(self, p: Point) -> None:
        self.p = p

    def __lt__(self, other: "_PointKey") -> bool:
        return point_cmp(self.p, other.p) < 0


def poly_at_algebraic(p: Poly, x: "Point | RatLike") -> AlgebraicReal:
    """Evaluate p at a rational or algebraic point, exactly.

    Rational inputs stay rational.  For an algebraic input the defining
    polynomial of the value is obtained from a resultant; a rational-detection
    pass runs first so rational values (common in this package) never build
    one.
    """
    if not isinstance(x, AlgebraicReal):
        return AlgebraicReal.from_rational(p(rat(x)))
    if x.is_rational:
        return AlgebraicReal.from_rational(p(x.as_rational()))
    if p.degree <= 0:
        return AlgebraicReal.from_rational(p.coeffs[0] if p.coeffs else Fraction(0))

    # quick rational detection: try the simplest rational in a tight value interval
    for _ in range(3):
        lo, hi = x.enclosure()
        vlo, vhi = p.bound_on(lo, hi)
        cand = simplest_in(vlo, vhi)
        if x.sign_of_poly(p - Poly.const(cand)) == 0:
            return AlgebraicReal.from_rational(cand)
        x._refine_step()

    d = x.defining
    pts = []
    y = Fraction(0)
    while len(pts) < d.degree + 1:
        pts.append((y, resultant(d, Poly.const(y) - p)))
        y += 1
    r = interpolate(pts)
    s = r.squarefree().canonical_int()
    candidates = isolate_roots(s)
    for c in candidates:
        if c.is_rational and x.sign_of_poly(p - Poly.const(c.as_rational())) == 0:
            return c
    while True:
        lo, hi = x.enclosure()
        vlo, vhi = p.bound_on(lo, hi)
        inside = [c for c in candidates if point_cmp(c, vlo) >= 0 and point_cmp(c, vhi) <= 0]
        if len(inside) == 1:
            return inside[0]
        x._refine_step()


# ---------------------------------------------------------------------------
# Certified integration of |p|
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegralEnclosure:
    """Two-sided rational enclosure of an integral; exact when low == high."""

    low: Fraction
    high: Fraction
    exact: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "low", rat(self.low))
        object.__setattr__(self, "high", rat(self.high))
        if self.low > self.high:
            raise ValueError("inverted enclosure")
        if self.exact and self.low != self.high:
            raise ValueError("exact enclosure must be a point")

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    @staticmethod
    def point(v: RatLike) -> "IntegralEnclosure":
        v = rat(v)
        return IntegralEnclosure(v, v, True)

    def __add__(self, other: "IntegralEnclosure") -> "IntegralEnclosure":
        return IntegralEnclosure(
            self.low + other.low, self.high + other.high, self.exact and other.exact
        )

    def contains(self, v: RatLike) -> bool:
        v = rat(v)
        return self.low <= v <= self.high


def _exact_signed_area(anti: Poly, a: Fraction, b: Fraction) -> Fraction:
    return anti(b) - anti(a)


def integrate_abs(
    p: Poly,
    lo: "Point | RatLike",
    hi: "Point | RatLike",
    width: Fraction | None = None,
) -> IntegralEnclosure:
    """Enclosure of the integral of |p| over [lo, hi].

    Exact (a point enclosure) whenever the endpoints and every sign change of
    p inside are rational — in particular for the whole piecewise-linear
    pipeline.  Otherwise the enclosure narrows below ``width`` (default
    1e-9) by shrinking the algebraic split points' brackets.
    """
    if width is None:
        width = Fraction(1, 10**9)
    lo_p: Point = lo if isinstance(lo, AlgebraicReal) else rat(lo)
    hi_p: Point = hi if isinstance(hi, AlgebraicReal) else rat(hi)
    c = point_cmp(lo_p, hi_p)
    if c > 0:
        raise ValueError("lo > hi")
    if c == 0 or p.is_zero:
        return IntegralEnclosure.point(0)

    class _W:
        pass

    w = _W()
    w.lo, w.hi, w.lo_closed, w.hi_closed = lo_p, hi_p, False, False
    splits = isolate_roots(p, w)
    points: list[Point] = [lo_p] + list(splits) + [hi_p]
    anti = p.antiderivative()

    def as_rational(pt: Point) -> Fraction | None:
        if isinstance(pt, AlgebraicReal):
            return pt.as_rational() if pt.is_rational else None
        return pt

    rats = [as_rational(pt) for pt in points]
    if all(r is not None for r in rats):
        total = Fraction(0)
        for a, b in zip(rats, rats[1:]):
            total += abs(_exact_signed_area(anti, a, b))
        return IntegralEnclosure.point(total)

    # some split point or endpoint is irrational: certified enclosure
    target = Fraction(1, 4)
    while True:
        brackets: list[tuple[Fraction, Fraction]] = []
        for pt, r in zip(points, rats):
            if r is not None:
                brackets.append((r, r))
            else:
                blo, bhi = pt.enclosure(target)
                brackets.append((blo, bhi))
        low = Fraction(0)
        high = Fraction(0)
        ok = True
        for i in range(len(points) - 1):
            inner_a = brackets[i][1]
            inner_b = brackets[i + 1][0]
            if inner_a > inner_b:
                ok = False
                break
            core = abs(_exact_signed_area(anti, inner_a, inner_b))
            low += core
            high += core
        if ok:
            last = len(brackets) - 1
            for i, (blo, bhi) in enumerate(brackets):
                if blo == bhi:
                    continue
                mn, mx = p.bound_on(blo, bhi)
                cap = max(abs(mn), abs(mx))
                if 0 < i < last:
                    # interior sliver sits inside the domain: |signed area|
                    # under-counts |p| there, so it is a sound lower bound
                    low += abs(_exact_signed_area(anti, blo, bhi))
                # endpoint slivers poke outside [lo, hi]: contribute only above
                high += (bhi - blo) * cap
            if high - low <= width:
                return IntegralEnclosure(low, high, low == high)
        target /= 16


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MPoly:
    """Sparse multivariate polynomial over named variables.

    ``terms`` maps exponent vectors (aligned with ``variables``) to nonzero
    rational coefficients; the tuple is kept sorted so instances are hashable
    and comparable structurally.
    """

    variables: tuple[str, ...]
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self) -> None:
        vars_ = tuple(self.variables)
        merged: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(vars_):
                raise ValueError("exponent vector length mismatch")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            c = rat(c)
            if c == 0:
                continue
            merged[exps] = merged.get(exps, Fraction(0)) + c
        cleaned = tuple(sorted((e, c) for e, c in merged.items() if c != 0))
        object.__setattr__(self, "variables", vars_)
        object.__setattr__(self, "terms", cleaned)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def const(c: RatLike, variables: Sequence[str] = ()) -> "MPoly":
        variables = tuple(variables)
        zero = tuple(0 for _ in variables)
        return MPoly(variables, ((zero, rat(c)),))

    @staticmethod
    def var(name: str, variables: Sequence[str] | None = None) -> "MPoly":
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            raise ValueError(f"{name!r} not among variables")
        exps = tuple(1 if v == name else 0 for v in variables)
        return MPoly(variables, ((exps, Fraction(1)),))

    @staticmethod
    def affine(
        variables: Sequence[str], coeffs: Sequence[RatLike], bias: RatLike = 0
    ) -> "MPoly":
        variables = tuple(variables)
        if len(coeffs) != len(variables):
            raise ValueError("one coefficient per variable")
        terms = []
        zero = tuple(0 for _ in variables)
        b = rat(bias)
        if b != 0:
            terms.append((zero, b))
        for i, c in enumerate(coeffs):
            c = rat(c)
            if c != 0:
                exps = tuple(1 if j == i else 0 for j in range(len(variables)))
                terms.append((exps, c))
        return MPoly(variables, tuple(terms))

    # -- structure -------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e, _ in self.terms)

    def degree_in(self, names: Iterable[str]) -> int:
        """Largest combined exponent over the given variables."""
        idx = [i for i, v in enumerate(self.variables) if v in set(names)]
        if not self.terms or not idx:
            return 0
        return max(sum(e[i] for i in idx) for e, _ in self.terms)

    def used_variables(self) -> frozenset[str]:
        used = set()
        for e, _ in self.terms:
            for i, exp in enumerate(e):
                if exp:
                    used.add(self.variables[i])
        return frozenset(used)

    # -- alignment helpers -------------------------------------------------------

    def with_variables(self, variables: Sequence[str]) -> "MPoly":
        """Re-express over a superset (or reordering) of the variables."""
        variables = tuple(variables)
        pos = {v: i for i, v in enumerate(variables)}
        missing = self.used_variables() - set(variables)
        if missing:
            raise ValueError(f"dropping used variables {sorted(missing)}")
        terms = []
        for e, c in self.terms:
            out = [0] * len(variables)
            for i, exp in enumerate(e):
                if exp:
                    out[pos[self.variables[i]]] = exp
            terms.append((tuple(out), c))
        return MPoly(variables, tuple(terms))

    @staticmethod
    def _aligned(a: "MPoly", b: "MPoly") -> tuple["MPoly", "MPoly"]:
        if a.variables == b.variables:
            return a, b
        union = tuple(dict.fromkeys(a.variables + b.variables))
        return a.with_variables(union), b.with_variables(union)

    # -- arithmetic ----------------------------------------------------------------

    def __add__(self, other: "MPoly | RatLike") -> "MPoly":
        if not isinstance(other, MPoly):
            other = MPoly.const(other, self.variables)
        a, b = MPoly._aligned(self, other)
        return MPoly(a.variables, a.terms + b.terms)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly(self.variables, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "MPoly | RatLike") -> "MPoly":
        if not isinstance(other, MPoly):
            other = MPoly.const(other, self.variables)
        return self + (-other)

    def __rsub__(self, other: RatLike) -> "MPoly":
        return MPoly.const(other, self.variables) - self

    def __mul__(self, other: "MPoly | RatLike") -> "MPoly":
        if not isinstance(other, MPoly):
            c = rat(other)
            return MPoly(self.variables, tuple((e, c * k) for e, k in self.terms))
        a, b = MPoly._aligned(self, other)
        acc: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in a.terms:
            for eb, cb in b.terms:
                key = tuple(x + y for x, y in zip(ea, eb))
                acc[key] = acc.get(key, Fraction(0)) + ca * cb
        return MPoly(a.variables, tuple(acc.items()))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative power")
        result = MPoly.const(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- evaluation / substitution ---------------------------------------------------

    def eval(self, env: Mapping[str, RatLike]) -> Fraction:
        total = Fraction(0)
        vals = [rat(env[v]) if v in env else None for v in self.variables]
        for e, c in self.terms:
            prod = c
            for i, exp in enumerate(e):
                if exp:
                    if vals[i] is None:
                        raise KeyError(f"unbound variable {self.variables[i]!r}")
                    prod *= vals[i] ** exp
            total += prod
        return total

    def bind(self, values: Mapping[str, RatLike]) -> "MPoly":
        """Substitute constants for some variables; result drops them."""
        keep = tuple(v for v in self.variables if v not in values)
        keep_idx = [i for i, v in enumerate(self.variables) if v not in values]
        vals = [rat(values[v]) if v in values else None for v in self.variables]
        terms: list[tuple[tuple[int, ...], Fraction]] = []
        for e, c in self.terms:
            coeff = c
            for i, exp in enumerate(e):
                if exp and vals[i] is not None:
                    coeff *= vals[i] ** exp
            terms.append((tuple(e[i] for i in keep_idx), coeff))
        return MPoly(keep, tuple(terms))

    def substitute(self, mapping: Mapping[str, "MPoly | RatLike"]) -> "MPoly":
        """Simultaneous substitution of variables by polynomials/constants."""
        reps: dict[str, MPoly] = {}
        out_vars: list[str] = []
        for v in self.variables:
            if v in mapping:
                r = mapping[v]
                r = r if isinstance(r, MPoly) else MPoly.const(r)
                reps[v] = r
                for nv in r.variables:
                    if nv not in out_vars:
                        out_vars.append(nv)
            else:
                if v not in out_vars:
                    out_vars.append(v)
        out_vars_t = tuple(out_vars)
        result = MPoly.const(0, out_vars_t)
        pow_cache: dict[tuple[str, int], MPoly] = {}

        def power(v: str, n: int) -> MPoly:
            key = (v, n)
            if key not in pow_cache:
                base = reps.get(v) or MPoly.var(v, out_vars_t)
                pow_cache[key] = (base ** n).with_variables(out_vars_t)
            return pow_cache[key]

        for e, c in self.terms:
            prod = MPoly.const(c, out_vars_t)
            for i, exp in enumerate(e):
                if exp:
                    prod = prod * power(self.variables[i], exp)
            result = result + prod
        return result

    def compose_univariate(self, assign: Mapping[str, Poly]) -> Poly:
        """Substitute a univariate Poly for every variable; returns a Poly."""
        result = Poly.zero()
        pow_cache: dict[tuple[str, int], Poly] = {}

        def power(v: str, n: int) -> Poly:
            key = (v, n)
            if key not in pow_cache:
                pow_cache[key] = assign[v] ** n
            return pow_cache[key]

        for e, c in self.terms:
            prod = Poly.const(c)
            for i, exp in enumerate(e):
                if exp:
                    prod = prod * power(self.variables[i], exp)
            result = result + prod
        return result

    def __repr__(self) -> str:
        if not self.terms:
            return "MPoly[0]"
        bits = []
        for e, c in self.terms:
            factors = [rat_str(c)]
            for i, exp in enumerate(e):
                if exp == 1:
                    factors.append(self.variables[i])
                elif exp > 1:
                    factors.append(f"{self.variables[i]}^{exp}")
            bits.append("*".join(factors))
        return "MPoly[" + " + ".join(bits) + "]"


def poly_of_mpoly(p: Poly, q: MPoly) -> MPoly:
    """Compose a univariate polynomial with a multivariate one: p(q(v))."""
    acc = MPoly.const(0, q.variables)
    for c in reversed(p.coeffs):
        acc = acc * q + MPoly.const(c, q.variables)
    return acc
