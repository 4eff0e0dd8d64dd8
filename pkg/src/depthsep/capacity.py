"""Counting ceilings for parameterized gate networks, certified end to end.

The calculators here bound how expressive a layered network is as its
parameters vary: how many 0/1 labelings it can realize on a sample, how
large a shatterable sample can get, how many cells a parameter space splits
into, and how many sample points make fitting uniformly random labels
provably hopeless.  Every irrational ingredient -- a logarithm, the
constant e, a square root -- enters as a two-sided rational enclosure, so
each formula value is an exact bracket and every comparison downstream is
decided, never approximated.

The one empirical piece, :func:`random_label_experiment`, draws random
labels and brute-forces a parameter grid, reporting how often the best fit
beats error 1/4.  Grid search (never local optimization) keeps the
over-all-parameters claim honestly bracketed: any grid hit is a certificate,
and a grid covering every achievable decision boundary is exhaustive.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

from .exact import IntegralEnclosure, RatLike, rat
from .network import NetworkGraph, net_eval, profile

__all__ = [
    "CapacityQuery",
    "GrowthBound",
    "LabelExperiment",
    "e_enclosure",
    "free_param_names",
    "growth_bound",
    "ln_enclosure",
    "min_samples",
    "random_label_bound",
    "random_label_experiment",
    "region_count_bound",
    "vc_bound",
    "sqrt_enclosure",
]

_WIDTH = Fraction(1, 10**9)


# -- certified scalars -----------------------------------------------------------


def _ln_series(r: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Enclosure of ln(r) for 1 <= r <= 2 via 2*atanh((r-1)/(r+1)).

    The series ratio u**2 is at most 1/9 here, so the geometric majorant
    u**(2j+3) / ((2j+3)(1 - u**2)) certifies the tail after each term.
    """
    u = (r - 1) / (r + 1)
    if u == 0:
        return Fraction(0), Fraction(0)
    u2 = u * u
    total = Fraction(0)
    power = u
    j = 0
    while True:
        total += power / (2 * j + 1)
        tail = power * u2 / ((2 * j + 3) * (1 - u2))
        if 2 * tail <= width:
            return 2 * total, 2 * (total + tail)
        power *= u2
        j += 1


@lru_cache(maxsize=None)
def _ln2(width: Fraction) -> tuple[Fraction, Fraction]:
    return _ln_series(Fraction(2), width)


def ln_enclosure(x: RatLike, width: RatLike = _WIDTH) -> IntegralEnclosure:
    """A certified bracket of the natural logarithm of a positive rational.

    Arguments are reduced into [1, 2) against a cached bracket of ln 2, so
    the cost grows only logarithmically with the magnitude of ``x``.
    """
    x = rat(x)
    width = rat(width)
    if x <= 0:
        raise ValueError("the logarithm needs a positive argument")
    if width <= 0:
        raise ValueError("need a positive enclosure width")
    if x < 1:
        inner = ln_enclosure(1 / x, width)
        return IntegralEnclosure(-inner.high, -inner.low, inner.exact)
    shifts = 0
    r = x
    while r >= 2:
        r /= 2
        shifts += 1
    if shifts == 0:
        lo, hi = _ln_series(r, width)
        return IntegralEnclosure(lo, hi, lo == hi)
    lo2, hi2 = _ln2(width / (2 * shifts))
    lo_r, hi_r = _ln_series(r, width / 2)
    return IntegralEnclosure(shifts * lo2 + lo_r, shifts * hi2 + hi_r, False)


@lru_cache(maxsize=None)
def _e_pair(width: Fraction) -> tuple[Fraction, Fraction]:
    # sum of inverse factorials; the rest after 1/j! is below 2/(j+1)!
    total = Fraction(0)
    fact = 1
    j = 0
    while True:
        total += Fraction(1, fact)
        tail = Fraction(2, fact * (j + 1))
        if tail <= width:
            return total, total + tail
        j += 1
        fact *= j


def e_enclosure(width: RatLike = _WIDTH) -> IntegralEnclosure:
    """A certified bracket of Euler's number."""
    width = rat(width)
    if width <= 0:
        raise ValueError("need a positive enclosure width")
    lo, hi = _e_pair(width)
    return IntegralEnclosure(lo, hi, False)


def sqrt_enclosure(x: RatLike, width: RatLike = _WIDTH) -> IntegralEnclosure:
    """A certified bracket of the square root of a nonnegative rational.

    Exact (a point) whenever ``x`` is a perfect square of a rational.
    """
    x = rat(x)
    width = rat(width)
    if x < 0:
        raise ValueError("the square root needs a nonnegative argument")
    if width <= 0:
        raise ValueError("need a positive enclosure width")
    if x == 0:
        return IntegralEnclosure.point(0)
    num, den = x.numerator, x.denominator
    # sqrt(num/den) = sqrt(num*den)/den, bracketed by scaled integer roots
    shift = max(1, math.ceil(1 / (width * den))).bit_length()
    root = math.isqrt(num * den * 4**shift)
    scale = den * 2**shift
    if root * root == num * den * 4**shift:
        return IntegralEnclosure.point(Fraction(root, scale))
    return IntegralEnclosure(Fraction(root, scale), Fraction(root + 1, scale), False)


# -- formula calculators ---------------------------------------------------------


@dataclass(frozen=True)
class CapacityQuery:
    """Architecture counts a capacity formula is evaluated at.

    ``p`` parameter slots in ``l`` layers and ``m`` total nodes, per-gate
    complexity ``(t, alpha, beta)`` (predicates, predicate degree, term
    degree), a sample size ``n``, a failure probability ``delta``, and
    ``sh`` -- a labeling-count value or bound carried alongside.
    """

    p: int = 1
    l: int = 1
    m: int = 1
    t: int = 1
    alpha: int = 1
    beta: int = 1
    n: int = 1
    delta: Fraction = Fraction(1, 2)
    sh: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        for name in ("p", "l", "m", "t", "alpha", "beta", "n"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        object.__setattr__(self, "delta", rat(self.delta))
        object.__setattr__(self, "sh", rat(self.sh))
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.sh < 1:
            raise ValueError("sh must be at least 1")


def vc_bound(q: CapacityQuery, width: RatLike = _WIDTH) -> IntegralEnclosure:
    """Ceiling on the largest sample the parameterized class can shatter.

    Evaluates ``6p(l+1) * (ln(2p(l+1)) + ln(8e*m*t*alpha) + l*ln(beta))``
    as a certified bracket.  The middle logarithm splits as
    ``1 + ln(8*m*t*alpha)`` so only rational logarithms are ever summed.
    """
    width = rat(width)
    if width <= 0:
        raise ValueError("need a positive enclosure width")
    scale = 6 * q.p * (q.l + 1)
    part = width / (3 * scale)
    first = ln_enclosure(2 * q.p * (q.l + 1), part)
    second = ln_enclosure(8 * q.m * q.t * q.alpha, part)
    third = ln_enclosure(q.beta, part / q.l)
    lo = scale * (first.low + 1 + second.low + q.l * third.low)
    hi = scale * (first.high + 1 + second.high + q.l * third.high)
    return IntegralEnclosure(lo, hi, lo == hi)


@dataclass(frozen=True)
class GrowthBound:
    """Counting ceilings for one query: ``dichotomies`` bounds how many 0/1
    labelings of the n sample points the class realizes (exponent p(l+1));
    ``regions`` bounds how many cells the induced parameter-space partition
    has (exponent p*l)."""

    dichotomies: IntegralEnclosure
    regions: IntegralEnclosure


def growth_bound(q: CapacityQuery, width: RatLike = _WIDTH) -> GrowthBound:
    """Certified brackets of ``(8e*n*m*t*alpha*beta**l) ** (p(l+1))`` and of
    the companion ``(...) ** (p*l)``.

    Needs ``n >= p``: with fewer sample points than parameters the labeling
    count is not usefully bounded by this expression.
    """
    width = rat(width)
    if width <= 0:
        raise ValueError("need a positive enclosure width")
    if q.n < q.p:
        raise ValueError("need at least as many sample points as parameters")
    base = 8 * q.n * q.m * q.t * q.alpha * q.beta**q.l
    k_hi = q.p * (q.l + 1)
    k_lo = q.p * q.l
    w = width
    for _ in range(64):
        e_lo, e_hi = _e_pair(w)
        d_lo, d_hi = (base * e_lo) ** k_hi, (base * e_hi) ** k_hi
        r_lo, r_hi = (base * e_lo) ** k_lo, (base * e_hi) ** k_lo
        if d_hi - d_lo <= width and r_hi - r_lo <= width:
            return GrowthBound(
                dichotomies=IntegralEnclosure(d_lo, d_hi, False),
                regions=IntegralEnclosure(r_lo, r_hi, False),
            )
        w /= 1024
    raise AssertionError("enclosure failed to tighten")


def region_count_bound(
    qcount: int, alpha: int, p: int, width: RatLike = _WIDTH
) -> IntegralEnclosure:
    """Certified bracket of ``2 * (4e*qcount*alpha/p) ** p``: how many sign
    cells ``qcount`` predicate polynomials of degree ``alpha`` can cut a
    p-dimensional parameter space into.

    A zero ``qcount*alpha`` (constant predicates) collapses the bound to 0.
    """
    width = rat(width)
    if width <= 0:
        raise ValueError("need a positive enclosure width")
    if p < 1:
        raise ValueError("p must be at least 1")
    if qcount < 0 or alpha < 0:
        raise ValueError("counts must be nonnegative")
    if qcount * alpha == 0:
        return IntegralEnclosure.point(0)
    base = Fraction(4 * qcount * alpha, p)
    w = width
    for _ in range(64):
        e_lo, e_hi = _e_pair(w)
        lo, hi = 2 * (base * e_lo) ** p, 2 * (base * e_hi) ** p
        if hi - lo <= width:
            return IntegralEnclosure(lo, hi, False)
        w /= 1024
    raise AssertionError("enclosure failed to tighten")


def random_label_bound(
    sh: RatLike, n: int, delta: RatLike, width: RatLike = _WIDTH
) -> IntegralEnclosure:
    """Certified bracket of ``(1/2)(1 - sqrt((ln(sh) + ln(1/delta))/(2n)))``.

    With probability at least ``1 - delta`` over uniform random labels on n
    points, every classifier from a class realizing at most ``sh`` labelings
    errs on at least this fraction of them.
    """
    sh = rat(sh)
    delta = rat(delta)
    width = rat(width)
    if sh < 1:
        raise ValueError("sh must be at least 1")
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if width <= 0:
        raise ValueError("need a positive enclosure width")
    if sh == 1 and delta == 1:
        return IntegralEnclosure.point(Fraction(1, 2))
    w = width
    for _ in range(64):
        log_sh = ln_enclosure(sh, w) if sh > 1 else IntegralEnclosure.point(0)
        log_inv = (
            ln_enclosure(1 / delta, w) if delta < 1 else IntegralEnclosure.point(0)
        )
        rad_lo = (log_sh.low + log_inv.low) / (2 * n)
        rad_hi = (log_sh.high + log_inv.high) / (2 * n)
        root_lo = sqrt_enclosure(rad_lo, w).low
        root_hi = sqrt_enclosure(rad_hi, w).high
        lo, hi = (1 - root_hi) / 2, (1 - root_lo) / 2
        if hi - lo <= width:
            return IntegralEnclosure(lo, hi, lo == hi)
        w /= 1024
    raise AssertionError("enclosure failed to tighten")


def min_samples(
    p: int,
    l: int,
    m: int,
    t: int,
    alpha: int,
    beta: int,
    delta: RatLike,
) -> int:
    """The least sample count n with
    ``n >= 8p*l**2 * ln(8e*m*t*alpha*beta*p*(l+1)) + 4*ln(1/delta)``.

    Past this threshold, fitting uniformly random labels to error below 1/4
    fails with probability at least ``1 - delta``.  The threshold itself is
    irrational, so tightening the bracket always separates it from the
    integers and the ceiling is exact.
    """
    for name, value in (
        ("p", p), ("l", l), ("m", m), ("t", t), ("alpha", alpha), ("beta", beta)
    ):
        if value < 1:
            raise ValueError(f"{name} must be at least 1")
    delta = rat(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    lead = 8 * p * l * l
    arg = 8 * m * t * alpha * beta * p * (l + 1)
    w = _WIDTH
    for _ in range(64):
        # ln(e * arg) = 1 + ln(arg) keeps everything rational-argument
        log_arg = ln_enclosure(arg, w)
        log_inv = (
            ln_enclosure(1 / delta, w) if delta < 1 else IntegralEnclosure.point(0)
        )
        lo = lead * (1 + log_arg.low) + 4 * log_inv.low
        hi = lead * (1 + log_arg.high) + 4 * log_inv.high
        if math.ceil(lo) == math.ceil(hi):
            return math.ceil(lo)
        w /= 1024
    raise AssertionError("the threshold would not separate from an integer")


# -- the random-label experiment -------------------------------------------------


def free_param_names(net: NetworkGraph) -> tuple[str, ...]:
    """Slot names the network leaves unbound, sorted.

    A slot is free when no gate gives it a default and the network-level
    bindings do not cover it; these are the coordinates a parameter search
    ranges over.
    """
    free: set[str] = set()
    for layer in net.layers:
        for node in layer:
            for name, value in node.gate.params:
                if value is None and name not in net.params:
                    free.add(name)
    return tuple(sorted(free))


@dataclass(frozen=True)
class LabelExperiment:
    """Outcome of fitting random labels by exhaustive parameter search.

    One entry per trial: the best empirical classification error over the
    grid and the grid point achieving it (so every reported number can be
    replayed).  ``within_hypothesis`` is False in the diagnostic mode that
    replaces random labels with a constant labeling, which the guarantee
    says nothing about.
    """

    n: int
    trials: int
    seed: int
    threshold: int
    within_hypothesis: bool
    params: tuple[str, ...]
    grid: tuple[Fraction, ...]
    best_errors: tuple[Fraction, ...]
    best_bindings: tuple[tuple[tuple[str, Fraction], ...], ...]

    @property
    def low_fraction(self) -> Fraction:
        """The share of trials whose best error fell below 1/4."""
        hits = sum(1 for e in self.best_errors if e < Fraction(1, 4))
        return Fraction(hits, self.trials)


def random_label_experiment(
    net: NetworkGraph,
    n: int,
    trials: int,
    seed: int,
    grid: Sequence[RatLike],
    delta: RatLike = Fraction(1, 20),
    constant_labels: bool = False,
) -> LabelExperiment:
    """Draw random labels on n points and grid-search the network against them.

    The sample is the n midpoints ``(2i+1)/(2n)`` of a uniform split of
    [0, 1].  Each trial labels them by independent fair coin flips (trial j
    uses seed ``seed + j``), then the free parameters (at most two) range
    over the cartesian power of ``grid``, scoring each combination by the
    fraction of points where the thresholded output ``1[f(x) >= 1/2]``
    disagrees with the label.

    Refuses to run when n is below the :func:`min_samples` threshold for the
    network's shape (with ``p`` = the free-slot count), since below it the
    random-label guarantee offers nothing to test.  ``constant_labels``
    replaces the coin flips with all-zero labels as a diagnostic; the report
    is then flagged as outside the guarantee's hypothesis.
    """
    if net.dim != 1:
        raise ValueError("the experiment samples a single input line")
    names = free_param_names(net)
    if not names:
        raise ValueError("the experiment needs at least one free parameter")
    if len(names) > 2:
        raise ValueError("grid search brackets at most two free parameters")
    if trials < 1:
        raise ValueError("need at least one trial")
    axis = tuple(rat(v) for v in grid)
    if not axis:
        raise ValueError("need a nonempty parameter grid")
    prof = profile(net)
    threshold = min_samples(
        len(names),
        prof.l,
        prof.m,
        max(prof.t, 1),
        max(prof.alpha, 1),
        max(prof.beta, 1),
        delta,
    )
    if n < threshold:
        raise ValueError(
            f"n = {n} is below the sample threshold {threshold}; "
            "the random-label guarantee does not apply"
        )
    points = [Fraction(2 * i + 1, 2 * n) for i in range(n)]
    half = Fraction(1, 2)
    combos = list(product(axis, repeat=len(names)))
    masks = []
    for combo in combos:
        binding = dict(zip(names, combo))
        mask = 0
        for i, z in enumerate(points):
            if net_eval(net, (z,), binding) >= half:
                mask |= 1 << i
        masks.append(mask)
    best_errors = []
    best_bindings = []
    for trial in range(trials):
        if constant_labels:
            labels = 0
        else:
            labels = random.Random(seed + trial).getrandbits(n)
        scores = [(mask ^ labels).bit_count() for mask in masks]
        best = min(scores)
        combo = combos[scores.index(best)]
        best_errors.append(Fraction(best, n))
        best_bindings.append(tuple(zip(names, combo)))
    return LabelExperiment(
        n=n,
        trials=trials,
        seed=seed,
        threshold=threshold,
        within_hypothesis=not constant_labels,
        params=names,
        grid=axis,
        best_errors=tuple(best_errors),
        best_bindings=tuple(best_bindings),
    )
