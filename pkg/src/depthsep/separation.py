"""Exact evidence that shallow candidates cannot track a deep oscillator.

The deep target is the ``level``-fold composition of the unit tent, whose
graph crosses 1/2 on ``2**level + 1`` alternating intervals.  A candidate
drawn from a restricted class -- a shallow network, a weighted tree
ensemble, or a low-degree polynomial -- has a small crossing count, so it
sits on the wrong side of 1/2 on most of those intervals, and each such
interval contributes an exactly-computable sliver of area to the L1 gap.

Everything here is rational arithmetic: crossing counts come from root
isolation, distances are certified enclosures, and the discrete sample
errors are finite sums.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence, Union

from .constructions import closed_form_fk, iterate, triangle_quad, triangle_relu
from .exact import (
    AlgebraicReal,
    IntegralEnclosure,
    Point,
    Poly,
    RatLike,
    isolate_roots,
    point_sign_of,
    rat,
    rat_str,
)
from .gates import BoostedTrees, DecisionTree, Leaf, Split, encode_relu, node_count
from .network import (
    LineMap,
    NetworkGraph,
    Node,
    compile_net,
    crossing_bound,
    crossing_bound_bdt,
    profile,
    restrict_line,
)
from .partition import Interval, Partition
from .piecewise import (
    PiecewisePoly,
    classifier,
    crossing_number,
    disagreement,
    l1_distance,
    merge_equal,
    pwp_eval,
    pwp_linear,
)

__all__ = [
    "CandidateSpec",
    "NuSample",
    "PolyReport",
    "SeparationReport",
    "candidate_pwp",
    "candidate_search",
    "class_check",
    "discrete_errors",
    "enumerate_candidates",
    "nu_points",
    "poly_separation_check",
    "report_csv",
    "tent_l1_lower",
    "tent_target",
    "verify_separation",
]

Candidate = Union[NetworkGraph, BoostedTrees, Poly]

_HALF = Fraction(1, 2)


# -- the discrete sample -------------------------------------------------------


@dataclass(frozen=True)
class NuSample:
    """A uniform discrete sample sitting on the extrema of a folded tent.

    ``points`` are the ``2**k + 1`` extremal inputs in ascending order and
    ``values`` the exact heights there, alternating 0, 1, 0, ... starting
    from 0 at the left edge.
    """

    points: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(rat(z) for z in self.points))
        object.__setattr__(self, "values", tuple(rat(v) for v in self.values))
        if len(self.points) != len(self.values):
            raise ValueError("need one value per point")
        s = len(self.points)
        if s < 3 or (s - 1) & (s - 2) != 0:
            raise ValueError("point count must be a power of two plus one")
        for a, b in zip(self.points, self.points[1:]):
            if a >= b:
                raise ValueError("points must be strictly ascending")
        for i, v in enumerate(self.values):
            if v != i % 2:
                raise ValueError("values must alternate 0, 1, 0, ... from 0")

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def level(self) -> int:
        """The fold count k with ``2**k + 1`` points."""
        return (self.size - 1).bit_length() - 1


def nu_points(k: int) -> NuSample:
    """The extremal sample of the k-fold tent: points i/2**k, heights i mod 2.

    Every height is cross-checked against the closed form before the sample
    is released.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    denom = 2**k
    points = tuple(Fraction(i, denom) for i in range(denom + 1))
    values = tuple(Fraction(i % 2) for i in range(denom + 1))
    for z, v in zip(points, values):
        if closed_form_fk(z, k) != v:
            raise AssertionError("extremal height drifted from the closed form")
    return NuSample(points, values)


def discrete_errors(
    target: PiecewisePoly, g: PiecewisePoly, nu: NuSample
) -> tuple[Fraction, Fraction]:
    """Mean classification and value gaps between two functions on a sample.

    Returns ``(classify_err, value_err)``: the fraction of sample points on
    which the two functions land on opposite sides of 1/2 (exact ties count
    as >= 1/2), and the mean of ``|target - g|`` over the sample.  Both are
    exact rationals.
    """
    s = nu.size
    classify = Fraction(0)
    value = Fraction(0)
    for z in nu.points:
        hv = rat(pwp_eval(target, z))
        gv = rat(pwp_eval(g, z))
        classify += abs((1 if hv >= _HALF else 0) - (1 if gv >= _HALF else 0))
        value += abs(hv - gv)
    return classify / s, value / s


# -- candidate classes ---------------------------------------------------------


_KINDS = ("shallow-net", "bdt", "polynomial")


@dataclass(frozen=True)
class CandidateSpec:
    """A search-space description for one family of shallow candidates.

    ``k`` is the oscillation scale the class is measured against: shallow
    networks may use at most ``k`` layers and ``2**k`` nodes scaled down by
    their gate complexity, tree ensembles share a budget of ``2**(k**3)``
    nodes, and polynomials stay at degree ``2**(k-3)`` or lower.
    """

    kind: str
    k: int
    layers: int = 0
    nodes: int = 0
    trees: int = 0
    tree_nodes: int = 0
    degree: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown candidate kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("need k >= 1")
        if self.kind == "shallow-net":
            if not 1 <= self.layers <= self.k:
                raise ValueError("layer cap must lie between 1 and k")
            if not 1 <= self.nodes <= 2**self.k:
                raise ValueError("node cap must lie between 1 and 2**k")
        elif self.kind == "bdt":
            if self.trees < 1 or self.tree_nodes < 1:
                raise ValueError("need positive tree and node caps")
            if self.trees * self.tree_nodes > 2 ** (self.k**3):
                raise ValueError("tree caps exceed the ensemble node budget")
        else:
            if self.degree < 0:
                raise ValueError("degree cap must be nonnegative")
            if 8 * self.degree > 2**self.k:
                raise ValueError("degree cap exceeds the class limit 2**(k-3)")


def class_check(k: int, candidate: Candidate) -> None:
    """Raise unless the candidate fits the shallow class at scale k.

    Shallow networks must keep at most ``k`` layers and ``m`` nodes with
    ``m * t * alpha * beta <= 2**k`` (complexity entries below one are
    floored at one).  Tree ensembles of ``t`` trees allow each tree at most
    ``2**(k**3) / t`` nodes.  Polynomials stay at degree ``2**(k-3)``.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if isinstance(candidate, NetworkGraph):
        prof = profile(candidate)
        if prof.l > k:
            raise ValueError(
                f"class violation: {prof.l} layers exceed the depth cap {k}"
            )
        scale = max(prof.t, 1) * max(prof.alpha, 1) * max(prof.beta, 1)
        if prof.m * scale > 2**k:
            raise ValueError(
                f"class violation: {prof.m} nodes exceed the cap "
                f"2**k/(t*alpha*beta) = {rat_str(Fraction(2**k, scale))}"
            )
    elif isinstance(candidate, BoostedTrees):
        t = len(candidate.trees)
        budget = 2 ** (k**3)
        for tree in candidate.trees:
            if node_count(tree) * t > budget:
                raise ValueError(
                    f"class violation: a tree with {node_count(tree)} nodes "
                    f"exceeds the per-tree budget {budget}/{t}"
                )
    elif isinstance(candidate, Poly):
        if 8 * max(candidate.degree, 0) > 2**k:
            raise ValueError(
                f"class violation: degree {candidate.degree} exceeds the "
                f"cap 2**(k-3)"
            )
    else:
        raise TypeError(
            "candidate must be a NetworkGraph, BoostedTrees, or Poly"
        )


# -- candidate compilation -----------------------------------------------------


def _tree_segments(
    tree: DecisionTree,
    lo: Fraction | None,
    lo_closed: bool,
    hi: Fraction | None,
    hi_closed: bool,
    out: list[tuple[Fraction | None, bool, Fraction | None, bool, Fraction]],
) -> None:
    """Left-to-right leaf intervals of a univariate tree, empties dropped."""
    if isinstance(tree, Leaf):
        out.append((lo, lo_closed, hi, hi_closed, tree.value))
        return
    (c,) = tree.a
    if c == 0:
        # the split never looks at the input: -b < 0 sends everything left
        branch = tree.left if -tree.b < 0 else tree.right
        _tree_segments(branch, lo, lo_closed, hi, hi_closed, out)
        return
    cut = tree.b / c
    # the tie c*z - b == 0 walks right, so the right branch owns the cut
    # point: below the cut is (.., cut) / above is [cut, ..) when c > 0,
    # and the openness mirrors, (.., cut] / (cut, ..), when c < 0.
    if c > 0:
        below, above = tree.left, tree.right
        below_hi_closed, above_lo_closed = False, True
    else:
        below, above = tree.right, tree.left
        below_hi_closed, above_lo_closed = True, False
    # region intersect (-inf, cut)
    if hi is None or cut < hi:
        b_hi, b_hi_c = cut, below_hi_closed
    elif cut == hi:
        b_hi, b_hi_c = cut, below_hi_closed and hi_closed
    else:
        b_hi, b_hi_c = hi, hi_closed
    if lo is None or lo < b_hi or (lo == b_hi and lo_closed and b_hi_c):
        _tree_segments(below, lo, lo_closed, b_hi, b_hi_c, out)
    # region intersect (cut, inf)
    if lo is None or cut > lo:
        a_lo, a_lo_c = cut, above_lo_closed
    elif cut == lo:
        a_lo, a_lo_c = cut, above_lo_closed and lo_closed
    else:
        a_lo, a_lo_c = lo, lo_closed
    if hi is None or a_lo < hi or (a_lo == hi and a_lo_c and hi_closed):
        _tree_segments(above, a_lo, a_lo_c, hi, hi_closed, out)


def _tree_pwp(tree: DecisionTree) -> PiecewisePoly:
    """The exact piecewise-constant graph of a univariate decision tree."""
    segs: list[tuple[Fraction | None, bool, Fraction | None, bool, Fraction]] = []
    _tree_segments(tree, None, False, None, False, segs)
    pieces = []
    polys = []
    for lo, lo_c, hi, hi_c, v in segs:
        pieces.append(Interval(lo, hi, lo_c, hi_c))
        polys.append(Poly.const(v))
    return merge_equal(PiecewisePoly(Partition(tuple(pieces)), tuple(polys)))


def _is_upward_stump(tree: DecisionTree) -> bool:
    return (
        isinstance(tree, Split)
        and isinstance(tree.left, Leaf)
        and isinstance(tree.right, Leaf)
        and len(tree.a) == 1
        and tree.a[0] > 0
    )


def _stump_sum_pwp(bt: BoostedTrees) -> PiecewisePoly:
    """Sum an all-stump ensemble by sweeping its sorted thresholds.

    Each stump is a single step: value jumps at b/a, with the right branch
    owning the threshold point.  Sorting thresholds and accumulating the
    jumps builds the exact piecewise-constant sum in one pass.
    """
    base = Fraction(0)
    jumps: dict[Fraction, Fraction] = {}
    for w, tree in zip(bt.weights, bt.trees):
        assert isinstance(tree, Split)
        theta = tree.b / tree.a[0]
        base += w * tree.left.value
        jumps[theta] = jumps.get(theta, Fraction(0)) + w * (
            tree.right.value - tree.left.value
        )
    cuts = sorted(jumps)
    pieces = []
    values = []
    lo: Fraction | None = None
    running = base
    for theta in cuts:
        pieces.append(Interval(lo, theta, lo is not None, False))
        values.append(Poly.const(running))
        running += jumps[theta]
        lo = theta
    pieces.append(Interval(lo, None, lo is not None, False))
    values.append(Poly.const(running))
    return merge_equal(PiecewisePoly(Partition(tuple(pieces)), tuple(values)))


def _bdt_pwp(bt: BoostedTrees) -> PiecewisePoly:
    """The exact graph of a univariate weighted tree ensemble.

    All-stump ensembles take the threshold sweep; mixed shapes go through
    the generic per-tree refinement.
    """
    if all(_is_upward_stump(t) for t in bt.trees):
        return _stump_sum_pwp(bt)
    return pwp_linear(bt.weights, [_tree_pwp(t) for t in bt.trees])


def _restrict_tree(tree: DecisionTree, line: LineMap) -> DecisionTree:
    if isinstance(tree, Leaf):
        return tree
    if len(tree.a) != line.dim:
        raise ValueError("split width does not match the line dimension")
    slope = sum((c * a for c, a in zip(tree.a, line.a)), Fraction(0))
    shift = tree.b - sum((c * b for c, b in zip(tree.a, line.b)), Fraction(0))
    return Split(
        (slope,),
        shift,
        _restrict_tree(tree.left, line),
        _restrict_tree(tree.right, line),
    )


def _bdt_arity(bt: BoostedTrees) -> int:
    def width(tree: DecisionTree) -> int:
        if isinstance(tree, Leaf):
            return 1
        return max(len(tree.a), width(tree.left), width(tree.right))

    return max(width(t) for t in bt.trees)


def candidate_pwp(candidate: Candidate, line: LineMap | None = None) -> PiecewisePoly:
    """The exact univariate graph of a candidate.

    Multi-input candidates must come with a line to restrict along;
    univariate ones may omit it.
    """
    if isinstance(candidate, NetworkGraph):
        net = candidate
        if line is not None:
            net = restrict_line(net, line)
        if net.dim != 1:
            raise ValueError("a line map is needed for a multi-input candidate")
        return compile_net(net)
    if isinstance(candidate, BoostedTrees):
        bt = candidate
        if line is not None:
            bt = BoostedTrees(
                bt.weights, tuple(_restrict_tree(t, line) for t in bt.trees)
            )
        elif _bdt_arity(bt) > 1:
            raise ValueError("a line map is needed for a multi-input candidate")
        return _bdt_pwp(bt)
    if isinstance(candidate, Poly):
        return PiecewisePoly.of_poly(candidate)
    raise TypeError("candidate must be a NetworkGraph, BoostedTrees, or Poly")


# -- the deep target -----------------------------------------------------------


@lru_cache(maxsize=None)
def tent_target(level: int) -> PiecewisePoly:
    """The compiled ``level``-fold tent composition (cached; do not mutate)."""
    if level < 1:
        raise ValueError("need level >= 1")
    return compile_net(iterate(triangle_relu(), level))


# -- the fast certified floor --------------------------------------------------


def _parity_count(lo: int, hi: int, parity: int) -> int:
    """How many integers in [lo, hi] have the given parity."""
    if hi < lo:
        return 0
    first = lo if lo % 2 == parity else lo + 1
    if first > hi:
        return 0
    return (hi - first) // 2 + 1


def _rational_endpoint(x: Point | None, default: Fraction) -> Fraction:
    if x is None:
        return default
    if isinstance(x, AlgebraicReal):
        if not x.is_rational:
            raise ValueError(
                "the fast floor needs rational classifier breakpoints"
            )
        return x.as_rational()
    return rat(x)


def tent_l1_lower(level: int, g: PiecewisePoly) -> tuple[Fraction, int]:
    """A certified lower bound for the L1 gap to the level-fold tent on [0, 1].

    The unit window splits into ``2**level + 1`` intervals on which the tent
    iterate stays on one side of 1/2.  Wherever g's classifier is stuck on
    the opposite side throughout such an interval, ``|tent - g| >= |tent - 1/2|``
    there, and that area is an exact dyadic triangle: ``2**-(level+2)`` for an
    interior interval and ``2**-(level+3)`` for the two half-width edges.

    Returns ``(bound, charged)`` where ``charged`` counts the intervals on
    which g's classifier disagrees everywhere.  The bound never touches the
    compiled target, so it cross-checks the generic integration route.
    Requires rational classifier breakpoints.
    """
    if level < 1:
        raise ValueError("need level >= 1")
    size = 2**level
    cls = classifier(g)
    # classifier spans clipped to [0, 1], in scaled coordinates T = x * size;
    # interval j occupies (j - 1/2, j + 1/2) there, with parity value j mod 2
    spans: list[tuple[Fraction, Fraction, int]] = []
    for piece, poly in zip(cls.partition.pieces, cls.polys):
        a = _rational_endpoint(piece.lo, Fraction(0))
        b = _rational_endpoint(piece.hi, Fraction(1))
        a = max(a, Fraction(0))
        b = min(b, Fraction(1))
        if a > b:
            continue
        value = int(poly.coeffs[0]) if poly.coeffs else 0
        spans.append((a * size, b * size, value))
    # pieces seen by more than one span are exactly the span-range borders
    shared: dict[int, set[int]] = {}
    missed_inner = 0
    for a, b, v in spans:
        j0 = math.floor(a - _HALF) + 1
        j1 = math.ceil(b + _HALF) - 1
        j0 = max(j0, 0)
        j1 = min(j1, size)
        if j1 < j0:
            continue
        shared.setdefault(j0, set()).add(v)
        if j1 != j0:
            shared.setdefault(j1, set()).add(v)
        lo_i, hi_i = j0 + 1, j1 - 1
        if hi_i >= lo_i:
            missed_inner += (hi_i - lo_i + 1) - _parity_count(lo_i, hi_i, v)
    missed_shared = sum(1 for q, vs in shared.items() if (q % 2) not in vs)
    charged = missed_inner + missed_shared
    edges = sum(
        1 for q in (0, size) if q not in shared or (q % 2) not in shared[q]
    )
    bound = (charged - edges) * Fraction(1, 2 ** (level + 2)) + edges * Fraction(
        1, 2 ** (level + 3)
    )
    return bound, charged


# -- full verification along a line --------------------------------------------


@dataclass(frozen=True)
class SeparationReport:
    """Outcome of one exact deep-target-versus-candidate comparison."""

    kind: str
    size: str
    k: int
    target_crossings: int
    candidate_crossings: int
    bound: Fraction
    bound_ok: bool
    disagree: int
    l1_low: Fraction
    l1_high: Fraction
    passed: bool
    note: str


def _candidate_shape(candidate: Candidate) -> tuple[str, str]:
    if isinstance(candidate, NetworkGraph):
        prof = profile(candidate)
        return "shallow-net", f"layers={prof.l};nodes={prof.m}"
    if isinstance(candidate, BoostedTrees):
        widest = max(node_count(t) for t in candidate.trees)
        return "bdt", f"trees={len(candidate.trees)};nodes={widest}"
    return "polynomial", f"degree={max(candidate.degree, 0)}"


def verify_separation(
    k: int, candidate: Candidate, line: LineMap | None = None
) -> SeparationReport:
    """Exactly compare a class-limited candidate against the deep target.

    The target is the ``(k**3 + 4)``-fold tent composition.  The candidate is
    first vetted against the scale-k class limits, then restricted along the
    line (if one is given), compiled to an exact piecewise form, and measured:
    its crossing count, its formula crossing ceiling, the per-interval
    disagreement count, and the L1 distance over [0, 1] as a certified
    enclosure.  ``passed`` records whether the distance provably exceeds 1/64.

    For multi-input candidates the verdict covers the chosen line only:
    sound for refuting approximation along that line, silent about others.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    class_check(k, candidate)
    if isinstance(candidate, NetworkGraph):
        bound = Fraction(crossing_bound(profile(candidate)).simplified)
    elif isinstance(candidate, BoostedTrees):
        widest = max(node_count(t) for t in candidate.trees)
        bound = Fraction(crossing_bound_bdt(len(candidate.trees), widest))
    else:
        raise TypeError("candidate must be a NetworkGraph or BoostedTrees")
    level = k**3 + 4
    target = tent_target(level)
    restricted = line is not None
    g = candidate_pwp(candidate, line)
    report = disagreement(target, g)
    ceiling = Fraction(2 ** (k**3 + 2))
    # sanity: the counting chain the whole argument rests on
    if 2 * report.disagree < report.s_f - 2 * report.s_g:
        raise AssertionError("disagreement undercuts the crossing-count chain")
    enc = l1_distance(target, g, 0, 1)
    if report.s_g <= ceiling:
        floor = Fraction(1, 32) * (1 - Fraction(2 * report.s_g, report.s_f))
        if enc.high < floor:
            raise AssertionError("distance undercuts the crossing-count chain")
    kind, shape = _candidate_shape(candidate)
    note = (
        "restricted to one line; sound for refutation along it only"
        if restricted
        else "exact over [0, 1] on the single input line"
    )
    return SeparationReport(
        kind=kind,
        size=shape,
        k=k,
        target_crossings=report.s_f,
        candidate_crossings=report.s_g,
        bound=bound,
        bound_ok=bound <= ceiling,
        disagree=report.disagree,
        l1_low=enc.low,
        l1_high=enc.high,
        passed=enc.low >= Fraction(1, 64),
        note=note,
    )


def report_csv(reports: Sequence[SeparationReport]) -> str:
    """One CSV row per report: kind, size, Cr, formula bound, L1 range, pass."""
    lines = ["kind,size,crossings,bound,l1_low,l1_high,pass"]
    for r in reports:
        lines.append(
            f"{r.kind},{r.size},{r.candidate_crossings},{rat_str(r.bound)},"
            f"{rat_str(r.l1_low)},{rat_str(r.l1_high)},"
            f"{'1' if r.passed else '0'}"
        )
    return "\n".join(lines) + "\n"


# -- candidate generation ------------------------------------------------------


_COARSE = tuple(Fraction(i, 2) for i in range(-8, 9))


def _stump_net(a: RatLike, b: RatLike) -> NetworkGraph:
    return NetworkGraph(1, ((Node(encode_relu([a], b), ((0, 0),)),),))


def _tent_template_net(c1: RatLike, c2: RatLike) -> NetworkGraph:
    lower = (
        Node(encode_relu([1], 0), ((0, 0),)),
        Node(encode_relu([1], Fraction(-1, 2)), ((0, 0),)),
    )
    out = Node(encode_relu([c1, c2], 0), ((1, 0), (1, 1)))
    return NetworkGraph(1, (lower, (out,)))


def _random_relu_net(rng: random.Random, max_layers: int, node_cap: int) -> NetworkGraph:
    depth = rng.randint(1, min(max_layers, node_cap))
    widths = []
    budget = node_cap - 1  # the output node is spoken for
    for i in range(depth - 1):
        others = depth - 2 - i  # hidden layers still to come
        w = rng.randint(1, max(1, min(3, budget - others)))
        widths.append(w)
        budget -= w
    widths.append(1)

    def weight() -> Fraction:
        return Fraction(rng.randint(-64, 64), 16)

    layers = []
    prev = 1
    for li, w in enumerate(widths):
        layer = []
        for _ in range(w):
            coeffs = [weight() for _ in range(prev)]
            layer.append(
                Node(
                    encode_relu(coeffs, weight()),
                    tuple((li, j) for j in range(prev)),
                )
            )
        layers.append(tuple(layer))
        prev = w
    return NetworkGraph(1, tuple(layers))


def _stump(theta: RatLike, low: RatLike, high: RatLike) -> Split:
    return Split((Fraction(1),), rat(theta), Leaf(rat(low)), Leaf(rat(high)))


def _net_candidates(spec: CandidateSpec, budget: int) -> Iterator[NetworkGraph]:
    node_cap = min(spec.nodes, 2**spec.k)
    yielded = 0
    if spec.layers >= 2 and node_cap >= 3:
        for c1 in _COARSE:
            for c2 in _COARSE:
                if yielded >= budget:
                    return
                yield _tent_template_net(c1, c2)
                yielded += 1
    side = math.isqrt(max(budget - yielded, 0))
    if side >= 2:
        step = Fraction(8, side - 1)
        grid = [Fraction(-4) + i * step for i in range(side)]
        for a in grid:
            for b in grid:
                if yielded >= budget:
                    return
                yield _stump_net(a, b)
                yielded += 1
    rng = random.Random(spec.seed * 1000003 + 17)
    while yielded < budget:
        yield _random_relu_net(rng, spec.layers, node_cap)
        yielded += 1


def _bdt_candidates(spec: CandidateSpec, budget: int) -> Iterator[BoostedTrees]:
    if spec.tree_nodes < 3:
        return  # even a single split needs three nodes
    yielded = 0
    n = max(2, min(64, budget // 2 - 1))
    for i in range(n + 1):
        theta = Fraction(i, n)
        for low, high in ((0, 1), (1, 0)):
            if yielded >= budget:
                return
            yield BoostedTrees((Fraction(1),), (_stump(theta, low, high),))
            yielded += 1
    rng = random.Random(spec.seed * 1000003 + 29)
    while yielded < budget:
        t = rng.randint(1, spec.trees)
        trees = tuple(
            _stump(
                Fraction(rng.randint(0, 64), 64),
                Fraction(rng.randint(-4, 4), 4),
                Fraction(rng.randint(-4, 4), 4),
            )
            for _ in range(t)
        )
        weights = tuple(Fraction(rng.randint(-8, 8), 8) for _ in range(t))
        yield BoostedTrees(weights, trees)
        yielded += 1


def _poly_candidates(spec: CandidateSpec, budget: int) -> Iterator[Poly]:
    grid = (Fraction(0), Fraction(1), Fraction(-1), _HALF, -_HALF)
    yielded = 0
    for coeffs in product(grid, repeat=spec.degree + 1):
        if yielded >= budget:
            return
        yield Poly.of(*coeffs)
        yielded += 1
    rng = random.Random(spec.seed * 1000003 + 43)
    while yielded < budget:
        d = rng.randint(0, spec.degree)
        yield Poly.of(*(Fraction(rng.randint(-16, 16), 8) for _ in range(d + 1)))
        yielded += 1


def enumerate_candidates(spec: CandidateSpec, budget: int) -> Iterator[Candidate]:
    """A deterministic stream of at most ``budget`` class-legal candidates.

    Coarse grids come first (so reruns share their prefix), then seeded
    random draws fill the remaining budget.  Every candidate is vetted with
    :func:`class_check` before it is yielded.
    """
    if budget < 1:
        raise ValueError("the search needs a positive budget")
    if spec.kind == "shallow-net":
        source: Iterator[Candidate] = _net_candidates(spec, budget)
    elif spec.kind == "bdt":
        source = _bdt_candidates(spec, budget)
    else:
        source = _poly_candidates(spec, budget)
    for candidate in source:
        class_check(spec.k, candidate)
        yield candidate


def candidate_search(
    spec: CandidateSpec, target: PiecewisePoly, budget: int
) -> tuple[Candidate, IntegralEnclosure]:
    """Scan a candidate family for the smallest L1 gap to a target on [0, 1].

    Deterministic given the spec's seed.  Returns the argmin candidate with
    its distance enclosure (judged by the enclosure's upper end); this is a
    brute-force search, never a claim of global optimality.
    """
    if budget < 1:
        raise ValueError("the search needs a positive budget")
    best: Candidate | None = None
    best_enc: IntegralEnclosure | None = None
    for candidate in enumerate_candidates(spec, budget):
        enc = l1_distance(target, candidate_pwp(candidate), 0, 1)
        if best_enc is None or enc.high < best_enc.high:
            best, best_enc = candidate, enc
    if best is None or best_enc is None:
        raise ValueError("empty search space")
    return best, best_enc


# -- the polynomial corollary --------------------------------------------------


@dataclass(frozen=True)
class PolyReport:
    """Outcome of the low-degree polynomial check against the folded parabola."""

    k: int
    degree: int
    points: int
    crossings: int
    crossing_limit: Fraction
    crossings_ok: bool
    classify_err: Fraction
    value_low: Fraction
    value_high: Fraction
    classify_ok: bool
    value_ok: bool


@lru_cache(maxsize=None)
def _parabola_extrema(k: int) -> tuple[tuple[Point, ...], tuple[Fraction, ...]]:
    """Extrema of the k-fold parabola 4z(1-z) on [0, 1], with exact heights."""
    compiled = compile_net(iterate(triangle_quad(), k))
    if compiled.piece_count != 1:
        raise AssertionError("the folded parabola should be one global piece")
    folded = compiled.polys[0]
    interior = isolate_roots(
        folded.derivative(), Interval(Fraction(0), Fraction(1), False, False)
    )
    points: list[Point] = [Fraction(0)]
    points.extend(r.as_rational() if r.is_rational else r for r in interior)
    points.append(Fraction(1))
    if len(points) != 2**k + 1:
        raise AssertionError("extremum count drifted from 2**k + 1")
    values = []
    for i, z in enumerate(points):
        v = pwp_eval(compiled, z)
        v = rat(v) if not isinstance(v, AlgebraicReal) else v.as_rational()
        if v != i % 2:
            raise AssertionError("extremal heights stopped alternating")
        values.append(v)
    return tuple(points), tuple(values)


def poly_separation_check(k: int, g: Poly) -> PolyReport:
    """Measure a low-degree polynomial against the k-fold parabola 4z(1-z).

    The candidate must have degree at most ``2**(k-3)``.  The report records
    its exact crossing count against the chain ``Cr <= 1 + 2**(k-3) <= 2**(k-2)``
    and the discrete errors on the parabola's own extremal sample: the exact
    classification error (checked against 1/4) and a certified enclosure of
    the mean value error (checked against 1/8).  Extremal points may be
    irrational, so the value error is an enclosure rather than one rational.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    limit = Fraction(2**k, 8)
    degree = max(g.degree, 0)
    if degree > limit:
        raise ValueError(
            f"degree {degree} exceeds the class limit 2**(k-3) = {rat_str(limit)}"
        )
    points, values = _parabola_extrema(k)
    s = len(points)
    crossings = crossing_number(PiecewisePoly.of_poly(g))
    crossing_limit = 1 + limit
    crossings_ok = (
        Fraction(crossings) <= crossing_limit
        and crossing_limit <= Fraction(2**k, 4)
    )
    gap = g - Poly.const(_HALF)
    mism = 0
    value_low = Fraction(0)
    value_high = Fraction(0)
    width = Fraction(1, 2**48)
    for z, v in zip(points, values):
        g_side = 1 if point_sign_of(z, gap) >= 0 else 0
        if g_side != v:
            mism += 1
        if isinstance(z, AlgebraicReal) and not z.is_rational:
            lo, hi = z.enclosure(width)
            g_lo, g_hi = g.bound_on(lo, hi)
            if g_lo <= v <= g_hi:
                term_lo = Fraction(0)
            else:
                term_lo = min(abs(v - g_lo), abs(v - g_hi))
            term_hi = max(abs(v - g_lo), abs(v - g_hi))
        else:
            exact = abs(v - g(rat(z) if not isinstance(z, AlgebraicReal) else z.as_rational()))
            term_lo = term_hi = exact
        value_low += term_lo
        value_high += term_hi
    classify_err = Fraction(mism, s)
    return PolyReport(
        k=k,
        degree=degree,
        points=s,
        crossings=crossings,
        crossing_limit=crossing_limit,
        crossings_ok=crossings_ok,
        classify_err=classify_err,
        value_low=value_low / s,
        value_high=value_high / s,
        classify_ok=classify_err >= Fraction(1, 4),
        value_ok=value_low / s >= Fraction(1, 8),
    )
