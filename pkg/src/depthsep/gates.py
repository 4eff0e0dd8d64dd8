"""Semi-algebraic gates: indicator-gated polynomial sums and their encoders.

A gate over ``k`` inputs is a finite sum of polynomial terms, each switched on
by a product of sign conditions over shared predicate polynomials:

    value(v) = sum_j  p_j(v) * prod_{i in lt_j} 1[q_i(v) < 0]
                            * prod_{i in ge_j} 1[q_i(v) >= 0].

The size of a gate is summarized by an :class:`SaProfile`: at most ``t``
predicates of degree at most ``alpha`` and term polynomials of degree at most
``beta``.  This module provides the gate type, literal evaluation, and
encoders that express standard computational units in this normal form:
rectifiers, piecewise-polynomial activations, max/min over polynomials,
decision trees, and weighted tree ensembles.

Gates may reference *named parameter slots*: weights given as a name (or a
``(name, value)`` pair) appear symbolically in the gate's polynomials and are
bound to rationals at evaluation or compile time.  Anonymous rational weights
become value-derived slots (name ``c<value>``) so that equal constants shared
across a network are counted once; structural zeros never create a slot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .exact import MPoly, Poly, RatLike, poly_of_mpoly, rat, rat_str
from .partition import Interval, Partition

__all__ = [
    "Wt",
    "SaProfile",
    "SaTerm",
    "SaGate",
    "Leaf",
    "Split",
    "DecisionTree",
    "BoostedTrees",
    "input_names",
    "encode_relu",
    "encode_poly_activation",
    "encode_max",
    "encode_min",
    "encode_dt",
    "encode_bdt",
    "gate_eval",
    "dt_eval",
    "bdt_eval",
    "node_count",
    "gate_to_json",
    "gate_from_json",
    "tree_to_json",
    "tree_from_json",
    "mpoly_to_json",
    "mpoly_from_json",
    "wt_to_json",
    "wt_from_json",
]

# A weight: a plain rational (anonymous, named after its value), a bare slot
# name (unbound), or an explicit (name, value) pair.
Wt = Union[RatLike, str, tuple]

_INPUT_NAME = re.compile(r"v[0-9]+\Z")


def input_names(arity: int) -> tuple[str, ...]:
    """Variable names for the inputs of an arity-``arity`` gate."""
    return tuple(f"v{i + 1}" for i in range(arity))


def _rs(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class SaProfile:
    """Declared size bounds: ``t`` predicates of degree <= ``alpha``, ``m``
    terms of degree <= ``beta``.  ``m`` is informational and not part of the
    (t, alpha, beta) name."""

    t: int
    alpha: int
    beta: int
    m: int

    def __post_init__(self) -> None:
        if self.t < 0 or self.alpha < 0 or self.beta < 0 or self.m < 0:
            raise ValueError("profile entries must be nonnegative")


@dataclass(frozen=True)
class SaTerm:
    """One gated term: ``poly`` fires when all ``lt`` predicates are negative
    and all ``ge`` predicates are nonnegative (indices into the gate's
    predicate list)."""

    lt: tuple[int, ...]
    ge: tuple[int, ...]
    poly: MPoly

    def __post_init__(self) -> None:
        object.__setattr__(self, "lt", tuple(sorted(int(i) for i in self.lt)))
        object.__setattr__(self, "ge", tuple(sorted(int(i) for i in self.ge)))


@dataclass(frozen=True)
class SaGate:
    """A semi-algebraic gate.

    ``params`` lists named parameter slots as (name, default) pairs, where a
    ``None`` default marks a slot that must be bound before evaluation.  The
    predicate and term polynomials range over the input variables ``v1``,
    ``v2``, ... plus the slot names.
    """

    arity: int
    preds: tuple[MPoly, ...]
    terms: tuple[SaTerm, ...]
    params: tuple[tuple[str, Fraction | None], ...]
    profile: SaProfile
    tag: str = "sa"
    origin: dict | None = None

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise ValueError("arity must be nonnegative")
        object.__setattr__(self, "preds", tuple(self.preds))
        object.__setattr__(self, "terms", tuple(self.terms))
        params = tuple(
            (name, None if value is None else rat(value))
            for name, value in self.params
        )
        object.__setattr__(self, "params", params)
        names = [name for name, _ in params]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names")
        for name in names:
            if _INPUT_NAME.match(name):
                raise ValueError(f"parameter name {name!r} collides with input variables")
        allowed = set(self.input_vars) | set(names)
        inputs = set(self.input_vars)
        for q in self.preds:
            if not q.used_variables() <= allowed:
                raise ValueError(f"predicate uses unknown variables {sorted(q.used_variables() - allowed)}")
            if q.degree_in(inputs) > self.profile.alpha:
                raise ValueError("predicate degree exceeds profile alpha")
        if len(self.preds) > self.profile.t:
            raise ValueError("predicate count exceeds profile t")
        if len(self.terms) > self.profile.m:
            raise ValueError("term count exceeds profile m")
        for term in self.terms:
            if not term.poly.used_variables() <= allowed:
                raise ValueError("term uses unknown variables")
            if term.poly.degree_in(inputs) > self.profile.beta:
                raise ValueError("term degree exceeds profile beta")
            for i in term.lt + term.ge:
                if not 0 <= i < len(self.preds):
                    raise ValueError("term references a predicate out of range")

    @property
    def input_vars(self) -> tuple[str, ...]:
        return input_names(self.arity)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.params)

    def param_values(
        self, bindings: Mapping[str, RatLike] | None = None
    ) -> dict[str, Fraction]:
        """Merged slot values (bindings override defaults); error if any slot
        remains unbound."""
        out: dict[str, Fraction] = {}
        unbound: list[str] = []
        for name, default in self.params:
            if bindings is not None and name in bindings:
                out[name] = rat(bindings[name])
            elif default is not None:
                out[name] = default
            else:
                unbound.append(name)
        if unbound:
            raise ValueError(f"unbound parameters: {', '.join(unbound)}")
        return out

    def bind(self, bindings: Mapping[str, RatLike] | None = None) -> "SaGate":
        """Substitute all parameter slots, leaving polynomials over inputs only."""
        if not self.params:
            return self
        values = self.param_values(bindings)
        return SaGate(
            arity=self.arity,
            preds=tuple(q.bind(values) for q in self.preds),
            terms=tuple(
                SaTerm(t.lt, t.ge, t.poly.bind(values)) for t in self.terms
            ),
            params=(),
            profile=self.profile,
            tag=self.tag,
            origin=None,
        )


def gate_eval(
    gate: SaGate,
    v: Sequence[RatLike],
    bindings: Mapping[str, RatLike] | None = None,
) -> Fraction:
    """Evaluate the literal defining sum at a rational input vector."""
    if len(v) != gate.arity:
        raise ValueError(f"expected {gate.arity} inputs, got {len(v)}")
    env = {name: rat(x) for name, x in zip(gate.input_vars, v)}
    env.update(gate.param_values(bindings))
    pred_signs = [q.eval(env) for q in gate.preds]
    total = Fraction(0)
    for term in gate.terms:
        if all(pred_signs[i] < 0 for i in term.lt) and all(
            pred_signs[i] >= 0 for i in term.ge
        ):
            total += term.poly.eval(env)
    return total


# -- weight slots --------------------------------------------------------------


def _slot_of(w: Wt, slots: dict[str, Fraction | None]) -> tuple[str, Fraction | None] | None:
    """Register the slot behind a weight; None for a structural zero."""
    if isinstance(w, str):
        name, value = w, None
    elif isinstance(w, tuple):
        name, value = w[0], rat(w[1])
    else:
        value = rat(w)
        if value == 0:
            return None
        name = f"c{rat_str(value)}"
    if name in slots:
        old = slots[name]
        if old is not None and value is not None and old != value:
            raise ValueError(f"parameter {name!r} given two values: {old} and {value}")
        if old is None:
            slots[name] = value
    else:
        slots[name] = value
    return name, slots[name]


def _affine_of_weights(
    a: Sequence[Wt], b: Wt, inputs: Sequence[str], slots: dict[str, Fraction | None]
) -> MPoly:
    """The symbolic affine form  sum_i a_i * v_i + b  with slots registered."""
    acc = MPoly.const(0, tuple(inputs))
    for name_v, w in zip(inputs, a):
        slot = _slot_of(w, slots)
        if slot is None:
            continue
        acc = acc + MPoly.var(slot[0]) * MPoly.var(name_v)
    slot = _slot_of(b, slots)
    if slot is not None:
        acc = acc + MPoly.var(slot[0])
    return acc


# -- encoders --------------------------------------------------------------------


def encode_relu(a: Sequence[Wt], b: Wt = 0) -> SaGate:
    """The rectifier of an affine form: max(0, <a, v> + b).

    One predicate q = <a, v> + b and one term 1[q >= 0] * q.
    """
    slots: dict[str, Fraction | None] = {}
    arity = len(a)
    q = _affine_of_weights(a, b, input_names(arity), slots)
    return SaGate(
        arity=arity,
        preds=(q,),
        terms=(SaTerm((), (0,), q),),
        params=tuple(sorted(slots.items())),
        profile=SaProfile(1, 1, 1, 1),
        tag="relu",
        origin={"a": [wt_to_json(w) for w in a], "b": wt_to_json(b)},
    )


def encode_poly_activation(
    sigma: Sequence[tuple[Interval, Poly]], q: MPoly, arity: int | None = None
) -> SaGate:
    """A piecewise-polynomial activation applied to a polynomial of the inputs.

    ``sigma`` lists (interval, polynomial) pieces, ascending, tiling the whole
    line; the gate computes sigma(q(v)).  Each breakpoint contributes one
    predicate, oriented by which side owns the point: q - b when the point
    belongs to the right piece, b - q when it belongs to the left.  Membership
    of piece i is the conjunction of its two boundary conditions, so the term
    list mirrors the pieces one-to-one.
    """
    pieces = tuple(iv for iv, _ in sigma)
    polys = tuple(p for _, p in sigma)
    part = Partition(pieces)  # raises if the intervals do not tile R
    if arity is None:
        indices = [int(v[1:]) for v in q.used_variables() if _INPUT_NAME.match(v)]
        arity = max(indices, default=1)
    names = set(input_names(arity))
    if not q.used_variables() <= names:
        raise ValueError("inner polynomial uses variables beyond the declared inputs")

    preds: list[MPoly] = []
    # conditions[i] collects (kind, predicate index) pairs for piece i
    conditions: list[list[tuple[str, int]]] = [[] for _ in pieces]
    for j, (left, right) in enumerate(zip(pieces, pieces[1:])):
        assert left.hi is not None
        if not isinstance(left.hi, Fraction):
            raise ValueError("activation breakpoints must be rational")
        b = MPoly.const(left.hi, q.variables)
        if left.hi_closed:
            preds.append(b - q)  # q <= b holds on the left piece
            conditions[j].append(("ge", len(preds) - 1))
            conditions[j + 1].append(("lt", len(preds) - 1))
        else:
            preds.append(q - b)  # q >= b holds on the right piece
            conditions[j].append(("lt", len(preds) - 1))
            conditions[j + 1].append(("ge", len(preds) - 1))

    terms = []
    for i, p in enumerate(polys):
        lt = tuple(idx for kind, idx in conditions[i] if kind == "lt")
        ge = tuple(idx for kind, idx in conditions[i] if kind == "ge")
        terms.append(SaTerm(lt, ge, poly_of_mpoly(p, q)))

    alpha = q.degree_in(names)
    beta = alpha * max((max(p.degree, 0) for p in polys), default=0)
    return SaGate(
        arity=arity,
        preds=tuple(preds),
        terms=tuple(terms),
        params=(),
        profile=SaProfile(len(pieces), alpha, beta, len(pieces)),
        tag="polyact",
        origin={
            "pieces": [iv.to_json() for iv in pieces],
            "polys": [[_rs(c) for c in p.coeffs] for p in polys],
            "q": mpoly_to_json(q),
            "arity": arity,
        },
    )


def _max_like(ps: Sequence[MPoly], arity: int | None, negate: bool, tag: str) -> SaGate:
    if not ps:
        raise ValueError("need at least one polynomial")
    r = len(ps)
    used = set().union(*(p.used_variables() for p in ps))
    if arity is None:
        indices = [int(v[1:]) for v in used if _INPUT_NAME.match(v)]
        arity = max(indices, default=1)
    names = set(input_names(arity))
    if not used <= names:
        raise ValueError("polynomials use variables beyond the declared inputs")
    inner = [(-p if negate else p) for p in ps]

    # Term i fires when inner_i beats all earlier strictly and all later
    # non-strictly; at ties the first maximizer's term is the one that fires.
    preds: list[MPoly] = []
    terms: list[SaTerm] = []
    for i in range(r):
        lt: list[int] = []
        ge: list[int] = []
        for j in range(r):
            if j == i:
                continue
            if j < i:
                preds.append(inner[j] - inner[i])  # want inner_i > inner_j
                lt.append(len(preds) - 1)
            else:
                preds.append(inner[i] - inner[j])  # want inner_i >= inner_j
                ge.append(len(preds) - 1)
        terms.append(SaTerm(tuple(lt), tuple(ge), -inner[i] if negate else inner[i]))

    alpha = max((p.degree_in(names) for p in ps), default=0)
    return SaGate(
        arity=arity,
        preds=tuple(preds),
        terms=tuple(terms),
        params=(),
        profile=SaProfile(r * (r - 1), alpha, alpha, r),
        tag=tag,
        origin={"ps": [mpoly_to_json(p) for p in ps], "arity": arity},
    )


def encode_max(ps: Sequence[MPoly], arity: int | None = None) -> SaGate:
    """Pointwise maximum of polynomials, via ordered strict/non-strict splits."""
    return _max_like(ps, arity, negate=False, tag="max")


def encode_min(ps: Sequence[MPoly], arity: int | None = None) -> SaGate:
    """Pointwise minimum, encoded as the negated maximum of the negations."""
    return _max_like(ps, arity, negate=True, tag="min")


# -- decision trees ----------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", rat(self.value))


@dataclass(frozen=True)
class Split:
    a: tuple[Fraction, ...]
    b: Fraction
    left: "DecisionTree"
    right: "DecisionTree"

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(rat(c) for c in self.a))
        object.__setattr__(self, "b", rat(self.b))


DecisionTree = Union[Leaf, Split]


def node_count(tree: DecisionTree) -> int:
    if isinstance(tree, Leaf):
        return 1
    return 1 + node_count(tree.left) + node_count(tree.right)


def dt_eval(tree: DecisionTree, x: Sequence[RatLike]) -> Fraction:
    """Walk the tree: left branch when <a,x> - b < 0, right when >= 0."""
    xs = [rat(c) for c in x]
    while isinstance(tree, Split):
        gap = sum((c * v for c, v in zip(tree.a, xs)), Fraction(0)) - tree.b
        tree = tree.left if gap < 0 else tree.right
    return tree.value


@dataclass(frozen=True)
class BoostedTrees:
    """A weighted sum of decision trees."""

    weights: tuple[Fraction, ...]
    trees: tuple[DecisionTree, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(rat(w) for w in self.weights))
        object.__setattr__(self, "trees", tuple(self.trees))
        if len(self.weights) != len(self.trees):
            raise ValueError("one weight per tree")
        if not self.trees:
            raise ValueError("need at least one tree")

    @property
    def node_budget(self) -> int:
        return sum(node_count(t) for t in self.trees)


def bdt_eval(bt: BoostedTrees, x: Sequence[RatLike]) -> Fraction:
    return sum(
        (w * dt_eval(t, x) for w, t in zip(bt.weights, bt.trees)), Fraction(0)
    )


def _tree_terms(
    tree: DecisionTree,
    arity: int,
    preds: list[MPoly],
    lt: tuple[int, ...],
    ge: tuple[int, ...],
    out: list[SaTerm],
    scale: Fraction,
) -> None:
    if isinstance(tree, Leaf):
        out.append(SaTerm(lt, ge, MPoly.const(scale * tree.value, input_names(arity))))
        return
    if len(tree.a) != arity:
        raise ValueError("split vector length does not match tree arity")
    preds.append(MPoly.affine(input_names(arity), tree.a, -tree.b))
    idx = len(preds) - 1
    _tree_terms(tree.left, arity, preds, lt + (idx,), ge, out, scale)
    _tree_terms(tree.right, arity, preds, lt, ge + (idx,), out, scale)


def _tree_arity(tree: DecisionTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return max(len(tree.a), _tree_arity(tree.left), _tree_arity(tree.right))


def encode_dt(tree: DecisionTree, arity: int | None = None) -> SaGate:
    """A decision tree with k nodes as a (k, 1, 0) gate.

    Each root-to-leaf path contributes one constant term gated by the strict
    (left) and non-strict (right) split conditions along the path.
    """
    if arity is None:
        arity = max(_tree_arity(tree), 1)
    preds: list[MPoly] = []
    terms: list[SaTerm] = []
    _tree_terms(tree, arity, preds, (), (), terms, Fraction(1))
    k = node_count(tree)
    return SaGate(
        arity=arity,
        preds=tuple(preds),
        terms=tuple(terms),
        params=(),
        profile=SaProfile(k, 1, 0, len(terms)),
        tag="dt",
        origin={"tree": tree_to_json(tree), "arity": arity},
    )


def encode_bdt(bt: BoostedTrees, arity: int | None = None) -> SaGate:
    """A weighted tree ensemble as a single gate; leaf terms carry the weights."""
    if arity is None:
        arity = max(max(_tree_arity(t) for t in bt.trees), 1)
    preds: list[MPoly] = []
    terms: list[SaTerm] = []
    for w, tree in zip(bt.weights, bt.trees):
        _tree_terms(tree, arity, preds, (), (), terms, w)
    budget = bt.node_budget
    return SaGate(
        arity=arity,
        preds=tuple(preds),
        terms=tuple(terms),
        params=(),
        profile=SaProfile(budget, 1, 0, len(terms)),
        tag="bdt",
        origin={
            "weights": [_rs(w) for w in bt.weights],
            "trees": [tree_to_json(t) for t in bt.trees],
            "arity": arity,
        },
    )


# -- serialization -------------------------------------------------------------------


def wt_to_json(w: Wt) -> object:
    if isinstance(w, str):
        return {"name": w}
    if isinstance(w, tuple):
        return {"name": w[0], "value": _rs(rat(w[1]))}
    return _rs(rat(w))


def wt_from_json(obj: object) -> Wt:
    if isinstance(obj, dict):
        if "value" in obj:
            return (obj["name"], rat(obj["value"]))
        return obj["name"]
    return rat(obj)  # type: ignore[arg-type]


def mpoly_to_json(p: MPoly) -> dict:
    return {
        "vars": list(p.variables),
        "terms": [[list(e), _rs(c)] for e, c in p.terms],
    }


def mpoly_from_json(obj: dict) -> MPoly:
    return MPoly(
        tuple(obj["vars"]),
        tuple((tuple(e), rat(c)) for e, c in obj["terms"]),
    )


def tree_to_json(tree: DecisionTree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": _rs(tree.value)}
    return {
        "a": [_rs(c) for c in tree.a],
        "b": _rs(tree.b),
        "left": tree_to_json(tree.left),
        "right": tree_to_json(tree.right),
    }


def tree_from_json(obj: dict) -> DecisionTree:
    if "leaf" in obj:
        return Leaf(rat(obj["leaf"]))
    return Split(
        tuple(rat(c) for c in obj["a"]),
        rat(obj["b"]),
        tree_from_json(obj["left"]),
        tree_from_json(obj["right"]),
    )


def gate_to_json(gate: SaGate) -> dict:
    if gate.origin is not None:
        return {"gate": gate.tag, **gate.origin}
    return {
        "gate": "sa",
        "arity": gate.arity,
        "preds": [mpoly_to_json(q) for q in gate.preds],
        "terms": [
            {"lt": list(t.lt), "ge": list(t.ge), "poly": mpoly_to_json(t.poly)}
            for t in gate.terms
        ],
        "params": {
            name: (None if v is None else _rs(v)) for name, v in gate.params
        },
        "profile": {
            "t": gate.profile.t,
            "alpha": gate.profile.alpha,
            "beta": gate.profile.beta,
            "m": gate.profile.m,
        },
    }


def gate_from_json(obj: dict) -> SaGate:
    tag = obj["gate"]
    if tag == "relu":
        return encode_relu([wt_from_json(w) for w in obj["a"]], wt_from_json(obj["b"]))
    if tag in ("max", "min"):
        ps = [mpoly_from_json(p) for p in obj["ps"]]
        enc = encode_max if tag == "max" else encode_min
        return enc(ps, arity=obj.get("arity"))
    if tag == "polyact":
        pieces = [Interval.from_json(iv) for iv in obj["pieces"]]
        polys = [Poly.of(*(rat(c) for c in cs)) for cs in obj["polys"]]
        return encode_poly_activation(
            list(zip(pieces, polys)), mpoly_from_json(obj["q"]), arity=obj.get("arity")
        )
    if tag == "dt":
        return encode_dt(tree_from_json(obj["tree"]), arity=obj.get("arity"))
    if tag == "bdt":
        bt = BoostedTrees(
            tuple(rat(w) for w in obj["weights"]),
            tuple(tree_from_json(t) for t in obj["trees"]),
        )
        return encode_bdt(bt, arity=obj.get("arity"))
    if tag == "sa":
        prof = obj["profile"]
        return SaGate(
            arity=obj["arity"],
            preds=tuple(mpoly_from_json(q) for q in obj["preds"]),
            terms=tuple(
                SaTerm(tuple(t["lt"]), tuple(t["ge"]), mpoly_from_json(t["poly"]))
                for t in obj["terms"]
            ),
            params=tuple(
                sorted(
                    (name, None if v is None else rat(v))
                    for name, v in obj["params"].items()
                )
            ),
            profile=SaProfile(prof["t"], prof["alpha"], prof["beta"], prof["m"]),
        )
    raise ValueError(f"unknown gate tag {tag!r}")
