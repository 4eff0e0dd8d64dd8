"""Layered gate networks: the graph type, profile accounting, evaluation,
restriction to an affine line, compilation to a piecewise polynomial, and
the layer-product oscillation bounds.

A network is strictly layered: layer 0 is the input coordinates, and every
node in layer i reads only nodes of layer i-1 (the input is touched only by
layer 1, so depth is meaningful).  Parameters are named slots shared across
the whole network; a gate may carry a default for a slot, and the network's
own parameter map overrides defaults at evaluation/compile time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exact import MPoly, RatLike, rat, rat_str
from .gates import SaGate, SaTerm, gate_eval, gate_from_json, gate_to_json
from .piecewise import PiecewisePoly, pwp_apply_sa_gate

__all__ = [
    "Node",
    "NetworkGraph",
    "NetProfile",
    "LineMap",
    "CrossingBound",
    "profile",
    "net_eval",
    "restrict_line",
    "compile_net",
    "crossing_bound",
    "crossing_bound_dt",
    "crossing_bound_bdt",
    "parse_net",
    "serialize_net",
]


@dataclass(frozen=True)
class Node:
    """One network node: a gate plus parent coordinates (layer, index)."""

    gate: SaGate
    parents: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "parents", tuple((int(a), int(b)) for a, b in self.parents)
        )


@dataclass(frozen=True)
class NetworkGraph:
    """A strictly layered network over ``dim`` input coordinates.

    ``layers[i]`` holds the nodes of layer i+1; the last layer must contain
    exactly the single output node.  ``params`` maps slot names to rational
    values and overrides any per-gate defaults.
    """

    dim: int
    layers: tuple[tuple[Node, ...], ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("input dimension must be positive")
        layers = tuple(tuple(layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers or any(not layer for layer in layers):
            raise ValueError("need at least one nonempty layer")
        if len(layers[-1]) != 1:
            raise ValueError("the last layer must hold exactly the output node")
        object.__setattr__(
            self, "params", {name: rat(v) for name, v in self.params.items()}
        )
        widths = [self.dim] + [len(layer) for layer in layers]
        for i, layer in enumerate(layers, start=1):
            for j, node in enumerate(layer):
                where = f"layer {i} node {j}"
                if len(node.parents) != node.gate.arity:
                    raise ValueError(
                        f"{where}: gate arity {node.gate.arity} but "
                        f"{len(node.parents)} parents"
                    )
                for lyr, idx in node.parents:
                    if lyr != i - 1:
                        raise ValueError(
                            f"{where}: parent in layer {lyr}, expected {i - 1}"
                        )
                    if not 0 <= idx < widths[lyr]:
                        raise ValueError(f"{where}: parent index {idx} out of range")

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def output(self) -> Node:
        return self.layers[-1][0]

    def param_names(self) -> tuple[str, ...]:
        names: set[str] = set()
        for layer in self.layers:
            for node in layer:
                names.update(node.gate.param_names)
        return tuple(sorted(names))


@dataclass(frozen=True)
class NetProfile:
    """Size accounting: ``per_layer`` holds (nodes, preds, pred degree, term
    degree) per layer; ``p`` counts distinct parameter slots."""

    l: int
    m: int
    per_layer: tuple[tuple[int, int, int, int], ...]
    p: int

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "per_layer", tuple(tuple(row) for row in self.per_layer)
        )
        if self.l != len(self.per_layer):
            raise ValueError("layer count disagrees with per-layer rows")
        if self.m != sum(row[0] for row in self.per_layer):
            raise ValueError("total node count disagrees with per-layer rows")

    @property
    def t(self) -> int:
        return max(row[1] for row in self.per_layer)

    @property
    def alpha(self) -> int:
        return max(row[2] for row in self.per_layer)

    @property
    def beta(self) -> int:
        return max(row[3] for row in self.per_layer)


@dataclass(frozen=True)
class LineMap:
    """The affine line z -> a*z + b in R^dim (a is the direction, b a point).

    The axis-aligned section through (0, y2, ..., yd) along the first
    coordinate is ``LineMap.section(y)``.
    """

    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(rat(c) for c in self.a))
        object.__setattr__(self, "b", tuple(rat(c) for c in self.b))
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError("direction and offset must share a positive length")

    @staticmethod
    def section(y: Sequence[RatLike]) -> "LineMap":
        rest = tuple(rat(c) for c in y)
        dim = 1 + len(rest)
        return LineMap((Fraction(1),) + (Fraction(0),) * len(rest), (Fraction(0),) + rest)

    @property
    def dim(self) -> int:
        return len(self.a)

    def at(self, z: RatLike) -> tuple[Fraction, ...]:
        zq = rat(z)
        return tuple(ai * zq + bi for ai, bi in zip(self.a, self.b))


def profile(net: NetworkGraph) -> NetProfile:
    """Exact per-layer size counts and the distinct-parameter count."""
    per_layer = []
    for layer in net.layers:
        per_layer.append(
            (
                len(layer),
                max(node.gate.profile.t for node in layer),
                max(node.gate.profile.alpha for node in layer),
                max(node.gate.profile.beta for node in layer),
            )
        )
    return NetProfile(
        l=len(net.layers),
        m=sum(len(layer) for layer in net.layers),
        per_layer=tuple(per_layer),
        p=len(net.param_names()),
    )


def net_eval(
    net: NetworkGraph,
    x: Sequence[RatLike],
    bindings: Mapping[str, RatLike] | None = None,
) -> Fraction:
    """Topological evaluation at a rational input vector."""
    if len(x) != net.dim:
        raise ValueError(f"expected {net.dim} inputs, got {len(x)}")
    merged: dict[str, Fraction] = dict(net.params)
    if bindings:
        merged.update({name: rat(v) for name, v in bindings.items()})
    prev = [rat(c) for c in x]
    for layer in net.layers:
        prev = [
            gate_eval(node.gate, [prev[idx] for _, idx in node.parents], merged)
            for node in layer
        ]
    return prev[0]


def restrict_line(net: NetworkGraph, line: LineMap) -> NetworkGraph:
    """The univariate network z -> net(a*z + b).

    Only layer 1 changes: each of its gates has the affine coordinate maps
    substituted into every predicate and term polynomial, which preserves
    the gate's (t, alpha, beta) profile.
    """
    if line.dim != net.dim:
        raise ValueError(f"line has dimension {line.dim}, network {net.dim}")
    first = []
    for node in net.layers[0]:
        g = node.gate
        # The gate's v_j names its j-th parent, which may be any coordinate.
        mapping = {
            f"v{j + 1}": MPoly.affine(("v1",), [line.a[idx]], line.b[idx])
            for j, (_, idx) in enumerate(node.parents)
        }
        restricted = SaGate(
            arity=1,
            preds=tuple(q.substitute(mapping) for q in g.preds),
            terms=tuple(
                SaTerm(t.lt, t.ge, t.poly.substitute(mapping)) for t in g.terms
            ),
            params=g.params,
            profile=g.profile,
            tag="sa",
            origin=None,
        )
        first.append(Node(restricted, ((0, 0),)))
    layers = (tuple(first),) + net.layers[1:]
    return NetworkGraph(1, layers, dict(net.params))


def compile_net(
    net: NetworkGraph, bindings: Mapping[str, RatLike] | None = None
) -> PiecewisePoly:
    """Layerwise compilation of a univariate network to its exact
    piecewise-polynomial form; pointwise equal to net_eval."""
    if net.dim != 1:
        raise ValueError("compilation needs a univariate network; restrict first")
    merged: dict[str, Fraction] = dict(net.params)
    if bindings:
        merged.update({name: rat(v) for name, v in bindings.items()})
    prev = [PiecewisePoly.identity()]
    for layer in net.layers:
        prev = [
            pwp_apply_sa_gate(
                node.gate.bind(merged), [prev[idx] for _, idx in node.parents]
            )
            for node in layer
        ]
    return prev[0]


@dataclass(frozen=True)
class CrossingBound:
    """Two oscillation ceilings: the closed-form ``simplified`` value
    2(2tm*alpha/l)^l * beta^(l^2) and the sharper per-layer ``layered``
    product; simplified >= layered always."""

    simplified: Fraction
    layered: Fraction

    def __post_init__(self) -> None:
        if self.layered > self.simplified:
            raise ValueError("per-layer bound exceeded the simplified bound")


def crossing_bound(prof: NetProfile) -> CrossingBound:
    """Ceilings on the crossing number of any line restriction of a network
    with the given profile."""
    for i, (_, _, alpha_i, beta_i) in enumerate(prof.per_layer, start=1):
        if alpha_i < 1 or beta_i < 1:
            raise ValueError(
                f"layer {i}: the bound needs predicate and term degrees >= 1"
            )
    l = prof.l
    simplified = 2 * Fraction(2 * prof.t * prof.m * prof.alpha, l) ** l * (
        Fraction(prof.beta) ** (l * l)
    )

    t_prod = a_prod = Fraction(1)
    b_cum = Fraction(1)  # product of beta_j for j <= i
    c_prev = Fraction(1)  # product of B_j for j <= i-1
    m_prev = Fraction(1)  # product of m_j for j <= i-1
    for i, (m_i, t_i, alpha_i, beta_i) in enumerate(prof.per_layer, start=1):
        t_prod *= t_i
        a_prod *= alpha_i
        if i < l:
            b_cum_i = b_cum * beta_i
            c_prev *= b_cum_i
            m_prev *= m_i
        b_cum *= beta_i
    layered = 2**l * t_prod * a_prod * c_prev * m_prev * (1 + b_cum)
    return CrossingBound(simplified=simplified, layered=layered)


def crossing_bound_dt(nodes: int) -> int:
    """Oscillation ceiling for a decision tree with the given node count."""
    if nodes < 1:
        raise ValueError("a tree has at least one node")
    return nodes


def crossing_bound_bdt(trees: int, nodes: int) -> int:
    """Oscillation ceiling for a weighted sum of ``trees`` trees of at most
    ``nodes`` nodes each."""
    if trees < 1 or nodes < 1:
        raise ValueError("need at least one tree and one node")
    return 2 * trees * nodes


# -- serialization ------------------------------------------------------------


def serialize_net(net: NetworkGraph) -> str:
    doc = {
        "dim": net.dim,
        "params": {name: rat_str(v) for name, v in sorted(net.params.items())},
        "layers": [
            [
                {**gate_to_json(node.gate), "parents": [list(p) for p in node.parents]}
                for node in layer
            ]
            for layer in net.layers
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def parse_net(text: str) -> NetworkGraph:
    """Parse the JSON interchange form; diagnostics carry positions."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(
            f"invalid network document at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ValueError("network document must be an object")
    for key in ("dim", "layers"):
        if key not in doc:
            raise ValueError(f"network document is missing {key!r}")
    layers = []
    for i, layer in enumerate(doc["layers"], start=1):
        nodes = []
        for j, entry in enumerate(layer):
            where = f"layer {i} node {j}"
            if "gate" not in entry:
                raise ValueError(f"{where}: missing gate tag")
            if "parents" not in entry:
                raise ValueError(f"{where}: missing parents")
            try:
                gate = gate_from_json(entry)
            except (KeyError, ValueError, TypeError) as e:
                raise ValueError(f"{where}: {e}") from None
            nodes.append(Node(gate, tuple((p[0], p[1]) for p in entry["parents"])))
        layers.append(tuple(nodes))
    params = {name: rat(v) for name, v in doc.get("params", {}).items()}
    return NetworkGraph(int(doc["dim"]), tuple(layers), params)
