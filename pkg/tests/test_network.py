"""Tests for layered networks: evaluation, restriction, compilation, bounds.

The compiler is audited against direct topological evaluation — two
independent routes through every randomly generated net — and the
oscillation ceilings are checked against exactly computed crossing numbers.
"""

from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from depthsep.exact import MPoly, Poly
from depthsep.gates import (
    Leaf,
    Split,
    encode_dt,
    encode_max,
    encode_min,
    encode_poly_activation,
    encode_relu,
    input_names,
)
from depthsep.network import (
    CrossingBound,
    LineMap,
    NetProfile,
    NetworkGraph,
    Node,
    compile_net,
    crossing_bound,
    crossing_bound_bdt,
    crossing_bound_dt,
    net_eval,
    parse_net,
    profile,
    restrict_line,
    serialize_net,
)
from depthsep.partition import Interval
from depthsep.piecewise import crossing_number, pwp_eval

# ---------------------------------------------------------------------------
# fixtures and generators
# ---------------------------------------------------------------------------


def triangle_net() -> NetworkGraph:
    return NetworkGraph(
        1,
        (
            (
                Node(encode_relu([1]), ((0, 0),)),
                Node(encode_relu([1], F(-1, 2)), ((0, 0),)),
            ),
            (Node(encode_relu([2, -4]), ((1, 0), (1, 1))),),
        ),
    )


def _rand_frac(rng, span=6, den=4) -> F:
    return F(rng.randint(-span, span), rng.randint(1, den))


def _rand_gate(rng, arity, kinds=("relu", "max", "min", "polyact", "dt")):
    kind = rng.choice(kinds)
    if kind == "relu":
        return encode_relu([_rand_frac(rng) for _ in range(arity)], _rand_frac(rng))
    if kind in ("max", "min"):
        ps = [
            MPoly.affine(
                input_names(arity),
                [_rand_frac(rng, 3) for _ in range(arity)],
                _rand_frac(rng, 3),
            )
            for _ in range(rng.randint(1, 3))
        ]
        return (encode_max if kind == "max" else encode_min)(ps, arity=arity)
    if kind == "polyact":
        cut = _rand_frac(rng, 2)
        pieces = [
            (Interval(None, cut, False, False), Poly.of(_rand_frac(rng, 2))),
            (
                Interval(cut, None, True, False),
                Poly.of(*[_rand_frac(rng, 2) for _ in range(rng.randint(1, 2))]),
            ),
        ]
        q = MPoly.affine(
            input_names(arity),
            [_rand_frac(rng, 2) for _ in range(arity)],
            _rand_frac(rng, 2),
        )
        return encode_poly_activation(pieces, q, arity=arity)
    tree = Split(
        tuple(_rand_frac(rng, 2) for _ in range(arity)),
        _rand_frac(rng, 2),
        Leaf(_rand_frac(rng)),
        Leaf(_rand_frac(rng)),
    )
    return encode_dt(tree, arity=arity)


def _rand_net(rng, kinds=("relu", "max", "min", "polyact", "dt")) -> NetworkGraph:
    dim = rng.randint(1, 2)
    depth = rng.randint(1, 3)
    widths = [rng.randint(1, 3) for _ in range(depth - 1)] + [1]
    layers = []
    prev_width = dim
    for i, width in enumerate(widths, start=1):
        nodes = []
        for _ in range(width):
            arity = rng.randint(1, prev_width)
            parents = tuple(
                (i - 1, rng.randrange(prev_width)) for _ in range(arity)
            )
            nodes.append(Node(_rand_gate(rng, arity, kinds), parents))
        layers.append(tuple(nodes))
        prev_width = width
    return NetworkGraph(dim, tuple(layers))


# ---------------------------------------------------------------------------
# evaluation and profile
# ---------------------------------------------------------------------------


def test_triangle_net_values():
    tri = triangle_net()
    assert net_eval(tri, [F(1, 2)]) == 1
    assert net_eval(tri, [-1]) == 0
    assert net_eval(tri, [F(3, 4)]) == F(1, 2)


def test_single_relu_profile():
    net = NetworkGraph(1, ((Node(encode_relu([1]), ((0, 0),)),),))
    prof = profile(net)
    assert prof.l == 1 and prof.m == 1
    assert prof.per_layer == ((1, 1, 1, 1),)
    assert prof.p == 1


def test_triangle_profile_counts_distinct_parameters():
    prof = profile(triangle_net())
    assert prof.l == 2 and prof.m == 3
    assert prof.p == 4  # slots for the values 1, -1/2, 2, -4


def test_shared_named_slots_count_once():
    net = NetworkGraph(
        1,
        (
            (
                Node(encode_relu(["w"]), ((0, 0),)),
                Node(encode_relu(["w"], ("b", 0)), ((0, 0),)),
            ),
            (Node(encode_relu([1, 1]), ((1, 0), (1, 1))),),
        ),
        {"w": 2},
    )
    assert profile(net).p == 3  # w, b, c1
    assert net_eval(net, [1]) == 4


def test_net_eval_error_cases():
    tri = triangle_net()
    with pytest.raises(ValueError, match="inputs"):
        net_eval(tri, [1, 2])
    unbound = NetworkGraph(1, ((Node(encode_relu(["w"]), ((0, 0),)),),))
    with pytest.raises(ValueError, match="unbound"):
        net_eval(unbound, [1])
    assert net_eval(unbound, [3], {"w": 2}) == 6


def test_graph_validation():
    with pytest.raises(ValueError, match="out of range"):
        NetworkGraph(1, ((Node(encode_relu([1]), ((0, 1),)),),))
    with pytest.raises(ValueError, match="expected 1"):
        NetworkGraph(
            1,
            (
                (Node(encode_relu([1]), ((0, 0),)),),
                (Node(encode_relu([1]), ((0, 0),)),),
            ),
        )
    with pytest.raises(ValueError, match="output"):
        NetworkGraph(
            1,
            (
                (
                    Node(encode_relu([1]), ((0, 0),)),
                    Node(encode_relu([1]), ((0, 0),)),
                ),
            ),
        )
    with pytest.raises(ValueError, match="arity"):
        NetworkGraph(1, ((Node(encode_relu([1, 1]), ((0, 0),)),),))


# ---------------------------------------------------------------------------
# restriction to a line
# ---------------------------------------------------------------------------


def test_restrict_affine_substitution():
    net = NetworkGraph(2, ((Node(encode_relu([1, 1]), ((0, 0), (0, 1))),),))
    restricted = restrict_line(net, LineMap((1, 0), (0, 3)))
    assert restricted.dim == 1
    for z in (-5, -3, 0, F(7, 2)):
        assert net_eval(restricted, [z]) == max(0, z + 3)


def test_restrict_drops_second_coordinate_on_axis_section():
    rng = random.Random(11)
    net = NetworkGraph(
        2,
        (
            (
                Node(encode_relu([1, 0], F(1, 3)), ((0, 0), (0, 1))),
                Node(encode_relu([-2, 0]), ((0, 0), (0, 1))),
            ),
            (Node(encode_relu([1, 1]), ((1, 0), (1, 1))),),
        ),
    )
    restricted = restrict_line(net, LineMap.section([0]))
    for _ in range(20):
        z = _rand_frac(rng)
        assert net_eval(restricted, [z]) == net_eval(net, [z, 0])


def test_restrict_preserves_profiles_and_checks_dimension():
    net = NetworkGraph(2, ((Node(encode_relu([1, 1]), ((0, 0), (0, 1))),),))
    restricted = restrict_line(net, LineMap((1, 1), (0, 0)))
    assert profile(restricted).per_layer == profile(net).per_layer
    with pytest.raises(ValueError, match="dimension"):
        restrict_line(net, LineMap((1,), (0,)))


def test_restrict_naturality_on_random_nets():
    rng = random.Random(12)
    for _ in range(40):
        net = _rand_net(rng)
        if net.dim == 1:
            continue
        line = LineMap(
            tuple(_rand_frac(rng, 2) for _ in range(net.dim)),
            tuple(_rand_frac(rng, 2) for _ in range(net.dim)),
        )
        restricted = restrict_line(net, line)
        compiled = compile_net(restricted)
        for _ in range(5):
            z = _rand_frac(rng)
            want = net_eval(net, list(line.at(z)))
            assert net_eval(restricted, [z]) == want
            assert pwp_eval(compiled, z) == want


# ---------------------------------------------------------------------------
# compilation
# ---------------------------------------------------------------------------


def test_compile_single_relu():
    net = NetworkGraph(1, ((Node(encode_relu([1]), ((0, 0),)),),))
    f = compile_net(net)
    assert f.piece_count == 2
    assert pwp_eval(f, -1) == 0 and pwp_eval(f, 2) == 2


def test_compile_triangle_slopes():
    f = compile_net(triangle_net())
    assert f.piece_count == 4
    slopes = [p.coeffs[1] if p.degree >= 1 else F(0) for p in f.polys]
    assert slopes == [0, 2, -2, 0]


def test_compile_requires_univariate_and_bound_params():
    two = NetworkGraph(2, ((Node(encode_relu([1, 1]), ((0, 0), (0, 1))),),))
    with pytest.raises(ValueError, match="univariate"):
        compile_net(two)
    unbound = NetworkGraph(1, ((Node(encode_relu(["w"]), ((0, 0),)),),))
    with pytest.raises(ValueError, match="unbound"):
        compile_net(unbound)
    assert pwp_eval(compile_net(unbound, {"w": -1}), -2) == 2


def test_compiler_faithful_300_random_nets():
    rng = random.Random(13)
    for _ in range(300):
        net = _rand_net(rng)
        uni = net if net.dim == 1 else restrict_line(
            net,
            LineMap(
                tuple(_rand_frac(rng, 2) for _ in range(net.dim)),
                tuple(_rand_frac(rng, 2) for _ in range(net.dim)),
            ),
        )
        compiled = compile_net(uni)
        for _ in range(10):
            z = _rand_frac(rng)
            assert pwp_eval(compiled, z) == net_eval(uni, [z])


def _nonzero_frac(rng, span=3, den=4) -> F:
    while True:
        q = _rand_frac(rng, span, den)
        if q != 0:
            return q


def _rand_bound_gate(rng, arity):
    """Like _rand_gate, but steered toward gates whose declared profile has
    t, alpha, beta >= 1, where the oscillation ceilings apply."""
    kind = rng.choice(("relu", "max", "min", "polyact"))
    if kind == "relu":
        return encode_relu([_rand_frac(rng) for _ in range(arity)], _rand_frac(rng))
    if kind in ("max", "min"):
        ps = [
            MPoly.affine(
                input_names(arity),
                [_nonzero_frac(rng)] + [_rand_frac(rng, 3) for _ in range(arity - 1)],
                _rand_frac(rng, 3),
            )
            for _ in range(rng.randint(2, 3))
        ]
        return (encode_max if kind == "max" else encode_min)(ps, arity=arity)
    cut = _rand_frac(rng, 2)
    pieces = [
        (Interval(None, cut, False, False), Poly.of(_rand_frac(rng, 2))),
        (
            Interval(cut, None, True, False),
            Poly.of(_rand_frac(rng, 2), _nonzero_frac(rng)),
        ),
    ]
    q = MPoly.affine(
        input_names(arity),
        [_nonzero_frac(rng)] + [_rand_frac(rng, 2) for _ in range(arity - 1)],
        _rand_frac(rng, 2),
    )
    return encode_poly_activation(pieces, q, arity=arity)


def test_crossing_bounds_sound_on_random_nets():
    rng = random.Random(14)
    checked = 0
    for _ in range(120):
        dim = rng.randint(1, 2)
        depth = rng.randint(1, 3)
        widths = [rng.randint(1, 3) for _ in range(depth - 1)] + [1]
        layers = []
        prev_width = dim
        for i, width in enumerate(widths, start=1):
            nodes = []
            for _ in range(width):
                arity = rng.randint(1, prev_width)
                parents = tuple(
                    (i - 1, rng.randrange(prev_width)) for _ in range(arity)
                )
                nodes.append(Node(_rand_bound_gate(rng, arity), parents))
            layers.append(tuple(nodes))
            prev_width = width
        net = NetworkGraph(dim, tuple(layers))
        prof = profile(net)
        if any(row[1] < 1 or row[2] < 1 or row[3] < 1 for row in prof.per_layer):
            continue  # the ceilings only cover gates with predicates
        uni = net if net.dim == 1 else restrict_line(
            net, LineMap.section([_rand_frac(rng, 2) for _ in range(net.dim - 1)])
        )
        cb = crossing_bound(prof)
        assert cb.layered <= cb.simplified
        assert crossing_number(compile_net(uni)) <= cb.layered
        checked += 1
    assert checked >= 100  # the applicability filter must not hollow the audit out


# ---------------------------------------------------------------------------
# crossing bound arithmetic
# ---------------------------------------------------------------------------


def test_bound_worked_examples():
    one = NetProfile(1, 1, ((1, 1, 1, 1),), 1)
    assert crossing_bound(one) == CrossingBound(F(4), F(4))
    flat = NetProfile(2, 4, ((3, 1, 1, 1), (1, 1, 1, 1)), 0)
    assert crossing_bound(flat).simplified == 32
    assert crossing_bound_dt(5) == 5
    assert crossing_bound_bdt(3, 5) == 30


def test_bound_rejects_degenerate_degrees():
    with pytest.raises(ValueError, match="degrees"):
        crossing_bound(NetProfile(1, 1, ((1, 1, 0, 1),), 0))
    with pytest.raises(ValueError, match="degrees"):
        crossing_bound(NetProfile(1, 1, ((1, 1, 1, 0),), 0))
    with pytest.raises(ValueError):
        crossing_bound_dt(0)
    with pytest.raises(ValueError):
        crossing_bound_bdt(0, 3)


def test_profile_validation():
    with pytest.raises(ValueError, match="node count"):
        NetProfile(1, 2, ((1, 1, 1, 1),), 0)
    with pytest.raises(ValueError, match="rows"):
        NetProfile(2, 1, ((1, 1, 1, 1),), 0)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_round_trip_is_canonical():
    tri = triangle_net()
    text = serialize_net(tri)
    back = parse_net(text)
    assert serialize_net(back) == text
    assert profile(back) == profile(tri)
    for z in (-1, 0, F(1, 4), F(1, 2), 1):
        assert net_eval(back, [z]) == net_eval(tri, [z])


def test_minimal_document_parses():
    text = '{"dim": 1, "layers": [[{"gate": "relu", "a": ["1"], "b": "0", "parents": [[0, 0]]}]]}'
    net = parse_net(text)
    assert net.dim == 1 and net.depth == 1
    assert net_eval(net, [4]) == 4


def test_round_trip_preserves_named_params():
    net = NetworkGraph(
        1,
        ((Node(encode_relu(["w"], ("b", F(1, 2))), ((0, 0),)),),),
        {"w": F(-3, 2)},
    )
    back = parse_net(serialize_net(net))
    assert back.params == {"w": F(-3, 2)}
    assert profile(back).p == 2
    assert net_eval(back, [1]) == net_eval(net, [1])


def test_parse_diagnostics_carry_positions():
    with pytest.raises(ValueError, match="line 1 column"):
        parse_net("{nope")
    with pytest.raises(ValueError, match="layer 1 node 0"):
        parse_net('{"dim": 1, "layers": [[{"parents": []}]]}')
    with pytest.raises(ValueError, match="missing"):
        parse_net('{"layers": []}')


def test_restricted_nets_serialize_as_raw_gates():
    net = NetworkGraph(2, ((Node(encode_relu([1, 1]), ((0, 0), (0, 1))),),))
    restricted = restrict_line(net, LineMap((1, 0), (0, 3)))
    back = parse_net(serialize_net(restricted))
    assert net_eval(back, [2]) == 5
