"""Tests for the piecewise-polynomial calculus.

Expected values come from hand-worked compositions of the tent map, direct
evaluation at concrete points, float quadrature for integrals with
irrational split points, and counting arguments done on paper.  Gate
application is always cross-checked against direct gate evaluation at
sample points — two independent routes to the same number.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction as F

import pytest

from depthsep.exact import AlgebraicReal, MPoly, Poly
from depthsep.gates import (
    BoostedTrees,
    Leaf,
    SaGate,
    SaProfile,
    SaTerm,
    Split,
    encode_bdt,
    encode_dt,
    encode_relu,
    gate_eval,
    input_names,
)
from depthsep.partition import Interval, Partition
from depthsep.piecewise import (
    CrossingReport,
    PiecewisePoly,
    classifier,
    crossing_number,
    disagreement,
    l1_distance,
    merge_equal,
    pwp_apply_sa_gate,
    pwp_compose_poly,
    pwp_eval,
    pwp_linear,
)

# ---------------------------------------------------------------------------
# shared fixtures: the tent map built through the gate pipeline
# ---------------------------------------------------------------------------

IDENT = PiecewisePoly.identity()
TRI_OUT = encode_relu([2, -4])


def _relu_of(f: PiecewisePoly, shift: F = F(0)) -> PiecewisePoly:
    return pwp_apply_sa_gate(encode_relu([1], -shift), [f])


def tent(k: int) -> PiecewisePoly:
    """k-fold self-composition of the two-layer tent, via gate application."""
    cur = IDENT
    for _ in range(k):
        cur = pwp_apply_sa_gate(TRI_OUT, [_relu_of(cur), _relu_of(cur, F(1, 2))])
    return cur


TENT1 = tent(1)


def _rand_frac(rng, span=8, den=6) -> F:
    return F(rng.randint(-span, span), rng.randint(1, den))


def _rand_pwp(rng, max_pieces=3, max_deg=1) -> PiecewisePoly:
    cuts = sorted({_rand_frac(rng, 3, 4) for _ in range(rng.randint(0, max_pieces - 1))})
    pieces = []
    lo, lo_closed = None, False
    for c in cuts:
        if rng.random() < 0.5:
            pieces.append(Interval(lo, c, lo_closed, True))
            lo, lo_closed = c, False
        else:
            pieces.append(Interval(lo, c, lo_closed, False))
            lo, lo_closed = c, True
    pieces.append(Interval(lo, None, lo_closed, False))
    polys = tuple(
        Poly.of(*[_rand_frac(rng, 4) for _ in range(rng.randint(1, max_deg + 1))])
        for _ in pieces
    )
    return PiecewisePoly(Partition(tuple(pieces)), polys)


def _rand_mpoly(rng, arity, deg) -> MPoly:
    names = input_names(arity)
    acc = MPoly.const(_rand_frac(rng, 3), names)
    for _ in range(rng.randint(1, 3)):
        term = MPoly.const(_rand_frac(rng, 3), names)
        for _ in range(rng.randint(1, max(deg, 1))):
            term = term * MPoly.var(rng.choice(names))
        acc = acc + term
    return acc


def _adaptive_simpson(f, a, b, tol=1e-11, depth=26):
    def simpson(x0, x2):
        x1 = (x0 + x2) / 2
        return (x2 - x0) / 6 * (f(x0) + 4 * f(x1) + f(x2))

    def rec(x0, x2, whole, d):
        mid = (x0 + x2) / 2
        s_l, s_r = simpson(x0, mid), simpson(mid, x2)
        if d <= 0 or abs(s_l + s_r - whole) < 15 * tol:
            return s_l + s_r + (s_l + s_r - whole) / 15
        return rec(x0, mid, s_l, d - 1) + rec(mid, x2, s_r, d - 1)

    return rec(a, b, simpson(a, b), depth)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def test_eval_relu_representation():
    relu = pwp_apply_sa_gate(encode_relu([1]), [IDENT])
    assert pwp_eval(relu, -3) == 0
    assert pwp_eval(relu, 5) == 5


def test_eval_tent_peak():
    assert pwp_eval(TENT1, F(1, 2)) == 1


def test_eval_rational_in_rational_out():
    v = pwp_eval(TENT1, F(3, 8))
    assert isinstance(v, F) and v == F(3, 4)


def test_eval_at_algebraic_points():
    s2 = AlgebraicReal.root_in(Poly.of(-2, 0, 1), 1, 2)
    relu = pwp_apply_sa_gate(encode_relu([1]), [IDENT])
    assert pwp_eval(relu, s2) == s2
    # sqrt(2)/2 lies on the falling branch, so the tent gives 2 - sqrt(2)
    half_s2 = AlgebraicReal.root_in(Poly.of(F(-1, 2), 0, 1), 0, 1)
    want = AlgebraicReal.root_in(Poly.of(2, -4, 1), 0, 1)
    assert pwp_eval(TENT1, half_s2) == want


# ---------------------------------------------------------------------------
# linear combinations
# ---------------------------------------------------------------------------


def test_linear_combination_of_steps():
    step0 = PiecewisePoly(
        Partition((Interval(None, 0, False, False), Interval(0, None, True, False))),
        (Poly.zero(), Poly.const(1)),
    )
    step1 = PiecewisePoly(
        Partition((Interval(None, 1, False, False), Interval(1, None, True, False))),
        (Poly.zero(), Poly.const(1)),
    )
    comb = pwp_linear([2, 1], [step0, step1])
    assert comb.piece_count == 3
    assert [pwp_eval(comb, x) for x in (-1, F(1, 2), 2)] == [0, 2, 3]


def test_linear_identity_and_cancellation():
    rng = random.Random(1)
    f = _rand_pwp(rng, 4, 2)
    same = pwp_linear([1], [f])
    for _ in range(10):
        x = _rand_frac(rng)
        assert pwp_eval(same, x) == pwp_eval(f, x)
    zero = pwp_linear([1, -1], [f, f])
    assert all(p.is_zero for p in zero.polys)


def test_linear_piece_budget_and_errors():
    rng = random.Random(2)
    fs = [_rand_pwp(rng, 4) for _ in range(3)]
    out = pwp_linear([1, 2, 3], fs)
    assert out.piece_count <= sum(f.piece_count for f in fs)
    with pytest.raises(ValueError):
        pwp_linear([1, 2], fs)
    with pytest.raises(ValueError):
        pwp_linear([], [])


# ---------------------------------------------------------------------------
# polynomial composition
# ---------------------------------------------------------------------------


def test_compose_identity_polynomial():
    rng = random.Random(3)
    f = _rand_pwp(rng, 4, 2)
    out = pwp_compose_poly(MPoly.var("v1"), [f])
    for _ in range(10):
        x = _rand_frac(rng)
        assert pwp_eval(out, x) == pwp_eval(f, x)


def test_compose_absolute_value_two_pieces():
    relu_pos = pwp_apply_sa_gate(encode_relu([1]), [IDENT])
    relu_neg = pwp_apply_sa_gate(encode_relu([-1]), [IDENT])
    absx = pwp_compose_poly(MPoly.affine(input_names(2), [1, 1]), [relu_pos, relu_neg])
    assert absx.piece_count == 2
    assert pwp_eval(absx, -2) == 2
    assert pwp_eval(absx, 0) == 0
    assert pwp_eval(absx, 2) == 2


def test_compose_merges_to_two_pieces_with_mismatched_inputs():
    """Hand-built inputs whose breakpoint styles disagree force a singleton in
    the refinement; explicit merging recovers the 2-piece form."""
    relu_pos = PiecewisePoly(
        Partition((Interval(None, 0, False, False), Interval(0, None, True, False))),
        (Poly.zero(), Poly.x()),
    )
    relu_neg = PiecewisePoly(
        Partition((Interval(None, 0, False, True), Interval(0, None, False, False))),
        (Poly.of(0, -1), Poly.zero()),
    )
    absx = pwp_compose_poly(MPoly.affine(input_names(2), [1, 1]), [relu_pos, relu_neg])
    assert absx.piece_count == 3  # refinement keeps the singleton at 0
    assert merge_equal(absx).piece_count == 2
    for x in (-1, 0, F(1, 2), 1):
        assert pwp_eval(absx, x) == abs(x)


def test_compose_piece_and_degree_audit():
    rng = random.Random(4)
    prod = MPoly.var("v1") * MPoly.var("v2")
    for _ in range(50):
        g1 = _rand_pwp(rng, 2, 1)
        g2 = _rand_pwp(rng, 2, 1)
        out = pwp_compose_poly(prod, [g1, g2])
        assert out.piece_count <= 2 * 2
        assert out.max_degree <= 2
        for _ in range(5):
            x = _rand_frac(rng)
            assert pwp_eval(out, x) == pwp_eval(g1, x) * pwp_eval(g2, x)


def test_compose_rejects_unbound_variables():
    with pytest.raises(ValueError, match="unbound"):
        pwp_compose_poly(MPoly.var("v2"), [IDENT])


# ---------------------------------------------------------------------------
# gate application
# ---------------------------------------------------------------------------


def test_apply_relu_gate_two_pieces():
    out = pwp_apply_sa_gate(encode_relu([1]), [IDENT])
    assert out.piece_count == 2
    assert out.partition.breakpoints() == [F(0)]


def test_apply_tent_output_gate_shape():
    a = _relu_of(IDENT)
    b = _relu_of(IDENT, F(1, 2))
    f = pwp_apply_sa_gate(TRI_OUT, [a, b])
    assert f.piece_count == 4
    assert f.partition.breakpoints() == [F(0), F(1, 2), F(1)]
    # rising branch 2x, falling branch 2-2x, zero outside
    assert pwp_eval(f, F(1, 4)) == F(1, 2)
    assert pwp_eval(f, F(3, 4)) == F(1, 2)
    assert pwp_eval(f, -1) == 0 and pwp_eval(f, 2) == 0
    # and the paper-level identity f(3/4) = 2(1 - 3/4)
    assert pwp_eval(f, F(3, 4)) == 2 * (1 - F(3, 4))


def test_apply_max_gate_breakpoint():
    from depthsep.gates import encode_max

    mx = encode_max(
        [MPoly.affine(("v1",), [1]), MPoly.affine(("v1",), [-1], 1)], arity=1
    )
    out = pwp_apply_sa_gate(mx, [IDENT])
    assert out.piece_count == 2
    assert out.partition.breakpoints() == [F(1, 2)]
    assert pwp_eval(out, 0) == 1 and pwp_eval(out, 1) == 1
    assert pwp_eval(out, F(1, 2)) == F(1, 2)


def test_apply_gate_error_cases():
    g = encode_relu(["w"])
    with pytest.raises(ValueError, match="unbound"):
        pwp_apply_sa_gate(g, [IDENT])
    with pytest.raises(ValueError, match="inputs"):
        pwp_apply_sa_gate(encode_relu([1]), [IDENT, IDENT])


def test_bdt_gate_agrees_with_linear_combination_of_tree_gates():
    stump0 = Split((F(1),), F(0), Leaf(F(0)), Leaf(F(1)))
    stump1 = Split((F(1),), F(1), Leaf(F(0)), Leaf(F(1)))
    bt = BoostedTrees((F(2), F(1)), (stump0, stump1))
    via_gate = pwp_apply_sa_gate(encode_bdt(bt, arity=1), [IDENT])
    via_linear = pwp_linear(
        [2, 1],
        [
            pwp_apply_sa_gate(encode_dt(stump0, arity=1), [IDENT]),
            pwp_apply_sa_gate(encode_dt(stump1, arity=1), [IDENT]),
        ],
    )
    for x in (-1, 0, F(1, 2), 1, 2):
        assert pwp_eval(via_gate, x) == pwp_eval(via_linear, x)
    assert encode_bdt(bt, arity=1).profile.t == 6


# ---------------------------------------------------------------------------
# classifier and crossing number
# ---------------------------------------------------------------------------


def test_classifier_constants():
    assert classifier(PiecewisePoly.const(F(1, 2))).polys == (Poly.const(1),)
    assert classifier(PiecewisePoly.const(0)).polys == (Poly.zero(),)


def test_classifier_of_tent():
    c = classifier(TENT1)
    assert c.piece_count == 3
    assert c.partition.pieces[1] == Interval(F(1, 4), F(3, 4), True, True)
    assert [p.degree <= 0 for p in c.polys] == [True, True, True]


def test_classifier_touching_root_keeps_isolated_point():
    # 1/2 - (x-1)^2 touches the threshold only at x = 1
    f = PiecewisePoly.of_poly(Poly.of(F(-1, 2), 2, -1))
    c = classifier(f)
    assert c.piece_count == 3
    assert c.partition.pieces[1] == Interval.point(1)
    assert pwp_eval(c, 1) == 1 and pwp_eval(c, 0) == 0


def test_classifier_idempotent():
    rng = random.Random(5)
    cases = [TENT1, tent(2), PiecewisePoly.of_poly(Poly.of(F(-1, 2), 2, -1))]
    cases += [_rand_pwp(rng, 4, 2) for _ in range(30)]
    for f in cases:
        c = classifier(f)
        again = classifier(c)
        assert again.partition == c.partition and again.polys == c.polys


def test_classifier_alternates_values():
    rng = random.Random(6)
    for _ in range(50):
        c = classifier(_rand_pwp(rng, 4, 2))
        vals = [p(F(0)) if p.degree <= 0 else None for p in c.polys]
        assert all(v in (0, 1) for v in vals)
        assert all(a != b for a, b in zip(vals, vals[1:]))


def test_crossing_numbers_of_named_functions():
    relu = pwp_apply_sa_gate(encode_relu([1]), [IDENT])
    assert crossing_number(relu) == 2
    assert crossing_number(PiecewisePoly.const(0)) == 1
    for k in range(1, 6):
        assert crossing_number(tent(k)) == 2**k + 1


def test_crossing_report_validation():
    with pytest.raises(ValueError):
        CrossingReport(0, 1, 0)
    with pytest.raises(ValueError):
        CrossingReport(2, 1, 3)


# ---------------------------------------------------------------------------
# disagreement
# ---------------------------------------------------------------------------


def test_disagreement_with_self_is_zero():
    rep = disagreement(TENT1, TENT1)
    assert rep.disagree == 0 and rep.s_f == rep.s_g == 3


def test_disagreement_tent3_vs_zero():
    rep = disagreement(tent(3), PiecewisePoly.const(0))
    assert rep == CrossingReport(s_f=9, s_g=1, disagree=4)


def test_disagreement_tent4_vs_tent1():
    rep = disagreement(tent(4), TENT1)
    assert rep.s_f == 17 and rep.s_g == 3
    assert rep.disagree >= 6  # ceil((17/2)(1 - 6/17))


# ---------------------------------------------------------------------------
# L1 distance
# ---------------------------------------------------------------------------


def test_l1_zero_for_equal_functions():
    e = l1_distance(TENT1, TENT1, 0, 1)
    assert e.exact and e.low == 0


def test_l1_tent_vs_zero_is_half():
    e = l1_distance(TENT1, PiecewisePoly.const(0), 0, 1)
    assert e.exact and e.low == F(1, 2)


def test_l1_tent2_vs_half_is_quarter():
    e = l1_distance(tent(2), PiecewisePoly.const(F(1, 2)), 0, 1)
    assert e.exact and e.low == F(1, 4)


def test_l1_rejects_bad_window_and_width():
    with pytest.raises(ValueError):
        l1_distance(TENT1, TENT1, 1, 0)
    with pytest.raises(ValueError):
        l1_distance(TENT1, TENT1, 0, 1, width=0)


def test_l1_with_irrational_splits_matches_quadrature():
    f = PiecewisePoly.of_poly(Poly.of(0, 0, 1))
    e = l1_distance(f, PiecewisePoly.const(F(1, 2)), 0, 1, width=F(1, 10**8))
    assert not e.exact
    assert e.high - e.low <= F(1, 10**8)
    oracle = _adaptive_simpson(lambda x: abs(x * x - 0.5), 0.0, 1.0)
    assert float(e.low) - 1e-9 <= oracle <= float(e.high) + 1e-9


def test_l1_symmetry_and_triangle_inequality():
    rng = random.Random(7)
    for _ in range(25):
        f, g, h = (_rand_pwp(rng, 3, 1) for _ in range(3))
        efg = l1_distance(f, g, -2, 2)
        egf = l1_distance(g, f, -2, 2)
        assert efg.exact and egf.exact and efg.low == egf.low
        efh = l1_distance(f, h, -2, 2)
        egh = l1_distance(g, h, -2, 2)
        assert efh.low <= efg.low + egh.low


# ---------------------------------------------------------------------------
# lemma-level audits
# ---------------------------------------------------------------------------


def test_gate_application_piece_bound_1000_cases():
    """Random gates over random inputs: piece count <= s*t*k*(1+alpha*gamma),
    degree <= beta*gamma, and pointwise agreement with direct gate evaluation
    at 10 rational probes per case."""
    rng = random.Random(8)
    for _ in range(1000):
        k = rng.randint(1, 3)
        inputs = [_rand_pwp(rng, rng.randint(1, 3), rng.randint(0, 2)) for _ in range(k)]
        t = max(f.piece_count for f in inputs)
        gamma = max(f.max_degree for f in inputs)
        s = rng.randint(1, 3)
        preds = tuple(_rand_mpoly(rng, k, rng.randint(1, 2)) for _ in range(s))
        alpha = max(q.degree_in(input_names(k)) for q in preds)
        m = rng.randint(0, 3)
        terms = []
        for _ in range(m):
            lt = tuple(i for i in range(s) if rng.random() < 0.4)
            ge = tuple(i for i in range(s) if rng.random() < 0.4)
            terms.append(SaTerm(lt, ge, _rand_mpoly(rng, k, rng.randint(1, 2))))
        beta = max(
            (term.poly.degree_in(input_names(k)) for term in terms), default=0
        )
        gate = SaGate(k, preds, tuple(terms), (), SaProfile(s, alpha, beta, m))
        out = pwp_apply_sa_gate(gate, inputs)
        assert out.piece_count <= s * t * k * (1 + alpha * gamma)
        assert out.max_degree <= beta * gamma
        for _ in range(10):
            x = _rand_frac(rng)
            vec = [pwp_eval(f, x) for f in inputs]
            assert pwp_eval(out, x) == gate_eval(gate, vec)


def test_crossing_number_bound_500_cases():
    """A function with t pieces of degree <= alpha crosses the threshold at
    most t*(1+alpha) times."""
    rng = random.Random(9)
    for _ in range(500):
        f = _rand_pwp(rng, rng.randint(1, 4), rng.randint(0, 3))
        t = f.piece_count
        alpha = f.max_degree
        assert crossing_number(f) <= t * (1 + alpha)


def test_disagreement_lower_bound_500_pairs():
    """disagree/s_f >= (1/2)(1 - 2 s_g/s_f), as an exact integer inequality."""
    rng = random.Random(10)
    for _ in range(500):
        f = _rand_pwp(rng, rng.randint(1, 4), 1)
        g = _rand_pwp(rng, rng.randint(1, 4), 1)
        rep = disagreement(f, g)
        assert 2 * rep.disagree >= rep.s_f - 2 * rep.s_g


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_pwp_json_round_trip():
    f = tent(2)
    back = PiecewisePoly.from_json(f.to_json())
    assert back.partition == f.partition and back.polys == f.polys
